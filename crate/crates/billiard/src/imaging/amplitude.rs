//! Distribution of wave-function amplitudes and the random-wave reference.

use super::{GridKind, PixelGrid};
use crate::error::{Error, Result};
use crate::stats::{histogram, Histogram};

/// Density-normalized histogram of pixel magnitudes `|psi|` of a
/// wave-function grid. `num_bins` defaults to the square root of the pixel
/// count.
pub fn amplitude_histogram(grid: &PixelGrid, num_bins: Option<usize>) -> Result<Histogram> {
    if grid.kind() != GridKind::Wavefunction {
        return Err(Error::InvalidInput(
            "amplitude histogram expects a wave-function grid".into(),
        ));
    }
    let samples: Vec<f64> = grid.values().iter().map(|v| v.abs()).collect();
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    let max = samples.iter().copied().fold(0.0f64, f64::max);
    if max == 0.0 {
        return Err(Error::InvalidInput("grid is identically zero".into()));
    }
    let bins = num_bins.unwrap_or_else(|| (samples.len() as f64).sqrt().round() as usize);
    histogram(&samples, (0.0, max), bins)
}

/// Random-wave prediction for the amplitude distribution: a zero-mean
/// Gaussian whose variance `v = 1/L` is fixed by the normalization of the
/// wave function (no fit parameters).
pub fn gaussian_prediction(psi: f64, box_length: f64) -> f64 {
    let v = 1.0 / box_length;
    (-psi * psi / (2.0 * v * v)).exp() / ((2.0 * std::f64::consts::PI).sqrt() * v)
}

/// Cumulative law of `|psi|` under [`gaussian_prediction`]: the folded
/// normal, `P(|psi| <= x) = erf(x L / sqrt(2))`.
pub fn amplitude_gaussian_cdf(x: f64, box_length: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    libm::erf(x * box_length / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_reference_values() {
        // peak value at psi = 0 with L = pi
        assert_abs_diff_eq!(
            gaussian_prediction(0.0, PI),
            PI / (2.0 * PI).sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(gaussian_prediction(0.0, PI), 1.25331, epsilon = 1e-5);
    }

    #[test]
    fn gaussian_normalization_by_quadrature() {
        // integral over the real line and second moment 1/L^2
        let l = PI;
        let n = 400_000;
        let h = 8.0 / n as f64; // support [-4, 4] in units where v ~ 0.32
        let (mut norm, mut second) = (0.0, 0.0);
        for i in 0..=n {
            let x = -4.0 + i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let p = gaussian_prediction(x, l);
            norm += w * p;
            second += w * x * x * p;
        }
        norm *= h / 3.0;
        second *= h / 3.0;
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(second, 1.0 / (l * l), epsilon = 1e-9);
    }

    #[test]
    fn folded_cdf_matches_density_by_quadrature() {
        let l = PI;
        for x in [0.1, 0.3, 0.7, 1.5] {
            let n = 20_000;
            let h = x / n as f64;
            let mut integral = 0.0;
            for i in 0..=n {
                let t = i as f64 * h;
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                integral += w * 2.0 * gaussian_prediction(t, l);
            }
            integral *= h / 3.0;
            assert_abs_diff_eq!(integral, amplitude_gaussian_cdf(x, l), epsilon = 1e-9);
        }
    }

    #[test]
    fn constant_grid_single_bin() {
        let g = PixelGrid::new(Array2::from_elem((8, 8), 0.5), GridKind::Wavefunction).unwrap();
        let h = amplitude_histogram(&g, Some(4)).unwrap();
        // all mass in the last bin (values equal the range maximum)
        assert_eq!(h.counts[3], 64);
        assert_eq!(h.counts[..3].iter().sum::<u64>(), 0);
        assert_abs_diff_eq!(h.integral(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn density_grid_rejected() {
        let g = PixelGrid::new(Array2::from_elem((8, 8), 0.5), GridKind::Density).unwrap();
        assert!(amplitude_histogram(&g, None).is_err());
    }
}
