//! Level statistics: unfolding, nearest-neighbor spacing distributions,
//! minimal-gap scaling, and the reference random-matrix laws.

mod csv;

pub use csv::{write_delta_min_csv, write_power_law_csv, write_spacing_csv};

use crate::error::{Error, Result};
use crate::spectral::EigenSolution;

/// Spacing histograms cover this range; spacings beyond it are dropped from
/// the density normalization.
pub const SPACING_RANGE: (f64, f64) = (0.0, 4.0);

/// Levels rescaled to unit mean nearest-neighbor spacing.
#[derive(Debug, Clone)]
pub struct UnfoldedSpectrum {
    pub levels: Vec<f64>,
    /// Source mass ratio as `1/kappa`; zero when not tracked.
    pub inv_kappa: f64,
    /// Source parity sector; `0` when merged or unknown.
    pub parity: i8,
}

impl UnfoldedSpectrum {
    pub fn spacings(&self) -> Vec<f64> {
        self.levels.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

fn check_sorted(levels: &[f64]) -> Result<()> {
    if levels.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least two levels to unfold".into(),
        ));
    }
    if levels.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("levels must be sorted ascending".into()));
    }
    Ok(())
}

/// Rescales sorted levels by their mean nearest-neighbor spacing.
pub fn unfold(levels: &[f64]) -> Result<UnfoldedSpectrum> {
    check_sorted(levels)?;
    let mean = (levels[levels.len() - 1] - levels[0]) / (levels.len() - 1) as f64;
    if mean <= 0.0 {
        return Err(Error::InvalidInput(
            "levels span zero width; cannot unfold".into(),
        ));
    }
    Ok(UnfoldedSpectrum {
        levels: levels.iter().map(|&e| e / mean).collect(),
        inv_kappa: 0.0,
        parity: 0,
    })
}

/// Unfolds one parity sector of a solution, optionally truncated to the
/// lowest `max_levels` states of that sector.
pub fn unfold_sector(
    sol: &EigenSolution,
    parity: i8,
    max_levels: Option<usize>,
) -> Result<UnfoldedSpectrum> {
    let mut levels = sol.sector_energies(parity);
    if let Some(n) = max_levels {
        if levels.len() < n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: levels.len(),
            });
        }
        levels.truncate(n);
    }
    let mut u = unfold(&levels)?;
    u.inv_kappa = sol.mass.inv_kappa();
    u.parity = parity;
    Ok(u)
}

/// A density-normalized histogram. Bins partition `[lo, hi)` uniformly with
/// the last bin right-inclusive; samples outside the range are dropped from
/// the normalization.
#[derive(Debug, Clone)]
pub struct Histogram {
    /// `num_bins + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub densities: Vec<f64>,
}

pub type SpacingHistogram = Histogram;

impl Histogram {
    pub fn num_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    /// Integral of the density over the binned range (1 when any sample
    /// landed in range).
    pub fn integral(&self) -> f64 {
        let w = self.bin_width();
        self.densities.iter().map(|d| d * w).sum()
    }
}

pub fn histogram(samples: &[f64], range: (f64, f64), num_bins: usize) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("histogram of an empty sample".into()));
    }
    if num_bins == 0 || !(range.1 > range.0) {
        return Err(Error::InvalidInput("invalid histogram binning".into()));
    }
    let (lo, hi) = range;
    let width = (hi - lo) / num_bins as f64;
    let mut counts = vec![0u64; num_bins];
    let mut in_range = 0u64;
    for &x in samples {
        if x < lo || x > hi {
            continue;
        }
        let mut bin = ((x - lo) / width) as usize;
        if bin >= num_bins {
            bin = num_bins - 1; // x == hi
        }
        counts[bin] += 1;
        in_range += 1;
    }
    let densities = counts
        .iter()
        .map(|&c| {
            if in_range == 0 {
                0.0
            } else {
                c as f64 / (in_range as f64 * width)
            }
        })
        .collect();
    let edges = (0..=num_bins).map(|i| lo + i as f64 * width).collect();
    Ok(Histogram {
        edges,
        counts,
        densities,
    })
}

/// Histogram of nearest-neighbor spacings over [`SPACING_RANGE`].
///
/// `num_bins` defaults to the square root of the number of spacings.
pub fn spacing_histogram(u: &UnfoldedSpectrum, num_bins: Option<usize>) -> Result<Histogram> {
    let spacings = u.spacings();
    if spacings.is_empty() {
        return Err(Error::InvalidInput("spectrum has no spacings".into()));
    }
    let bins = num_bins.unwrap_or_else(|| ((spacings.len() as f64).sqrt().round() as usize).max(1));
    histogram(&spacings, SPACING_RANGE, bins)
}

/// The Wigner surmise for the Gaussian orthogonal ensemble,
/// `P(s) = (pi s / 2) exp(-pi s^2 / 4)`.
pub fn wigner_goe(s: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 * s * (-std::f64::consts::FRAC_PI_4 * s * s).exp()
}

/// Poisson nearest-neighbor law `exp(-s)` of uncorrelated levels.
pub fn poisson(s: f64) -> f64 {
    (-s).exp()
}

/// Cumulative form of [`wigner_goe`].
pub fn wigner_goe_cdf(s: f64) -> f64 {
    1.0 - (-std::f64::consts::FRAC_PI_4 * s * s).exp()
}

/// Cumulative form of [`poisson`].
pub fn poisson_cdf(s: f64) -> f64 {
    1.0 - (-s).exp()
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("KS distance of an empty sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    Ok(d)
}

/// Smallest gap among the first `n` levels.
pub fn delta_min(levels: &[f64], n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidInput(
            "delta_min needs at least two levels".into(),
        ));
    }
    if n > levels.len() {
        return Err(Error::LengthMismatch {
            expected: n,
            got: levels.len(),
        });
    }
    Ok(levels[..n]
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min))
}

/// Minimal gap against level count.
#[derive(Debug, Clone)]
pub struct DeltaMinCurve {
    pub n: Vec<usize>,
    pub values: Vec<f64>,
}

/// [`delta_min`] evaluated on one spectrum over a grid of level counts.
pub fn delta_min_curve(levels: &[f64], n_grid: &[usize]) -> Result<DeltaMinCurve> {
    let values = n_grid
        .iter()
        .map(|&n| delta_min(levels, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(DeltaMinCurve {
        n: n_grid.to_vec(),
        values,
    })
}

/// Arithmetic mean of per-spectrum minimal gaps across a family of spectra,
/// for each level count in the grid.
pub fn delta_min_average(spectra: &[UnfoldedSpectrum], n_grid: &[usize]) -> Result<DeltaMinCurve> {
    if spectra.is_empty() {
        return Err(Error::InvalidInput("no spectra to average over".into()));
    }
    let mut values = vec![0.0f64; n_grid.len()];
    for u in spectra {
        for (i, &n) in n_grid.iter().enumerate() {
            values[i] += delta_min(&u.levels, n)?;
        }
    }
    for v in &mut values {
        *v /= spectra.len() as f64;
    }
    Ok(DeltaMinCurve {
        n: n_grid.to_vec(),
        values,
    })
}

/// Least-squares power law `value = a * N^b` through log-log regression.
/// Returns `(a, b)`.
pub fn fit_power_law(n: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    if n.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: n.len(),
            got: values.len(),
        });
    }
    if n.len() < 2 {
        return Err(Error::InvalidInput("power-law fit needs >= 2 points".into()));
    }
    if n.iter().chain(values).any(|&v| v <= 0.0) {
        return Err(Error::InvalidInput(
            "power-law fit needs positive abscissae and values".into(),
        ));
    }
    let m = n.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in n.iter().zip(values) {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let denom = m * sxx - sx * sx;
    if denom == 0.0 {
        return Err(Error::InvalidInput(
            "degenerate abscissae in power-law fit".into(),
        ));
    }
    let b = (m * sxy - sx * sy) / denom;
    let ln_a = (sy - b * sx) / m;
    Ok((ln_a.exp(), b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unfold_reference_cases() {
        let u = unfold(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(u.levels, vec![0.0, 1.0, 2.0, 3.0]);
        let u = unfold(&[0.0, 2.0, 4.0]).unwrap();
        assert_eq!(u.levels, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn unfold_unit_mean_spacing_and_idempotence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut levels: Vec<f64> = (0..500).map(|_| rng.gen_range(0.0..100.0)).collect();
        levels.sort_by(f64::total_cmp);
        let u = unfold(&levels).unwrap();
        let mean = u.spacings().iter().sum::<f64>() / (u.levels.len() - 1) as f64;
        assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-12);
        let uu = unfold(&u.levels).unwrap();
        for (a, b) in u.levels.iter().zip(&uu.levels) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn unfold_rejects_bad_input() {
        assert!(unfold(&[1.0]).is_err());
        assert!(unfold(&[1.0, 0.5]).is_err());
        assert!(unfold(&[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn histogram_basics() {
        // unit-spaced ladder, one bin: all mass in that bin
        let u = unfold(&[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let h = spacing_histogram(&u, Some(1)).unwrap();
        assert_eq!(h.counts, vec![4]);
        assert_abs_diff_eq!(h.integral(), 1.0, epsilon = 1e-12);

        let h = histogram(&[0.5, 1.5, 2.5, 5.0], (0.0, 3.0), 3).unwrap();
        assert_eq!(h.counts, vec![1, 1, 1]); // 5.0 dropped
        assert_abs_diff_eq!(h.integral(), 1.0, epsilon = 1e-12);
        assert!(h.densities.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn histogram_default_bin_rule() {
        let levels: Vec<f64> = (0..402).map(|i| i as f64).collect();
        let u = unfold(&levels).unwrap();
        let h = spacing_histogram(&u, None).unwrap();
        // sqrt(401) ~ 20.02 -> 20 bins
        assert_eq!(h.num_bins(), 20);
    }

    #[test]
    fn wigner_and_poisson_values() {
        assert_eq!(wigner_goe(0.0), 0.0);
        assert_abs_diff_eq!(
            wigner_goe(1.0),
            std::f64::consts::FRAC_PI_2 * (-std::f64::consts::FRAC_PI_4).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(wigner_goe(1.0), 0.716186, epsilon = 1e-6);
        assert_abs_diff_eq!(poisson(0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(poisson(1.0), (-1.0f64).exp(), epsilon = 1e-15);
    }

    /// Quadrature oracle for the surmise: unit norm and unit mean.
    #[test]
    fn wigner_moments_by_quadrature() {
        let n = 200_000;
        let h = 20.0 / n as f64;
        let (mut norm, mut mean) = (0.0, 0.0);
        for i in 0..=n {
            let s = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            norm += w * wigner_goe(s);
            mean += w * s * wigner_goe(s);
        }
        norm *= h / 3.0;
        mean *= h / 3.0;
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn cdfs_match_densities() {
        // d/ds CDF = density, checked by central differences
        for s in [0.1, 0.5, 1.0, 2.0, 3.5] {
            let h = 1e-6;
            let d1 = (wigner_goe_cdf(s + h) - wigner_goe_cdf(s - h)) / (2.0 * h);
            assert_abs_diff_eq!(d1, wigner_goe(s), epsilon = 1e-8);
            let d2 = (poisson_cdf(s + h) - poisson_cdf(s - h)) / (2.0 * h);
            assert_abs_diff_eq!(d2, poisson(s), epsilon = 1e-8);
        }
    }

    #[test]
    fn ks_recognizes_its_own_law() {
        // quantile samples of the GOE law itself
        let n = 2000;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) / n as f64;
                // invert 1 - exp(-pi s^2/4) = u
                (-(1.0 - u).ln() * 4.0 / std::f64::consts::PI).sqrt()
            })
            .collect();
        let d_goe = ks_statistic(&samples, wigner_goe_cdf).unwrap();
        let d_poisson = ks_statistic(&samples, poisson_cdf).unwrap();
        assert!(d_goe < 0.001, "d_goe = {d_goe}");
        assert!(d_poisson > 0.05, "d_poisson = {d_poisson}");
    }

    #[test]
    fn delta_min_cases() {
        let levels = [0.0, 1.0, 3.0, 3.5];
        assert_eq!(delta_min(&levels, 3).unwrap(), 1.0);
        assert_eq!(delta_min(&levels, 4).unwrap(), 0.5);
        assert!(delta_min(&levels, 1).is_err());
        assert!(delta_min(&levels, 5).is_err());
        // non-increasing in N
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut levels: Vec<f64> = (0..200).map(|_| rng.gen_range(0.0..50.0)).collect();
        levels.sort_by(f64::total_cmp);
        let mut prev = f64::INFINITY;
        for n in 2..=200 {
            let d = delta_min(&levels, n).unwrap();
            assert!(d <= prev);
            prev = d;
        }
    }

    #[test]
    fn delta_min_commutes_with_unfolding() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut levels: Vec<f64> = (0..300).map(|_| rng.gen_range(0.0..80.0)).collect();
        levels.sort_by(f64::total_cmp);
        let u = unfold(&levels).unwrap();
        let mean = (levels[299] - levels[0]) / 299.0;
        for n in [10, 50, 300] {
            let raw = delta_min(&levels, n).unwrap();
            let unf = delta_min(&u.levels, n).unwrap();
            assert_abs_diff_eq!(unf, raw / mean, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_min_average_properties() {
        let mk = |scale: f64| UnfoldedSpectrum {
            levels: (0..50).map(|i| i as f64 * scale).collect(),
            inv_kappa: 0.0,
            parity: 1,
        };
        let a = mk(1.0);
        let b = mk(2.0);
        let grid = [5usize, 10, 50];
        let single = delta_min_average(std::slice::from_ref(&a), &grid).unwrap();
        for (i, &n) in grid.iter().enumerate() {
            assert_eq!(single.values[i], delta_min(&a.levels, n).unwrap());
        }
        let fwd = delta_min_average(&[a.clone(), b.clone()], &grid).unwrap();
        let rev = delta_min_average(&[b, a], &grid).unwrap();
        assert_eq!(fwd.values, rev.values);
    }

    #[test]
    fn power_law_exact_and_constant() {
        let n: Vec<f64> = (1..=50).map(|i| i as f64).collect();
        let vals: Vec<f64> = n.iter().map(|x| 3.0 / x.sqrt()).collect();
        let (a, b) = fit_power_law(&n, &vals).unwrap();
        assert_abs_diff_eq!(a, 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(b, -0.5, epsilon = 1e-10);

        let flat = vec![2.5; 50];
        let (_, b) = fit_power_law(&n, &flat).unwrap();
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn power_law_with_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n: Vec<f64> = (10..60).map(|i| i as f64).collect();
        let vals: Vec<f64> = n
            .iter()
            .map(|x| 2.0 * x.powf(-0.47) * (1.0 + 0.01 * rng.gen_range(-1.0..1.0)))
            .collect();
        let (_, b) = fit_power_law(&n, &vals).unwrap();
        assert!((b + 0.47).abs() < 0.05, "exponent {b}");
    }

    #[test]
    fn power_law_rejects_nonpositive() {
        assert!(fit_power_law(&[1.0, 2.0], &[1.0, 0.0]).is_err());
        assert!(fit_power_law(&[1.0, 2.0], &[1.0, -2.0]).is_err());
        assert!(fit_power_law(&[1.0], &[1.0]).is_err());
    }
}
