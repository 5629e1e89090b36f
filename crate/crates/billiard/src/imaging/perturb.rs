//! Scaled, noisy, and fully synthetic inputs for probing the classifier.

use super::{GridKind, PixelGrid};
use crate::error::{Error, Result};
use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};

/// Pixel-wise multiplication by `alpha`. Anything but `alpha = 1` leaves the
/// training normalization, so the flag is cleared.
pub fn scale_image(grid: &PixelGrid, alpha: f64) -> Result<PixelGrid> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!(
            "scale factor must be positive, got {alpha}"
        )));
    }
    let values = grid.values().mapv(|v| v * alpha);
    let normalized = grid.is_flagged_normalized() && alpha == 1.0;
    Ok(grid.with_values(values, grid.kind(), normalized))
}

/// A Gaussian field with standard deviation `sigma`, averaged over the
/// problem's symmetry group so it is even under transposition (fermionic
/// exchange keeps its antisymmetry) and under the double reflection
/// `(i, j) -> (R-1-i, R-1-j)` (mirror parity is preserved).
pub fn symmetrized_noise_field(resolution: usize, sigma: f64, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = Array2::<f64>::zeros((resolution, resolution));
    for v in raw.iter_mut() {
        let g: f64 = rng.sample(StandardNormal);
        *v = sigma * g;
    }
    let r = resolution;
    let mut field = Array2::<f64>::zeros((r, r));
    for i in 0..r {
        for j in 0..r {
            // sum the group orbit in a canonical order so the result is
            // bitwise identical at every orbit member
            let mut orbit = [
                (i, j),
                (j, i),
                (r - 1 - i, r - 1 - j),
                (r - 1 - j, r - 1 - i),
            ];
            orbit.sort_unstable();
            field[[i, j]] = 0.25 * orbit.iter().map(|&(a, b)| raw[[a, b]]).sum::<f64>();
        }
    }
    field
}

fn expect_wavefunction(grid: &PixelGrid, what: &str) -> Result<()> {
    if grid.kind() != GridKind::Wavefunction {
        return Err(Error::InvalidInput(format!(
            "{what} expects a wave-function grid"
        )));
    }
    Ok(())
}

/// Multiplicative noise `psi -> a_sigma psi (1 + r_sigma)` with the
/// symmetrized field, renormalized to the grid convention. Zero pixels stay
/// zero, so nodal lines survive.
pub fn multiplicative_noise(psi: &PixelGrid, sigma: f64, seed: u64) -> Result<PixelGrid> {
    expect_wavefunction(psi, "multiplicative noise")?;
    if sigma < 0.0 {
        return Err(Error::InvalidInput("sigma must be >= 0".into()));
    }
    let base = psi.clone().normalized()?;
    if sigma == 0.0 {
        return Ok(base);
    }
    let field = symmetrized_noise_field(psi.resolution(), sigma, seed);
    let values = base.values() * &field.mapv(|r| 1.0 + r);
    psi.with_values(values, GridKind::Wavefunction, false).normalized()
}

/// Additive noise `psi -> a_sigma (psi + G r_sigma)`, renormalized. Unlike
/// the multiplicative form, large `G` erases the input entirely.
pub fn additive_noise(psi: &PixelGrid, sigma: f64, weight: f64, seed: u64) -> Result<PixelGrid> {
    expect_wavefunction(psi, "additive noise")?;
    if sigma < 0.0 || weight < 0.0 {
        return Err(Error::InvalidInput("sigma and G must be >= 0".into()));
    }
    let base = psi.clone().normalized()?;
    if sigma == 0.0 || weight == 0.0 {
        return Ok(base);
    }
    let field = symmetrized_noise_field(psi.resolution(), sigma, seed);
    let values = base.values() + &(field * weight);
    psi.with_values(values, GridKind::Wavefunction, false).normalized()
}

/// Distributions for synthetic images.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseDistribution {
    Gaussian,
    Laplace,
    Uniform,
}

impl NoiseDistribution {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "laplace" => Ok(Self::Laplace),
            "uniform" => Ok(Self::Uniform),
            _ => Err(Error::InvalidInput(format!("unknown distribution '{s}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Laplace => "laplace",
            Self::Uniform => "uniform",
        }
    }
}

/// A random density image: pixel magnitudes drawn from the chosen
/// distribution, an exact `round(zero_fraction * R^2)`-pixel random subset
/// forced to zero, normalized as a density.
pub fn random_image(
    resolution: usize,
    zero_fraction: f64,
    distribution: NoiseDistribution,
    seed: u64,
) -> Result<PixelGrid> {
    if !(0.0..1.0).contains(&zero_fraction) {
        return Err(Error::InvalidInput(format!(
            "zero fraction must lie in [0, 1), got {zero_fraction}"
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidInput("resolution must be >= 2".into()));
    }
    let n = resolution * resolution;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flat = vec![0.0f64; n];
    match distribution {
        NoiseDistribution::Gaussian => {
            for v in &mut flat {
                let g: f64 = rng.sample(StandardNormal);
                *v = g.abs();
            }
        }
        NoiseDistribution::Laplace => {
            // |Laplace(0, 1)| is exponential with unit rate
            let exp = Exp::new(1.0).expect("valid rate");
            for v in &mut flat {
                *v = rng.sample(exp);
            }
        }
        NoiseDistribution::Uniform => {
            for v in &mut flat {
                *v = rng.gen_range(0.0..1.0);
            }
        }
    }
    let zeros = (zero_fraction * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for &i in order.iter().take(zeros) {
        flat[i] = 0.0;
    }
    let values = Array2::from_shape_vec((resolution, resolution), flat).expect("square");
    PixelGrid::new(values, GridKind::Density)?.normalized()
}
