//! Evaluation of eigenstates and reference states on pixel grids.

use super::{GridKind, PixelGrid};
use crate::error::{Error, Result};
use crate::spectral::{BasisSet, EigenSolution};
use crate::BOX_LENGTH;
use ndarray::Array2;

/// Evaluates states of one solution on a fixed grid, sharing the sine table
/// across states.
pub struct Rasterizer {
    resolution: usize,
    cutoff: u32,
    /// `R x (c-1)` table of `sin(n z_i)` at pixel centers.
    sine: Array2<f64>,
    basis: BasisSet,
}

impl Rasterizer {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn new(cutoff: u32, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidInput(format!(
                "resolution must be >= 2, got {resolution}"
            )));
        }
        let modes = cutoff as usize - 1;
        let mut sine = Array2::<f64>::zeros((resolution, modes));
        for i in 0..resolution {
            let z = (i as f64 + 0.5) * BOX_LENGTH / resolution as f64;
            for n in 1..=modes {
                sine[[i, n - 1]] = (n as f64 * z).sin();
            }
        }
        Ok(Self {
            resolution,
            cutoff,
            sine,
            basis: BasisSet::new(cutoff, None)?,
        })
    }

    /// Raw evaluation of `psi(z1, z2)` (row = `z1` index) from the state's
    /// basis coefficients: the antisymmetric coefficient matrix is
    /// sandwiched between sine tables. Density kind squares the values.
    /// No normalization is applied.
    pub fn evaluate(&self, sol: &EigenSolution, state: usize, kind: GridKind) -> Result<PixelGrid> {
        if sol.cutoff != self.cutoff {
            return Err(Error::CutoffMismatch {
                left: sol.cutoff,
                right: self.cutoff,
            });
        }
        let coeffs = sol.coefficients.as_ref().ok_or(Error::MissingCoefficients)?;
        if state >= sol.num_states() {
            return Err(Error::InvalidInput(format!(
                "state index {state} out of range ({} states)",
                sol.num_states()
            )));
        }
        let modes = self.cutoff as usize - 1;
        let norm = std::f64::consts::SQRT_2 / BOX_LENGTH;
        let mut anti = Array2::<f64>::zeros((modes, modes));
        let row = coeffs.row(state);
        for (k, &(n1, n2)) in self.basis.pairs().iter().enumerate() {
            let w = row[k] * norm;
            if w != 0.0 {
                anti[[n1 as usize - 1, n2 as usize - 1]] = w;
                anti[[n2 as usize - 1, n1 as usize - 1]] = -w;
            }
        }
        let psi = self.sine.dot(&anti).dot(&self.sine.t());
        let values = match kind {
            GridKind::Wavefunction => psi,
            GridKind::Density => psi.mapv(|v| v * v),
        };
        PixelGrid::from_parts(values, kind, false)
    }

    /// Evaluation followed by exact grid normalization. Densities are
    /// produced by squaring the *normalized* wave function, so a density
    /// image and the square of its wave-function image are bitwise equal.
    pub fn state(&self, sol: &EigenSolution, state: usize, kind: GridKind) -> Result<PixelGrid> {
        match kind {
            GridKind::Wavefunction => self.evaluate(sol, state, kind)?.normalized(),
            GridKind::Density => self
                .evaluate(sol, state, GridKind::Wavefunction)?
                .normalized()?
                .to_density(),
        }
    }
}

/// One-off rasterization of a single state at pixel centers, normalized per
/// the grid convention.
pub fn rasterize(
    sol: &EigenSolution,
    state: usize,
    resolution: usize,
    kind: GridKind,
) -> Result<PixelGrid> {
    Rasterizer::new(sol.cutoff, resolution)?.state(sol, state, kind)
}

/// Wave function of two non-interacting bosons in a box, evaluated at pixel
/// centers with its analytic normalization:
/// `(N/L) [sin(k1 z1) sin(k2 z2) + sin(k2 z1) sin(k1 z2)]`, `N = 1` for
/// `k1 = k2` and `sqrt(2)` otherwise.
pub fn bosonic_state(k1: u32, k2: u32, resolution: usize) -> Result<PixelGrid> {
    if k1 < 1 || k1 > k2 {
        return Err(Error::InvalidInput(format!(
            "bosonic quantum numbers must satisfy 1 <= k1 <= k2, got ({k1}, {k2})"
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidInput(format!(
            "resolution must be >= 2, got {resolution}"
        )));
    }
    let norm = if k1 == k2 { 1.0 } else { std::f64::consts::SQRT_2 } / BOX_LENGTH;
    let (a, b) = (k1 as f64, k2 as f64);
    let mut values = Array2::<f64>::zeros((resolution, resolution));
    for i in 0..resolution {
        let z1 = (i as f64 + 0.5) * BOX_LENGTH / resolution as f64;
        for j in 0..resolution {
            let z2 = (j as f64 + 0.5) * BOX_LENGTH / resolution as f64;
            values[[i, j]] =
                norm * ((a * z1).sin() * (b * z2).sin() + (b * z1).sin() * (a * z2).sin());
        }
    }
    PixelGrid::from_parts(values, GridKind::Wavefunction, false)
}

/// The first `count` bosonic pairs `k1 <= k2` ordered by energy
/// `(k1^2 + k2^2)/2`, ties by `k1`.
pub fn bosonic_pairs_by_energy(count: usize) -> Vec<(u32, u32)> {
    // k up to sqrt(2 E_max); grow until enough pairs collected
    let mut cap = (2.0 * (count as f64) + 16.0).sqrt() as u32 + 2;
    loop {
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for k1 in 1..=cap {
            for k2 in k1..=cap {
                pairs.push((k1, k2));
            }
        }
        pairs.sort_by_key(|&(k1, k2)| (k1 * k1 + k2 * k2, k1));
        // completeness: every pair with energy below the cap boundary is present
        let boundary = cap * cap + 1;
        let complete = pairs
            .iter()
            .take(count)
            .all(|&(k1, k2)| k1 * k1 + k2 * k2 < boundary);
        if pairs.len() >= count && complete {
            pairs.truncate(count);
            return pairs;
        }
        cap *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{solve_merged, MassRatio, SolveOptions};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn heavy_solution(c: u32) -> EigenSolution {
        solve_merged(c, MassRatio::infinite_impurity(), SolveOptions::default()).unwrap()
    }

    #[test]
    fn single_basis_state_matches_closed_form() {
        // ground state of the heavy-impurity system is the pure (2,1) basis function
        let sol = heavy_solution(8);
        assert_eq!(sol.energies[0], 2.5);
        let raster = Rasterizer::new(8, 16).unwrap();
        let grid = raster.evaluate(&sol, 0, GridKind::Wavefunction).unwrap();
        let norm = std::f64::consts::SQRT_2 / PI;
        for i in 0..16 {
            for j in 0..16 {
                let z1 = grid.pixel_center(i);
                let z2 = grid.pixel_center(j);
                let expect =
                    norm * ((2.0 * z1).sin() * z2.sin() - z1.sin() * (2.0 * z2).sin());
                assert_abs_diff_eq!(grid.values()[[i, j]], expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn wavefunction_grid_is_antisymmetric() {
        let sol = heavy_solution(10);
        for state in [0, 3, 7] {
            let grid = rasterize(&sol, state, 24, GridKind::Wavefunction).unwrap();
            for i in 0..24 {
                for j in 0..24 {
                    assert_abs_diff_eq!(
                        grid.values()[[i, j]],
                        -grid.values()[[j, i]],
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn riemann_sum_close_to_unit_before_normalization() {
        let sol = heavy_solution(12);
        let raster = Rasterizer::new(12, 64).unwrap();
        for state in [0, 5, 12] {
            let grid = raster.evaluate(&sol, state, GridKind::Density).unwrap();
            assert_abs_diff_eq!(grid.norm_sum(), 1.0, epsilon = 1e-2);
        }
        // and exact after normalization
        let grid = raster.state(&sol, 3, GridKind::Density).unwrap();
        assert_abs_diff_eq!(grid.norm_sum(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rasterize_linear_in_coefficients() {
        // psi kind: evaluating a coefficient sum equals the sum of evaluations
        let mut sol = heavy_solution(10);
        let raster = Rasterizer::new(10, 12).unwrap();
        let g0 = raster.evaluate(&sol, 0, GridKind::Wavefunction).unwrap();
        let g1 = raster.evaluate(&sol, 1, GridKind::Wavefunction).unwrap();
        // overwrite state 2's coefficients with 0.6 * c0 + 0.8 * c1
        let c = sol.coefficients.as_mut().unwrap();
        let mix = (&c.row(0) * 0.6) + (&c.row(1) * 0.8);
        c.row_mut(2).assign(&mix);
        let gm = raster.evaluate(&sol, 2, GridKind::Wavefunction).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                assert_abs_diff_eq!(
                    gm.values()[[i, j]],
                    0.6 * g0.values()[[i, j]] + 0.8 * g1.values()[[i, j]],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn missing_coefficients_rejected() {
        let mut sol = heavy_solution(8);
        sol.coefficients = None;
        assert!(matches!(
            rasterize(&sol, 0, 16, GridKind::Density),
            Err(Error::MissingCoefficients)
        ));
    }

    #[test]
    fn bosonic_grid_is_symmetric_and_normalized() {
        for (k1, k2) in [(1, 1), (1, 2), (3, 5)] {
            let grid = bosonic_state(k1, k2, 33).unwrap();
            for i in 0..33 {
                for j in 0..33 {
                    assert_abs_diff_eq!(
                        grid.values()[[i, j]],
                        grid.values()[[j, i]],
                        epsilon = 1e-14
                    );
                }
            }
            // analytic normalization: Riemann sum near one
            assert_abs_diff_eq!(grid.norm_sum(), 1.0, epsilon = 1e-2);
        }
    }

    #[test]
    fn bosonic_center_value() {
        // center of the (1,1) state: both terms contribute, (N/L) * 2
        let grid = bosonic_state(1, 1, 33).unwrap();
        // resolution 33 has a pixel centered exactly at (pi/2, pi/2)
        let center = grid.values()[[16, 16]];
        assert_abs_diff_eq!(center, 2.0 / PI, epsilon = 1e-12);
    }

    #[test]
    fn bosonic_normal_derivative_vanishes_across_diagonal() {
        // one-sided finite difference along the diagonal normal, evaluated at
        // diagonal pixels; vanishes like O(1/R) as the resolution grows
        let normal_derivative = |r: usize| -> f64 {
            let grid = bosonic_state(2, 4, r).unwrap();
            let h = PI / r as f64 * std::f64::consts::SQRT_2;
            let mut worst: f64 = 0.0;
            for i in 1..r - 1 {
                let d = (grid.values()[[i - 1, i + 1]] - grid.values()[[i, i]]) / h;
                worst = worst.max(d.abs());
            }
            worst
        };
        let coarse = normal_derivative(64);
        let fine = normal_derivative(256);
        assert!(fine < coarse / 2.0, "no O(1/R) decay: {coarse} -> {fine}");
        assert!(fine < 0.2, "normal derivative too large: {fine}");
    }

    #[test]
    fn bosonic_rejects_bad_pairs() {
        assert!(bosonic_state(0, 1, 16).is_err());
        assert!(bosonic_state(3, 2, 16).is_err());
    }

    #[test]
    fn bosonic_order_by_energy() {
        let pairs = bosonic_pairs_by_energy(30);
        assert_eq!(pairs[0], (1, 1));
        assert_eq!(pairs[1], (1, 2));
        let mut prev = 0;
        for &(k1, k2) in &pairs {
            let e = k1 * k1 + k2 * k2;
            assert!(e >= prev);
            prev = e;
        }
        // growing the request keeps the prefix
        let more = bosonic_pairs_by_energy(60);
        assert_eq!(&more[..30], &pairs[..]);
    }
}
