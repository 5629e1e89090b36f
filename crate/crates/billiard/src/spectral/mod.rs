//! Spectral core: truncated-basis Hamiltonian of the relative motion of two
//! identical fermions and one impurity on a ring, its exact diagonalization,
//! and the equal-mass closed-form benchmark.
//!
//! The relative-motion Hamiltonian at total momentum zero acts on the square
//! `[0, L]^2` with Dirichlet walls and is expanded in the antisymmetrized
//! sine-product basis
//!
//! ```text
//! xi_{n1,n2}(z1, z2) = N [ sin(n1 z1) sin(n2 z2) - sin(n2 z1) sin(n1 z2) ],
//! ```
//!
//! with `0 < n2 < n1 < c` and `N = sqrt(2)/L`. We work in units `hbar = m = 1`
//! and `L = pi` throughout.

mod bethe;
pub mod file;
mod geometry;
mod index;
pub mod lapack;
mod matrix;
mod solve;

pub use bethe::{bethe_energies, benchmark_accuracy, BenchmarkReport, BetheLevel, BetheSpectrum};
pub use file::{read_spectrum, write_spectrum};
pub use geometry::{triangle_geometry, weyl_density, TriangleAngles};
pub use index::{inverse_index, linear_index};
pub use matrix::{assemble_hamiltonian, interaction_integral, matrix_element};
pub use solve::{diagonalize, parity_of_state, solve_merged, SolveOptions};

use crate::error::{Error, Result};
use ndarray::Array2;

/// Impurity-to-fermion mass ratio, stored as `1/kappa` so the infinitely
/// heavy impurity is exactly representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassRatio {
    inv_kappa: f64,
}

impl MassRatio {
    /// Builds from `1/kappa`; must lie in `[0, 1]` (impurity at least as
    /// heavy as a fermion).
    pub fn from_inv_kappa(inv_kappa: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&inv_kappa) || !inv_kappa.is_finite() {
            return Err(Error::InvalidInput(format!(
                "1/kappa must lie in [0, 1], got {inv_kappa}"
            )));
        }
        Ok(Self { inv_kappa })
    }

    /// Builds from `kappa >= 1`.
    pub fn from_kappa(kappa: f64) -> Result<Self> {
        if !(kappa >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "kappa must be >= 1, got {kappa}"
            )));
        }
        Self::from_inv_kappa(1.0 / kappa)
    }

    /// The infinitely heavy impurity, `1/kappa = 0`.
    pub fn infinite_impurity() -> Self {
        Self { inv_kappa: 0.0 }
    }

    /// Equal masses, `kappa = 1`.
    pub fn equal_mass() -> Self {
        Self { inv_kappa: 1.0 }
    }

    pub fn inv_kappa(&self) -> f64 {
        self.inv_kappa
    }

    /// `kappa` itself; infinite for the heavy-impurity limit.
    pub fn kappa(&self) -> f64 {
        if self.inv_kappa == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.inv_kappa
        }
    }

    /// The system is solvable in closed form exactly at the two endpoints.
    pub fn is_integrable(&self) -> bool {
        self.inv_kappa == 0.0 || self.inv_kappa == 1.0
    }
}

/// One antisymmetrized basis function, identified by the ordered pair
/// `0 < n2 < n1 < cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisIndex {
    n1: u32,
    n2: u32,
    cutoff: u32,
}

impl BasisIndex {
    pub fn new(n1: u32, n2: u32, cutoff: u32) -> Result<Self> {
        if !(0 < n2 && n2 < n1 && n1 < cutoff) {
            return Err(Error::InvalidInput(format!(
                "basis pair must satisfy 0 < n2 < n1 < cutoff, got n1={n1}, n2={n2}, c={cutoff}"
            )));
        }
        Ok(Self { n1, n2, cutoff })
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// Mirror parity of the basis function: `+1` for even `n1 + n2`,
    /// `-1` for odd.
    pub fn parity(&self) -> i8 {
        if (self.n1 + self.n2) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Gap-free, lexicographic enumeration of the ordered-pair basis at a given
/// cutoff, optionally restricted to one mirror-parity block.
///
/// Pairs are listed by increasing smaller member, then increasing larger
/// member: `(2,1), (3,1), ..., (c-1,1), (3,2), ...` written as `(n1, n2)`
/// with `n1 > n2`.
#[derive(Debug, Clone)]
pub struct BasisSet {
    cutoff: u32,
    parity: Option<i8>,
    pairs: Vec<(u32, u32)>,
}

impl BasisSet {
    pub fn new(cutoff: u32, parity: Option<i8>) -> Result<Self> {
        if cutoff < 3 {
            return Err(Error::InvalidInput(format!(
                "cutoff must be >= 3, got {cutoff}"
            )));
        }
        if let Some(p) = parity {
            if p != 1 && p != -1 {
                return Err(Error::InvalidInput(format!("parity must be +-1, got {p}")));
            }
        }
        let mut pairs = Vec::new();
        for n2 in 1..cutoff {
            for n1 in (n2 + 1)..cutoff {
                if let Some(p) = parity {
                    let pair_parity = if (n1 + n2) % 2 == 0 { 1 } else { -1 };
                    if pair_parity != p {
                        continue;
                    }
                }
                pairs.push((n1, n2));
            }
        }
        Ok(Self {
            cutoff,
            parity,
            pairs,
        })
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn parity(&self) -> Option<i8> {
        self.parity
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The `(n1, n2)` pair at a basis position, `n1 > n2`.
    pub fn pair(&self, i: usize) -> (u32, u32) {
        self.pairs[i]
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn index(&self, i: usize) -> BasisIndex {
        let (n1, n2) = self.pairs[i];
        BasisIndex {
            n1,
            n2,
            cutoff: self.cutoff,
        }
    }
}

/// Result of one diagonalization: sorted energies, optional eigenvector
/// coefficients over the unrestricted basis enumeration, and per-state
/// mirror parities.
///
/// `parity_sector` is `0` for a merged solution and `+-1` when the solution
/// was restricted to one block.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub mass: MassRatio,
    pub cutoff: u32,
    pub parity_sector: i8,
    pub energies: Vec<f64>,
    pub parities: Vec<i8>,
    /// `[num_states x basis_dim]`, rows unit-norm, over the unrestricted
    /// `BasisSet::new(cutoff, None)` enumeration.
    pub coefficients: Option<Array2<f64>>,
}

impl EigenSolution {
    pub fn num_states(&self) -> usize {
        self.energies.len()
    }

    pub fn basis_dim(&self) -> usize {
        let c = self.cutoff as usize;
        (c - 1) * (c - 2) / 2
    }

    /// Energies of one parity sector, in ascending order.
    pub fn sector_energies(&self, parity: i8) -> Vec<f64> {
        self.energies
            .iter()
            .zip(&self.parities)
            .filter(|(_, &p)| p == parity)
            .map(|(&e, _)| e)
            .collect()
    }

    /// Drops all states past `keep`, and their coefficients.
    pub fn truncate(&mut self, keep: usize) {
        if keep >= self.num_states() {
            return;
        }
        self.energies.truncate(keep);
        self.parities.truncate(keep);
        if let Some(c) = self.coefficients.take() {
            self.coefficients = Some(c.slice_move(ndarray::s![..keep, ..]));
        }
    }
}
