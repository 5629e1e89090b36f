//! Closed-form spectrum of the equal-mass system and the accuracy benchmark
//! against it.
//!
//! At `kappa = 1` the system fermionizes: each zero-total-momentum level is a
//! set of three single-particle ring momenta `k_i = 2 (n_i + s/3)` (ring
//! length `pi`), in one of three branches,
//!
//! ```text
//! E = 1/2 sum_i k_i^2 = 2 sum_i (n_i + s/3)^2 ,  sum_i n_i = -s ,  s in {0, 1, 2},
//! ```
//!
//! with pairwise-distinct integers `n_i` within a triple. Distinctness is the
//! admissibility rule that reproduces the diagonalized spectrum level by
//! level (triples with repeated entries correspond to vanishing
//! antisymmetrized states); the `s = 1` and `s = 2` branches mirror each
//! other and produce the characteristic doublets of the equal-mass spectrum.
//! The ground level is `k = (-2, 0, 2)`, energy `4`.

use super::{EigenSolution, MassRatio};
use crate::error::{Error, Result};

/// One closed-form level: its energy, branch (`s` such that `sum n_i = -s`),
/// and the canonical (ascending) integer triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetheLevel {
    pub energy: f64,
    pub branch: u8,
    pub triple: [i64; 3],
}

impl BetheLevel {
    /// Recomputes the branch formula from the stored triple.
    pub fn energy_from_triple(&self) -> f64 {
        let shift = self.branch as f64 / 3.0;
        2.0 * self
            .triple
            .iter()
            .map(|&n| {
                let q = n as f64 + shift;
                q * q
            })
            .sum::<f64>()
    }
}

/// Ascending closed-form levels with branch labels.
#[derive(Debug, Clone)]
pub struct BetheSpectrum {
    pub levels: Vec<BetheLevel>,
}

impl BetheSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

fn enumerate_below(cap: f64) -> Vec<BetheLevel> {
    let radius = cap.sqrt().ceil() as i64 + 1;
    let mut levels = Vec::new();
    for branch in 0u8..3 {
        let shift = branch as f64 / 3.0;
        let total = -(branch as i64);
        for n1 in -radius..=radius {
            for n2 in (n1 + 1)..=radius {
                let n3 = total - n1 - n2;
                if n3 <= n2 {
                    continue; // canonical ascending order, distinct entries
                }
                let q1 = n1 as f64 + shift;
                let q2 = n2 as f64 + shift;
                let q3 = n3 as f64 + shift;
                let energy = 2.0 * (q1 * q1 + q2 * q2 + q3 * q3);
                if energy <= cap {
                    levels.push(BetheLevel {
                        energy,
                        branch,
                        triple: [n1, n2, n3],
                    });
                }
            }
        }
    }
    levels.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then(a.branch.cmp(&b.branch))
            .then(a.triple.cmp(&b.triple))
    });
    levels
}

/// The lowest `count` closed-form levels (with multiplicity).
pub fn bethe_energies(count: usize) -> Result<BetheSpectrum> {
    if count == 0 {
        return Err(Error::InvalidInput("level count must be >= 1".into()));
    }
    // The merged density of states is about 0.23 levels per unit energy;
    // start above that estimate and grow until the window is provably
    // complete for `count` levels.
    let mut cap = (count as f64 / 0.2 + 40.0).max(60.0);
    for _ in 0..20 {
        let levels = enumerate_below(cap);
        if levels.len() >= count {
            let mut levels = levels;
            levels.truncate(count);
            return Ok(BetheSpectrum { levels });
        }
        cap *= 2.0;
    }
    Err(Error::SearchExhausted)
}

/// Per-level accuracy of a diagonalized equal-mass solution against the
/// closed-form spectrum.
#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    /// `|E_exact - E(c)| / E_exact` per level.
    pub epsilon: Vec<f64>,
    pub count_below_1e4: usize,
    pub count_below_1e3: usize,
}

/// Compares a `kappa = 1` solution level-by-level with the closed-form
/// spectrum. `bethe` must cover at least as many levels as the solution.
pub fn benchmark_accuracy(eig: &EigenSolution, bethe: &BetheSpectrum) -> Result<BenchmarkReport> {
    if eig.mass != MassRatio::equal_mass() {
        return Err(Error::InvalidInput(
            "the closed-form benchmark applies to the equal-mass system only".into(),
        ));
    }
    if bethe.len() < eig.num_states() {
        return Err(Error::LengthMismatch {
            expected: eig.num_states(),
            got: bethe.len(),
        });
    }
    let epsilon: Vec<f64> = eig
        .energies
        .iter()
        .zip(&bethe.levels)
        .map(|(&e, l)| ((l.energy - e) / l.energy).abs())
        .collect();
    let count_below_1e4 = epsilon.iter().filter(|&&e| e < 1e-4).count();
    let count_below_1e3 = epsilon.iter().filter(|&&e| e < 1e-3).count();
    Ok(BenchmarkReport {
        epsilon,
        count_below_1e4,
        count_below_1e3,
    })
}
