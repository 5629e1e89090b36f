//! Diagonalization paths: per-block dense eigensolve with merge, the exact
//! diagonal route for the infinitely heavy impurity, and parity bookkeeping.

use super::{assemble_hamiltonian, lapack, BasisSet, EigenSolution, MassRatio};
use crate::error::{Error, Result};
use ndarray::Array2;

/// Tolerance below which a state's support outside its parity block is
/// treated as block leakage.
const PARITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Compute eigenvectors (basis coefficients) as well as energies.
    pub vectors: bool,
    /// Keep only the lowest `max_states` states after the merge.
    pub max_states: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            vectors: true,
            max_states: None,
        }
    }
}

/// Position of the pair `(n1, n2)`, `n1 > n2`, in the unrestricted gap-free
/// enumeration at cutoff `c`.
fn full_rank(n1: u32, n2: u32, c: u32) -> usize {
    let (n1, n2, c) = (n1 as usize, n2 as usize, c as usize);
    (n2 - 1) * (c - 1) - (n2 - 1) * n2 / 2 + (n1 - n2 - 1)
}

/// Mirror parity of a normalized coefficient vector over the unrestricted
/// basis enumeration at cutoff `c`.
///
/// Returns `+1` (`-1`) when the squared weight on even-`n1+n2` (odd) basis
/// functions exceeds `1 - 1e-8`; mixed support is an error, signalling block
/// leakage.
pub fn parity_of_state(coefficients: &[f64], c: u32) -> Result<i8> {
    let basis = BasisSet::new(c, None)?;
    if coefficients.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: coefficients.len(),
        });
    }
    let mut even_weight = 0.0;
    let mut total = 0.0;
    for (i, &(n1, n2)) in basis.pairs().iter().enumerate() {
        let w = coefficients[i] * coefficients[i];
        total += w;
        if (n1 + n2) % 2 == 0 {
            even_weight += w;
        }
    }
    if total == 0.0 {
        return Err(Error::InvalidInput("zero coefficient vector".into()));
    }
    let frac = even_weight / total;
    if frac > 1.0 - PARITY_TOLERANCE {
        Ok(1)
    } else if frac < PARITY_TOLERANCE {
        Ok(-1)
    } else {
        Err(Error::MixedParity { even_weight: frac })
    }
}

/// Flips eigenvector rows so the largest-magnitude component (first on ties)
/// is positive. Removes the overall sign ambiguity of the eigensolver.
fn canonicalize_sign(row: &mut [f64]) {
    let mut best = 0usize;
    let mut best_abs = 0.0f64;
    for (i, &v) in row.iter().enumerate() {
        let a = v.abs();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if row[best] < 0.0 {
        for v in row.iter_mut() {
            *v = -*v;
        }
    }
}

/// Dense-path diagonalization of an assembled Hamiltonian.
///
/// `sector` names the basis the matrix was assembled over (`None` for the
/// unrestricted basis). Energies come out ascending with orthonormal
/// eigenvectors; per-state parities are attached from the coefficient
/// support, or are constant over a single-block assembly.
pub fn diagonalize(
    h: &Array2<f64>,
    mass: MassRatio,
    cutoff: u32,
    sector: Option<i8>,
) -> Result<EigenSolution> {
    let basis = BasisSet::new(cutoff, sector)?;
    let dim = basis.len();
    if h.dim() != (dim, dim) {
        return Err(Error::ShapeMismatch(format!(
            "Hamiltonian is {:?} but the basis at c={} has dimension {}",
            h.dim(),
            cutoff,
            dim
        )));
    }
    let mut buf = h.to_owned().into_raw_vec_and_offset().0;
    let energies = lapack::eigh_inplace(dim, &mut buf, true)?;

    let full = BasisSet::new(cutoff, None)?;
    let full_dim = full.len();
    let mut coefficients = Array2::<f64>::zeros((dim, full_dim));
    let mut parities = Vec::with_capacity(dim);
    for s in 0..dim {
        let row = &mut buf[s * dim..(s + 1) * dim];
        canonicalize_sign(row);
        let mut out = coefficients.row_mut(s);
        for (i, &(n1, n2)) in basis.pairs().iter().enumerate() {
            out[full_rank(n1, n2, cutoff)] = row[i];
        }
    }
    for s in 0..dim {
        let p = match sector {
            Some(p) => p,
            None => parity_of_state(coefficients.row(s).as_slice().unwrap(), cutoff)?,
        };
        parities.push(p);
    }
    Ok(EigenSolution {
        mass,
        cutoff,
        parity_sector: sector.unwrap_or(0),
        energies,
        parities,
        coefficients: Some(coefficients),
    })
}

struct Block {
    parity: i8,
    energies: Vec<f64>,
    /// eigenvector rows over the block basis; empty when vectors were not requested
    rows: Vec<f64>,
    basis: BasisSet,
}

fn solve_block(c: u32, mass: MassRatio, parity: i8, vectors: bool) -> Result<Block> {
    let basis = BasisSet::new(c, Some(parity))?;
    let dim = basis.len();
    let mut buf = assemble_hamiltonian(c, mass, Some(parity))?
        .into_raw_vec_and_offset()
        .0;
    let energies = lapack::eigh_inplace(dim, &mut buf, vectors)?;
    if !vectors {
        buf.clear();
    }
    Ok(Block {
        parity,
        energies,
        rows: buf,
        basis,
    })
}

/// Exact route for the infinitely heavy impurity, where the Hamiltonian is
/// diagonal: energies are `(n1^2 + n2^2)/2` and eigenvectors are unit basis
/// vectors.
fn solve_block_diagonal(c: u32, parity: i8) -> Result<Block> {
    let basis = BasisSet::new(c, Some(parity))?;
    let dim = basis.len();
    let mut order: Vec<usize> = (0..dim).collect();
    let energy_of = |i: usize| {
        let (n1, n2) = basis.pair(i);
        ((n1 * n1 + n2 * n2) as f64) / 2.0
    };
    order.sort_by(|&a, &b| {
        energy_of(a)
            .total_cmp(&energy_of(b))
            .then(a.cmp(&b))
    });
    let energies: Vec<f64> = order.iter().map(|&i| energy_of(i)).collect();
    let mut rows = vec![0.0f64; dim * dim];
    for (s, &i) in order.iter().enumerate() {
        rows[s * dim + i] = 1.0;
    }
    Ok(Block {
        parity,
        energies,
        rows,
        basis,
    })
}

/// Production path: solves the two mirror-parity blocks separately, merges
/// and re-sorts by energy. Sort ties break by parity (`+1` first) then by
/// block-internal index.
pub fn solve_merged(c: u32, mass: MassRatio, opts: SolveOptions) -> Result<EigenSolution> {
    let diagonal = mass.inv_kappa() == 0.0;
    let blocks: Vec<Block> = [1i8, -1i8]
        .iter()
        .map(|&p| {
            if diagonal {
                solve_block_diagonal(c, p)
            } else {
                solve_block(c, mass, p, opts.vectors)
            }
        })
        .collect::<Result<_>>()?;

    // merge order: (energy, +1 before -1, block-internal index)
    let mut order: Vec<(usize, usize)> = Vec::new(); // (block, state)
    for (b, blk) in blocks.iter().enumerate() {
        for s in 0..blk.energies.len() {
            order.push((b, s));
        }
    }
    order.sort_by(|&(ba, sa), &(bb, sb)| {
        blocks[ba].energies[sa]
            .total_cmp(&blocks[bb].energies[sb])
            .then(blocks[bb].parity.cmp(&blocks[ba].parity))
            .then(sa.cmp(&sb))
    });
    let keep = opts.max_states.unwrap_or(order.len()).min(order.len());
    order.truncate(keep);

    let energies: Vec<f64> = order
        .iter()
        .map(|&(b, s)| blocks[b].energies[s])
        .collect();
    let parities: Vec<i8> = order.iter().map(|&(b, _)| blocks[b].parity).collect();

    let coefficients = if opts.vectors || diagonal {
        let full_dim = {
            let c = c as usize;
            (c - 1) * (c - 2) / 2
        };
        let mut m = Array2::<f64>::zeros((keep, full_dim));
        for (out, &(b, s)) in order.iter().enumerate() {
            let blk = &blocks[b];
            let dim = blk.basis.len();
            let row = &blk.rows[s * dim..(s + 1) * dim];
            let mut target = m.row_mut(out);
            for (i, &(n1, n2)) in blk.basis.pairs().iter().enumerate() {
                target[full_rank(n1, n2, c)] = row[i];
            }
            canonicalize_sign(target.as_slice_mut().unwrap());
        }
        if opts.vectors {
            Some(m)
        } else {
            None
        }
    } else {
        None
    };

    Ok(EigenSolution {
        mass,
        cutoff: c,
        parity_sector: 0,
        energies,
        parities,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn full_rank_is_the_enumeration_order() {
        let basis = BasisSet::new(17, None).unwrap();
        for (i, &(n1, n2)) in basis.pairs().iter().enumerate() {
            assert_eq!(full_rank(n1, n2, 17), i);
        }
    }

    #[test]
    fn heavy_impurity_energies_are_exact() {
        let sol = solve_merged(20, MassRatio::infinite_impurity(), SolveOptions::default()).unwrap();
        let basis = BasisSet::new(20, None).unwrap();
        let mut expect: Vec<f64> = basis
            .pairs()
            .iter()
            .map(|&(n1, n2)| ((n1 * n1 + n2 * n2) as f64) / 2.0)
            .collect();
        expect.sort_by(f64::total_cmp);
        assert_eq!(sol.energies.len(), 171);
        for (a, b) in sol.energies.iter().zip(&expect) {
            assert_eq!(a, b);
        }
        // unit basis vectors on the diagonal route
        let coeff = sol.coefficients.as_ref().unwrap();
        for row in coeff.rows() {
            let nonzero: Vec<f64> = row.iter().copied().filter(|v| *v != 0.0).collect();
            assert_eq!(nonzero, vec![1.0]);
        }
    }

    #[test]
    fn lapack_route_matches_diagonal_route_energies() {
        let mass = MassRatio::infinite_impurity();
        let h = assemble_hamiltonian(14, mass, None).unwrap();
        let sol = diagonalize(&h, mass, 14, None).unwrap();
        let exact = solve_merged(14, mass, SolveOptions::default()).unwrap();
        for (a, b) in sol.energies.iter().zip(&exact.energies) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn block_and_full_diagonalization_agree() {
        // the unrestricted eigensolver may rotate near-degenerate
        // cross-parity pairs, so compare spectra only
        let mass = MassRatio::from_kappa(3.0).unwrap();
        let c = 20;
        let h = assemble_hamiltonian(c, mass, None).unwrap();
        let dim = h.dim().0;
        let mut buf = h.into_raw_vec_and_offset().0;
        let full = super::lapack::eigh_inplace(dim, &mut buf, false).unwrap();
        let merged = solve_merged(c, mass, SolveOptions { vectors: false, max_states: None }).unwrap();
        assert_eq!(full.len(), merged.energies.len());
        for (a, b) in full.iter().zip(&merged.energies) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn unrestricted_diagonalize_flags_block_leakage() {
        // near-degenerate cross-parity pairs make the unrestricted route
        // error out rather than return silently mixed states
        let mass = MassRatio::from_kappa(3.0).unwrap();
        let h = assemble_hamiltonian(20, mass, None).unwrap();
        match diagonalize(&h, mass, 20, None) {
            Ok(sol) => {
                // if the solver happened to keep blocks pure, labels must match
                let coeff = sol.coefficients.as_ref().unwrap();
                for s in 0..sol.num_states() {
                    let p = parity_of_state(coeff.row(s).as_slice().unwrap(), 20).unwrap();
                    assert_eq!(p, sol.parities[s]);
                }
            }
            Err(Error::MixedParity { .. }) => {}
            Err(e) => panic!("unexpected error: {e}"),
        }
    }

    #[test]
    fn merged_parities_match_full_assembly_parities() {
        let mass = MassRatio::from_kappa(2.0).unwrap();
        let merged = solve_merged(16, mass, SolveOptions::default()).unwrap();
        let coeff = merged.coefficients.as_ref().unwrap();
        for s in 0..merged.num_states() {
            let p = parity_of_state(coeff.row(s).as_slice().unwrap(), 16).unwrap();
            assert_eq!(p, merged.parities[s]);
        }
    }

    #[test]
    fn pure_basis_state_parities() {
        // coefficients of a pure (2,1) state: odd parity
        let basis = BasisSet::new(12, None).unwrap();
        let mut v = vec![0.0; basis.len()];
        v[full_rank(2, 1, 12)] = 1.0;
        assert_eq!(parity_of_state(&v, 12).unwrap(), -1);
        let mut w = vec![0.0; basis.len()];
        w[full_rank(3, 1, 12)] = 1.0;
        assert_eq!(parity_of_state(&w, 12).unwrap(), 1);
    }

    #[test]
    fn mixed_parity_detected() {
        let basis = BasisSet::new(12, None).unwrap();
        let mut v = vec![0.0; basis.len()];
        v[full_rank(2, 1, 12)] = std::f64::consts::FRAC_1_SQRT_2;
        v[full_rank(3, 1, 12)] = std::f64::consts::FRAC_1_SQRT_2;
        assert!(matches!(
            parity_of_state(&v, 12),
            Err(Error::MixedParity { .. })
        ));
    }

    #[test]
    fn mirror_reflection_matches_parity_label() {
        // evaluate a pure basis state on a small grid and check
        // psi(pi - z1, pi - z2) = parity * psi(z1, z2)
        for (n1, n2) in [(2u32, 1u32), (3, 1), (4, 2), (5, 2)] {
            let parity: f64 = if (n1 + n2) % 2 == 0 { 1.0 } else { -1.0 };
            let psi = |z1: f64, z2: f64| {
                let (a, b) = (n1 as f64, n2 as f64);
                (a * z1).sin() * (b * z2).sin() - (b * z1).sin() * (a * z2).sin()
            };
            for i in 0..7 {
                for j in 0..7 {
                    let z1 = (i as f64 + 0.31) * std::f64::consts::PI / 7.5;
                    let z2 = (j as f64 + 0.77) * std::f64::consts::PI / 7.5;
                    let lhs = psi(std::f64::consts::PI - z1, std::f64::consts::PI - z2);
                    assert_abs_diff_eq!(lhs, parity * psi(z1, z2), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn max_states_truncates() {
        let mass = MassRatio::from_kappa(2.0).unwrap();
        let opts = SolveOptions {
            vectors: true,
            max_states: Some(10),
        };
        let sol = solve_merged(16, mass, opts).unwrap();
        assert_eq!(sol.num_states(), 10);
        assert_eq!(sol.coefficients.as_ref().unwrap().dim().0, 10);
    }

    #[test]
    fn variational_monotonicity_in_cutoff() {
        let mass = MassRatio::from_kappa(2.0).unwrap();
        let lo = solve_merged(12, mass, SolveOptions { vectors: false, max_states: None }).unwrap();
        let hi = solve_merged(18, mass, SolveOptions { vectors: false, max_states: None }).unwrap();
        for k in 0..20 {
            assert!(
                hi.energies[k] <= lo.energies[k] + 1e-12,
                "level {k}: {} > {}",
                hi.energies[k],
                lo.energies[k]
            );
        }
    }
}
