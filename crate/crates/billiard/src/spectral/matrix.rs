//! Hamiltonian matrix elements over the antisymmetrized sine-product basis.

use super::{BasisIndex, BasisSet, MassRatio};
use crate::error::{Error, Result};
use ndarray::Array2;
use std::f64::consts::PI;

/// The elementary interaction integral
/// `I(s,t) = [(-1)^s - 1][(-1)^t - 1] / (s t)` for `s, t != 0`, else `0`.
///
/// Nonzero only when both arguments are odd, where it equals `4/(s t)`.
pub fn interaction_integral(s: i64, t: i64) -> f64 {
    if s == 0 || t == 0 {
        return 0.0;
    }
    let ps = if s % 2 == 0 { 0.0 } else { -2.0 };
    let pt = if t % 2 == 0 { 0.0 } else { -2.0 };
    ps * pt / ((s * t) as f64)
}

/// One matrix element of the relative-motion Hamiltonian in units `L = pi`.
///
/// The kinetic part is diagonal on the ordered-pair basis,
/// `(n1^2 + n2^2)/2 * (1 + 1/kappa)`. The mass-coupling part is the matrix
/// element of the mixed derivative `-(1/kappa) d^2/dz1 dz2`, expanded as an
/// eight-term combination of [`interaction_integral`] that pairs all four
/// sign choices of `(m1 +- n2, m2 +- n1)` against all four of
/// `(m1 +- n1, m2 +- n2)`.
pub fn matrix_element(row: &BasisIndex, col: &BasisIndex, mass: MassRatio) -> Result<f64> {
    if row.cutoff() != col.cutoff() {
        return Err(Error::CutoffMismatch {
            left: row.cutoff(),
            right: col.cutoff(),
        });
    }
    let (m1, m2) = (row.n1() as i64, row.n2() as i64);
    let (n1, n2) = (col.n1() as i64, col.n2() as i64);
    let inv_kappa = mass.inv_kappa();

    let mut elem = 0.0;
    if m1 == n1 && m2 == n2 {
        elem += 0.5 * ((n1 * n1 + n2 * n2) as f64) * (1.0 + inv_kappa);
    }
    if m1 == n2 && m2 == n1 {
        // never reached under strict ordering; kept for the unordered form
        elem -= 0.5 * ((n1 * n1 + n2 * n2) as f64) * (1.0 + inv_kappa);
    }

    if inv_kappa != 0.0 {
        let bracket = interaction_integral(m1 + n2, m2 + n1)
            + interaction_integral(m1 + n2, m2 - n1)
            + interaction_integral(m1 - n2, m2 + n1)
            + interaction_integral(m1 - n2, m2 - n1)
            - interaction_integral(m1 + n1, m2 + n2)
            - interaction_integral(m1 + n1, m2 - n2)
            - interaction_integral(m1 - n1, m2 + n2)
            - interaction_integral(m1 - n1, m2 - n2);
        elem += ((n1 * n2) as f64) * inv_kappa / (PI * PI) * bracket;
    }
    Ok(elem)
}

/// Assembles the dense symmetric Hamiltonian over `basis`.
fn assemble_over(basis: &BasisSet, mass: MassRatio) -> Array2<f64> {
    let dim = basis.len();
    let mut h = Array2::<f64>::zeros((dim, dim));
    for i in 0..dim {
        let row = basis.index(i);
        for j in i..dim {
            let col = basis.index(j);
            // same cutoff by construction
            let v = matrix_element(&row, &col, mass).expect("basis indices share a cutoff");
            h[[i, j]] = v;
            h[[j, i]] = v;
        }
    }
    h
}

/// Assembles the Hamiltonian at cutoff `c`, optionally restricted to one
/// mirror-parity block (fixed parity of `n1 + n2`).
///
/// The unrestricted dimension is `(c-1)(c-2)/2`.
pub fn assemble_hamiltonian(c: u32, mass: MassRatio, parity_block: Option<i8>) -> Result<Array2<f64>> {
    let basis = BasisSet::new(c, parity_block)?;
    Ok(assemble_over(&basis, mass))
}
