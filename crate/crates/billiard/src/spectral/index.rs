//! Closed-form pair index utilities.
//!
//! These map an ordered pair `(n_a, n_b)` with `0 < n_a < n_b < c` to a single
//! integer and back. The forward map is
//!
//! ```text
//! n = n_b - n_a + c (n_a - 1) - (n_a - 1) n_a / 2 ,
//! ```
//!
//! which is injective but leaves gaps between runs of consecutive `n_a` (for
//! example `n = c - 1` is never produced). The internal matrix enumeration in
//! [`super::BasisSet`] is therefore a separate, gap-free ranking; the
//! functions here are kept as documented, round-trip-tested utilities.
//!
//! The first argument of the closed forms is the *smaller* pair member: the
//! inverse map sends `n = 1` to `(1, 2)`.

use crate::error::{Error, Result};

/// Maps the ordered pair `(n_a, n_b)`, `0 < n_a < n_b < c`, to its index.
pub fn linear_index(n_a: u32, n_b: u32, c: u32) -> Result<u32> {
    if c < 3 {
        return Err(Error::InvalidInput(format!("cutoff must be >= 3, got {c}")));
    }
    if !(0 < n_a && n_a < n_b && n_b < c) {
        return Err(Error::InvalidInput(format!(
            "pair must satisfy 0 < n_a < n_b < c, got ({n_a}, {n_b}) at c={c}"
        )));
    }
    let (na, nb, c) = (n_a as i64, n_b as i64, c as i64);
    let n = nb - na + c * (na - 1) - (na - 1) * na / 2;
    Ok(n as u32)
}

/// Recovers `(n_a, n_b)` from an index produced by [`linear_index`].
///
/// Rejects integers outside the image of the forward map (the index range
/// has gaps).
pub fn inverse_index(n: u32, c: u32) -> Result<(u32, u32)> {
    if c < 3 {
        return Err(Error::InvalidInput(format!("cutoff must be >= 3, got {c}")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("index must be positive".into()));
    }
    let (nf, cf) = (n as f64, c as f64);
    let disc = cf * cf - cf - 2.0 * nf + 2.25;
    if disc < 0.0 {
        return Err(Error::InvalidInput(format!(
            "index {n} is out of range for cutoff {c}"
        )));
    }
    // Exactly integral at the start of each n_a run (disc is then an exact
    // half-odd-integer square), strictly between integers inside a run.
    let n_a = ((1.0 + 2.0 * cf) / 2.0 - disc.sqrt()).floor() as i64;
    if n_a < 1 {
        return Err(Error::InvalidInput(format!(
            "index {n} is out of range for cutoff {c}"
        )));
    }
    let n_b = n as i64 + n_a - c as i64 * (n_a - 1) + (n_a - 1) * n_a / 2;
    let (n_a, n_b) = (n_a as u32, n_b.max(0) as u32);
    // Validate by round-trip: catches the gaps in the index range.
    match linear_index(n_a, n_b, c) {
        Ok(m) if m == n => Ok((n_a, n_b)),
        _ => Err(Error::InvalidInput(format!(
            "index {n} is not in the image of the pair index at cutoff {c}"
        ))),
    }
}
