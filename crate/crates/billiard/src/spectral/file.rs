//! Spectrum files (`QBS1`, little-endian).
//!
//! Layout: magic `QBS1`; header `{version u32, inv_kappa f64, cutoff u32,
//! parity i8 (0 = merged), num_states u32, basis_dim u32, flags u32 (bit 0:
//! coefficients present)}`; payload `energies f64[num_states]`,
//! `parities i8[num_states]`, then optionally row-major
//! `coefficients f64[num_states][basis_dim]`.

use super::{EigenSolution, MassRatio};
use crate::binio::{atomic_write, expect_magic, open_reader, short_file};
use crate::error::{Error, Result};
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::Array2;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"QBS1";
const VERSION: u32 = 1;
const FLAG_COEFFICIENTS: u32 = 1;

/// Writes a spectrum file; coefficients are stored only when present and
/// requested.
pub fn write_spectrum(path: &Path, sol: &EigenSolution, include_coefficients: bool) -> Result<()> {
    let coeffs = if include_coefficients {
        match &sol.coefficients {
            Some(c) => Some(c),
            None => return Err(Error::MissingCoefficients),
        }
    } else {
        None
    };
    let basis_dim = sol.basis_dim();
    if let Some(c) = coeffs {
        if c.dim() != (sol.num_states(), basis_dim) {
            return Err(Error::ShapeMismatch(format!(
                "coefficient matrix is {:?}, expected ({}, {})",
                c.dim(),
                sol.num_states(),
                basis_dim
            )));
        }
    }
    atomic_write(path, |w| {
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(VERSION)?;
        w.write_f64::<LittleEndian>(sol.mass.inv_kappa())?;
        w.write_u32::<LittleEndian>(sol.cutoff)?;
        w.write_i8(sol.parity_sector)?;
        w.write_u32::<LittleEndian>(sol.num_states() as u32)?;
        w.write_u32::<LittleEndian>(basis_dim as u32)?;
        w.write_u32::<LittleEndian>(if coeffs.is_some() { FLAG_COEFFICIENTS } else { 0 })?;
        for &e in &sol.energies {
            w.write_f64::<LittleEndian>(e)?;
        }
        for &p in &sol.parities {
            w.write_i8(p)?;
        }
        if let Some(c) = coeffs {
            for &v in c.as_slice().expect("row-major coefficients") {
                w.write_f64::<LittleEndian>(v)?;
            }
        }
        Ok(())
    })
}

/// Reads a spectrum file back into an [`EigenSolution`].
pub fn read_spectrum(path: &Path) -> Result<EigenSolution> {
    let what = "spectrum file";
    let mut r = open_reader(path)?;
    expect_magic(&mut r, MAGIC, what)?;
    let version = r.read_u32::<LittleEndian>().map_err(|_| short_file(what))?;
    if version != VERSION {
        return Err(Error::Format(format!(
            "{what}: unsupported version {version}"
        )));
    }
    let inv_kappa = r.read_f64::<LittleEndian>().map_err(|_| short_file(what))?;
    let cutoff = r.read_u32::<LittleEndian>().map_err(|_| short_file(what))?;
    let parity_sector = r.read_i8().map_err(|_| short_file(what))?;
    let num_states = r.read_u32::<LittleEndian>().map_err(|_| short_file(what))? as usize;
    let basis_dim = r.read_u32::<LittleEndian>().map_err(|_| short_file(what))? as usize;
    let flags = r.read_u32::<LittleEndian>().map_err(|_| short_file(what))?;

    let mass = MassRatio::from_inv_kappa(inv_kappa)
        .map_err(|_| Error::Format(format!("{what}: invalid inv_kappa {inv_kappa}")))?;
    if cutoff < 3 || basis_dim != ((cutoff as usize - 1) * (cutoff as usize - 2)) / 2 {
        return Err(Error::Format(format!(
            "{what}: basis dimension {basis_dim} inconsistent with cutoff {cutoff}"
        )));
    }
    if !matches!(parity_sector, -1 | 0 | 1) {
        return Err(Error::Format(format!(
            "{what}: invalid parity sector {parity_sector}"
        )));
    }

    let mut energies = vec![0.0f64; num_states];
    r.read_f64_into::<LittleEndian>(&mut energies)
        .map_err(|_| short_file(what))?;
    let mut parities_raw = vec![0u8; num_states];
    r.read_exact(&mut parities_raw)
        .map_err(|_| short_file(what))?;
    let parities: Vec<i8> = parities_raw.iter().map(|&b| b as i8).collect();
    if parities.iter().any(|p| !matches!(p, -1 | 1)) {
        return Err(Error::Format(format!("{what}: invalid parity label")));
    }

    let coefficients = if flags & FLAG_COEFFICIENTS != 0 {
        let mut data = vec![0.0f64; num_states * basis_dim];
        r.read_f64_into::<LittleEndian>(&mut data)
            .map_err(|_| short_file(what))?;
        Some(
            Array2::from_shape_vec((num_states, basis_dim), data)
                .expect("shape checked above"),
        )
    } else {
        None
    };

    Ok(EigenSolution {
        mass,
        cutoff,
        parity_sector,
        energies,
        parities,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{solve_merged, SolveOptions};
    use tempfile::tempdir;

    #[test]
    fn round_trip_with_and_without_coefficients() {
        let dir = tempdir().unwrap();
        let sol = solve_merged(
            10,
            MassRatio::from_kappa(2.0).unwrap(),
            SolveOptions::default(),
        )
        .unwrap();

        let with = dir.path().join("with.qbs1");
        write_spectrum(&with, &sol, true).unwrap();
        let back = read_spectrum(&with).unwrap();
        assert_eq!(back.energies, sol.energies);
        assert_eq!(back.parities, sol.parities);
        assert_eq!(
            back.coefficients.as_ref().unwrap(),
            sol.coefficients.as_ref().unwrap()
        );

        let without = dir.path().join("without.qbs1");
        write_spectrum(&without, &sol, false).unwrap();
        let back = read_spectrum(&without).unwrap();
        assert!(back.coefficients.is_none());
        assert_eq!(back.energies, sol.energies);
    }

    #[test]
    fn truncated_file_is_a_format_error() {
        let dir = tempdir().unwrap();
        let sol = solve_merged(
            8,
            MassRatio::from_kappa(3.0).unwrap(),
            SolveOptions::default(),
        )
        .unwrap();
        let path = dir.path().join("s.qbs1");
        write_spectrum(&path, &sol, true).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let cut = dir.path().join("cut.qbs1");
        std::fs::write(&cut, &bytes[..bytes.len() / 2]).unwrap();
        assert!(matches!(read_spectrum(&cut), Err(Error::Format(_))));
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.qbs1");
        std::fs::write(&path, b"NOPE0000000000000000000000").unwrap();
        assert!(matches!(read_spectrum(&path), Err(Error::Format(_))));
    }
}
