//! CSV emitters for the experiment artifacts; column orders are interface.

use super::{AlphaScan, AttackResult, BosonicReport, InfluenceResult, MassScan, NoiseScan,
    RandomImageRow};
use crate::error::Result;
use std::io::Write;

/// `kappa,acc_mean,acc_min,acc_max` (the heavy-impurity control prints as
/// `inf`).
pub fn write_mass_scan_csv<W: Write>(w: &mut W, scan: &MassScan) -> Result<()> {
    writeln!(w, "kappa,acc_mean,acc_min,acc_max")?;
    for p in &scan.points {
        writeln!(w, "{},{},{},{}", p.x, p.mean, p.min, p.max)?;
    }
    Ok(())
}

/// `alpha,acc_overall,acc_k1,acc_k2,acc_k5,acc_kinf`.
pub fn write_alpha_scan_csv<W: Write>(w: &mut W, scan: &AlphaScan) -> Result<()> {
    writeln!(w, "alpha,acc_overall,acc_k1,acc_k2,acc_k5,acc_kinf")?;
    for r in &scan.rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.alpha, r.acc_overall, r.acc_k1, r.acc_k2, r.acc_k5, r.acc_kinf
        )?;
    }
    Ok(())
}

/// `sigma,acc_integrable,acc_nonintegrable,acc_avg`.
pub fn write_noise_scan_csv<W: Write>(w: &mut W, scan: &NoiseScan) -> Result<()> {
    writeln!(w, "sigma,acc_integrable,acc_nonintegrable,acc_avg")?;
    for r in &scan.rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.sigma, r.acc_integrable, r.acc_nonintegrable, r.acc_avg
        )?;
    }
    Ok(())
}

/// `zero_fraction,distribution,frac_nonintegrable,count`.
pub fn write_random_study_csv<W: Write>(w: &mut W, rows: &[RandomImageRow]) -> Result<()> {
    writeln!(w, "zero_fraction,distribution,frac_nonintegrable,count")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.zero_fraction,
            r.distribution.name(),
            r.frac_nonintegrable,
            r.count
        )?;
    }
    Ok(())
}

/// `seed_index,frac_integrable`.
pub fn write_bosonic_csv<W: Write>(w: &mut W, report: &BosonicReport) -> Result<()> {
    writeln!(w, "seed_index,frac_integrable")?;
    for (s, f) in report.per_seed.iter().enumerate() {
        writeln!(w, "{},{}", s, f)?;
    }
    Ok(())
}

/// `beta_first_energy,beta_size,f1_diff`.
pub fn write_loo_csv<W: Write>(w: &mut W, results: &[InfluenceResult]) -> Result<()> {
    writeln!(w, "beta_first_energy,beta_size,f1_diff")?;
    for r in results {
        writeln!(w, "{},{},{}", r.beta_first_energy, r.beta_size, r.f1_diff)?;
    }
    Ok(())
}

/// `state_index,iterations,success,linf_rel` (success as 1/0).
pub fn write_attack_csv<W: Write>(w: &mut W, rows: &[(u32, &AttackResult)]) -> Result<()> {
    writeln!(w, "state_index,iterations,success,linf_rel")?;
    for (state, r) in rows {
        writeln!(
            w,
            "{},{},{},{}",
            state,
            r.iterations,
            if r.success { 1 } else { 0 },
            r.linf_rel
        )?;
    }
    Ok(())
}
