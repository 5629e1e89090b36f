//! Numerical experiments probing a trained classifier: parameter scans,
//! out-of-distribution inputs, leave-out influence, and adversarial
//! perturbations.

mod attack;
pub mod csv;
mod loo;
mod scans;

pub use attack::{adversarial_attack, AttackResult};
pub use loo::{
    block_betas, leave_out_influence, rank_correlation, select_test_state, InfluenceResult,
    singleton_betas,
};
pub use scans::{
    alpha_scan, bosonic_classification, mass_scan, noise_scan, random_image_study, AlphaRow,
    AlphaScan, BandedPoint, BosonicReport, MassScan, NoiseMode, NoiseRow, NoiseScan,
    RandomImageRow,
};

/// Splitmix64-style seed derivation so every perturbed image gets its own
/// reproducible stream.
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut z = base
        .wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
