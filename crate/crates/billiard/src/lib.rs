//! A numerical laboratory for a triangular quantum billiard realized by two
//! identical fermions and one impurity on a ring.
//!
//! The crate computes eigenstates of the relative-motion Hamiltonian by
//! exact diagonalization in a truncated antisymmetrized sine basis, analyzes
//! level statistics (unfolding, nearest-neighbor spacings, minimal-gap
//! scaling), rasterizes eigenstates into pixel images, and trains a small
//! convolutional classifier that labels individual states integrable or
//! non-integrable, together with the perturbation experiments probing what
//! the classifier learned.
//!
//! Units are `hbar = m = 1` with ring length `L = pi`. See the `examples/`
//! directory for one runnable program per capability.

pub mod binio;
pub mod error;
pub mod experiments;
pub mod imaging;
pub mod net;
pub mod pipeline;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};

/// Ring length in the working units.
pub const BOX_LENGTH: f64 = std::f64::consts::PI;
