//! Eigenstates as images: rasterization onto pixel grids, amplitude
//! statistics, labeled datasets, and the perturbed/synthetic inputs used to
//! probe the classifier.

mod amplitude;
mod dataset;
pub mod file;
mod perturb;
mod raster;

pub use amplitude::{amplitude_gaussian_cdf, amplitude_histogram, gaussian_prediction};
pub use dataset::{build_dataset, Dataset, LabeledImage, TRAIN_FRACTION};
pub use file::{read_dataset, write_dataset, write_pgm};
pub use perturb::{
    additive_noise, multiplicative_noise, random_image, scale_image, symmetrized_noise_field,
    NoiseDistribution,
};
pub use raster::{bosonic_pairs_by_energy, bosonic_state, rasterize, Rasterizer};

use crate::error::{Error, Result};
use crate::BOX_LENGTH;
use ndarray::Array2;

/// Pixel resolutions exercised in the workflows: coarse (aliasing
/// demonstrations), standard (classifier input), fine (amplitude
/// statistics).
pub const RESOLUTION_PRESETS: [usize; 3] = [33, 64, 315];

/// What a grid's values mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Real wave-function values `psi`.
    Wavefunction,
    /// Probability density `|psi|^2`.
    Density,
}

/// Class label of an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Integrable,
    NonIntegrable,
}

impl Label {
    /// Class index as used by the network output layer and the file format.
    pub fn class_index(&self) -> usize {
        match self {
            Label::Integrable => 0,
            Label::NonIntegrable => 1,
        }
    }

    pub fn from_class_index(i: u8) -> Result<Self> {
        match i {
            0 => Ok(Label::Integrable),
            1 => Ok(Label::NonIntegrable),
            _ => Err(Error::Format(format!("invalid label byte {i}"))),
        }
    }
}

/// A square raster of `psi` or `|psi|^2` values sampled at pixel centers
/// `z = (i + 1/2) L / R`.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelGrid {
    resolution: usize,
    values: Array2<f64>,
    kind: GridKind,
    normalized: bool,
}

impl PixelGrid {
    pub fn new(values: Array2<f64>, kind: GridKind) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c || r < 2 {
            return Err(Error::ShapeMismatch(format!(
                "pixel grid must be square with resolution >= 2, got {r}x{c}"
            )));
        }
        if kind == GridKind::Density && values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidInput(
                "density grids must be nonnegative".into(),
            ));
        }
        Ok(Self {
            resolution: r,
            values,
            kind,
            normalized: false,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn is_flagged_normalized(&self) -> bool {
        self.normalized
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Pixel-center coordinate of index `i`.
    pub fn pixel_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * BOX_LENGTH / self.resolution as f64
    }

    /// The Riemann sum the normalization convention fixes to one:
    /// `sum v * (L/R)^2` for densities, `sum v^2 * (L/R)^2` for wave
    /// functions.
    pub fn norm_sum(&self) -> f64 {
        let cell = (BOX_LENGTH / self.resolution as f64).powi(2);
        match self.kind {
            GridKind::Density => self.values.iter().sum::<f64>() * cell,
            GridKind::Wavefunction => self.values.iter().map(|v| v * v).sum::<f64>() * cell,
        }
    }

    /// Rescales in place so [`Self::norm_sum`] equals one.
    pub fn normalize(&mut self) -> Result<()> {
        let s = self.norm_sum();
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidInput(format!(
                "cannot normalize a grid with norm sum {s}"
            )));
        }
        let factor = match self.kind {
            GridKind::Density => 1.0 / s,
            GridKind::Wavefunction => 1.0 / s.sqrt(),
        };
        self.values.mapv_inplace(|v| v * factor);
        self.normalized = true;
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// Squares a wave-function grid into a density grid. The normalization
    /// sum is unchanged, so the flag carries over.
    pub fn to_density(&self) -> Result<PixelGrid> {
        if self.kind != GridKind::Wavefunction {
            return Err(Error::InvalidInput(
                "to_density expects a wave-function grid".into(),
            ));
        }
        Ok(PixelGrid {
            resolution: self.resolution,
            values: self.values.mapv(|v| v * v),
            kind: GridKind::Density,
            normalized: self.normalized,
        })
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn with_values(&self, values: Array2<f64>, kind: GridKind, normalized: bool) -> Self {
        PixelGrid {
            resolution: self.resolution,
            values,
            kind,
            normalized,
        }
    }

    pub(crate) fn from_parts(
        values: Array2<f64>,
        kind: GridKind,
        normalized: bool,
    ) -> Result<Self> {
        let mut g = Self::new(values, kind)?;
        g.normalized = normalized;
        Ok(g)
    }

    /// f32 copy of the pixel values, row-major (the training and file
    /// precision).
    pub fn to_f32(&self) -> Array2<f32> {
        self.values.mapv(|v| v as f32)
    }
}
