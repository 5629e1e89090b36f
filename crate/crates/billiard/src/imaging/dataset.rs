//! Labeled image datasets with a deterministic train/test split.

use super::{GridKind, Label, PixelGrid, Rasterizer};
use crate::error::{Error, Result};
use crate::spectral::EigenSolution;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fraction of records drawn into the training split.
pub const TRAIN_FRACTION: f64 = 0.85;

/// One record: an image, its class, and its provenance.
#[derive(Debug, Clone)]
pub struct LabeledImage {
    pub grid: PixelGrid,
    pub label: Label,
    pub inv_kappa: f64,
    pub state_index: u32,
}

/// Labeled images with train/test index lists.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub records: Vec<LabeledImage>,
    pub train: Vec<u32>,
    pub test: Vec<u32>,
    pub split_seed: u64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn resolution(&self) -> usize {
        self.records.first().map(|r| r.grid.resolution()).unwrap_or(0)
    }

    pub fn kind(&self) -> GridKind {
        self.records
            .first()
            .map(|r| r.grid.kind())
            .unwrap_or(GridKind::Density)
    }

    pub fn train_records(&self) -> impl Iterator<Item = &LabeledImage> {
        self.train.iter().map(|&i| &self.records[i as usize])
    }

    pub fn test_records(&self) -> impl Iterator<Item = &LabeledImage> {
        self.test.iter().map(|&i| &self.records[i as usize])
    }

    /// Recomputes the split in place from `seed`; records are untouched.
    pub fn resplit(&mut self, seed: u64) {
        let (train, test) = split_indices(self.records.len(), seed);
        self.split_seed = seed;
        self.train = train;
        self.test = test;
    }
}

/// Deterministic shuffled split of `0..n`, sorted within each side.
pub(crate) fn split_indices(n: usize, seed: u64) -> (Vec<u32>, Vec<u32>) {
    let mut idx: Vec<u32> = (0..n as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let train_len = (TRAIN_FRACTION * n as f64).round() as usize;
    let mut train = idx[..train_len].to_vec();
    let mut test = idx[train_len..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Builds the labeled dataset from diagonalized solutions: every state in
/// `state_range` (indices into the merged energy ordering) of every source
/// becomes one image. Sources are ordered by ascending `kappa`; the label is
/// integrable exactly when the source mass ratio is one of the solvable
/// endpoints.
pub fn build_dataset(
    solutions: &[&EigenSolution],
    state_range: std::ops::Range<usize>,
    resolution: usize,
    kind: GridKind,
    split_seed: u64,
) -> Result<Dataset> {
    if solutions.is_empty() {
        return Err(Error::InvalidInput("no source solutions".into()));
    }
    if state_range.is_empty() {
        return Err(Error::InvalidInput("empty state range".into()));
    }
    // sampling-theorem guard: the N-th state oscillates ~sqrt(N) times per
    // axis and needs about 2 sqrt(N) pixels
    let needed = 2.0 * ((state_range.end - 1) as f64).sqrt();
    if (resolution as f64) < needed {
        eprintln!(
            "warning: resolution {resolution} is below the sampling guard {:.0} for state {}",
            needed.ceil(),
            state_range.end - 1
        );
    }

    let mut sources: Vec<&EigenSolution> = solutions.to_vec();
    // ascending kappa = descending 1/kappa; infinitely heavy impurity last
    sources.sort_by(|a, b| b.mass.inv_kappa().total_cmp(&a.mass.inv_kappa()));

    let mut records = Vec::with_capacity(sources.len() * state_range.len());
    for sol in sources {
        if sol.coefficients.is_none() {
            return Err(Error::MissingCoefficients);
        }
        if sol.num_states() < state_range.end {
            return Err(Error::LengthMismatch {
                expected: state_range.end,
                got: sol.num_states(),
            });
        }
        let raster = Rasterizer::new(sol.cutoff, resolution)?;
        let label = if sol.mass.is_integrable() {
            Label::Integrable
        } else {
            Label::NonIntegrable
        };
        for state in state_range.clone() {
            records.push(LabeledImage {
                grid: raster.state(sol, state, kind)?,
                label,
                inv_kappa: sol.mass.inv_kappa(),
                state_index: state as u32,
            });
        }
    }
    let (train, test) = split_indices(records.len(), split_seed);
    Ok(Dataset {
        records,
        train,
        test,
        split_seed,
    })
}
