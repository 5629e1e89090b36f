//! A small convolutional classifier built from scratch: conv, max-pool,
//! conv, max-pool, and two dense layers, with rectified-linear activations
//! and a two-neuron softmax head.
//!
//! Layer arithmetic is generic over the scalar so the production f32 path
//! and the f64 finite-difference checks share one implementation. Batch
//! reductions accumulate in f64.

pub mod file;
mod layers;
mod train;

pub use file::{load_model, save_model};
pub use layers::{
    example_gradients, example_loss, forward, input_gradient, input_gradient_f64, EvalCase,
    Gradients, Parameters, Real,
};
pub use train::{evaluate, he_init, train, EpochStats, EvalReport, OptimizerKind, TrainingConfig,
    TrainingHistory};

use crate::error::{Error, Result};

/// Topology of the fixed conv-pool-conv-pool-dense-dense stack.
///
/// Convolutions use stride 1 and same padding; both pooling layers take the
/// largest pixel of 2x2 groups. The output layer always has two neurons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArchitectureSpec {
    pub input_resolution: usize,
    pub conv1_filters: usize,
    pub conv1_kernel: usize,
    pub conv2_filters: usize,
    pub conv2_kernel: usize,
    pub dense1_width: usize,
}

/// Output classes.
pub const NUM_CLASSES: usize = 2;

impl Default for ArchitectureSpec {
    fn default() -> Self {
        Self {
            input_resolution: 64,
            conv1_filters: 16,
            conv1_kernel: 3,
            conv2_filters: 32,
            conv2_kernel: 3,
            dense1_width: 128,
        }
    }
}

impl ArchitectureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.input_resolution < 4 {
            return Err(Error::InvalidInput(
                "input resolution must be at least 4".into(),
            ));
        }
        for k in [self.conv1_kernel, self.conv2_kernel] {
            if k == 0 || k % 2 == 0 {
                return Err(Error::InvalidInput(format!(
                    "kernel sizes must be odd, got {k}"
                )));
            }
        }
        if self.conv1_filters == 0 || self.conv2_filters == 0 || self.dense1_width == 0 {
            return Err(Error::InvalidInput("layer widths must be positive".into()));
        }
        Ok(())
    }

    /// Spatial side length after the first pooling layer.
    pub fn pool1_side(&self) -> usize {
        self.input_resolution / 2
    }

    /// Spatial side length after the second pooling layer.
    pub fn pool2_side(&self) -> usize {
        self.pool1_side() / 2
    }

    /// Width of the flattened feature vector entering the dense layers.
    pub fn flat_dim(&self) -> usize {
        self.conv2_filters * self.pool2_side() * self.pool2_side()
    }

    pub fn parameter_count(&self) -> usize {
        let c1 = self.conv1_kernel * self.conv1_kernel * self.conv1_filters + self.conv1_filters;
        let c2 = self.conv2_kernel * self.conv2_kernel * self.conv1_filters * self.conv2_filters
            + self.conv2_filters;
        let d1 = self.flat_dim() * self.dense1_width + self.dense1_width;
        let d2 = self.dense1_width * NUM_CLASSES + NUM_CLASSES;
        c1 + c2 + d1 + d2
    }
}

/// Trained weights together with their topology.
#[derive(Debug, Clone)]
pub struct NetworkParameters {
    pub spec: ArchitectureSpec,
    pub params: Parameters<f32>,
}

/// Softmax output: `b1` is the probability the input is integrable,
/// `b2 = 1 - b1`.
#[derive(Debug, Clone, Copy)]
pub struct Prediction {
    pub b1: f64,
    pub b2: f64,
}

impl Prediction {
    /// Classification rule: integrable exactly when `b1 > b2`; ties count
    /// as non-integrable.
    pub fn is_integrable(&self) -> bool {
        self.b1 > self.b2
    }

    pub fn class_index(&self) -> usize {
        if self.is_integrable() {
            0
        } else {
            1
        }
    }
}
