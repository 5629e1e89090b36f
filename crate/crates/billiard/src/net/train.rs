//! Initialization, the mini-batch training loop, and evaluation.

use super::layers::{example_gradients, forward, EvalCase, Parameters};
use super::{ArchitectureSpec, NetworkParameters, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::imaging::Dataset;
use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Optimizers available to the training loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerKind {
    /// Adam with the usual moment estimates.
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
    /// Plain stochastic gradient descent.
    Sgd,
}

impl Default for OptimizerKind {
    fn default() -> Self {
        OptimizerKind::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Hyperparameters of one training run. Identical configs on identical
/// datasets reproduce identical parameters bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingConfig {
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub init_seed: u64,
    pub shuffle_seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerKind::default(),
            learning_rate: 1e-3,
            batch_size: 32,
            epochs: 30,
            init_seed: 1,
            shuffle_seed: 2,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::InvalidInput(
                "batch size and epochs must be >= 1".into(),
            ));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidInput("learning rate must be > 0".into()));
        }
        Ok(())
    }
}

/// Per-epoch progress.
#[derive(Debug, Clone, Copy)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

pub type TrainingHistory = Vec<EpochStats>;

/// He-style scaled Gaussian initialization from `seed`; biases start at
/// zero.
pub fn he_init(spec: &ArchitectureSpec, seed: u64) -> NetworkParameters {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = Parameters::<f32>::zeros_like(spec);
    let mut fill = |w: &mut Array2<f32>| {
        let fan_in = w.dim().0 as f64;
        let scale = (2.0 / fan_in).sqrt();
        for v in w.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *v = (g * scale) as f32;
        }
    };
    fill(&mut params.conv1_w);
    fill(&mut params.conv2_w);
    fill(&mut params.dense1_w);
    fill(&mut params.dense2_w);
    NetworkParameters { spec: *spec, params }
}

struct AdamState {
    m: Parameters<f32>,
    v: Parameters<f32>,
    t: u64,
}

/// f64 gradient accumulator for one batch.
struct BatchAccumulator {
    sums: Parameters<f64>,
    count: usize,
}

impl BatchAccumulator {
    fn new(spec: &ArchitectureSpec) -> Self {
        Self {
            sums: Parameters::<f64>::zeros_like(spec),
            count: 0,
        }
    }

    fn reset(&mut self) {
        self.sums.for_each_tensor_mut(|s| s.fill(0.0));
        self.count = 0;
    }

    fn add(&mut self, grads: &Parameters<f32>) {
        add_into(&mut self.sums.conv1_w, &grads.conv1_w);
        add_into_1(&mut self.sums.conv1_b, &grads.conv1_b);
        add_into(&mut self.sums.conv2_w, &grads.conv2_w);
        add_into_1(&mut self.sums.conv2_b, &grads.conv2_b);
        add_into(&mut self.sums.dense1_w, &grads.dense1_w);
        add_into_1(&mut self.sums.dense1_b, &grads.dense1_b);
        add_into(&mut self.sums.dense2_w, &grads.dense2_w);
        add_into_1(&mut self.sums.dense2_b, &grads.dense2_b);
        self.count += 1;
    }
}

fn add_into(acc: &mut Array2<f64>, g: &Array2<f32>) {
    acc.zip_mut_with(g, |a, &b| *a += b as f64);
}

fn add_into_1(acc: &mut Array1<f64>, g: &Array1<f32>) {
    acc.zip_mut_with(g, |a, &b| *a += b as f64);
}

fn slices_mut(p: &mut Parameters<f32>) -> [&mut [f32]; 8] {
    [
        p.conv1_w.as_slice_mut().unwrap(),
        p.conv1_b.as_slice_mut().unwrap(),
        p.conv2_w.as_slice_mut().unwrap(),
        p.conv2_b.as_slice_mut().unwrap(),
        p.dense1_w.as_slice_mut().unwrap(),
        p.dense1_b.as_slice_mut().unwrap(),
        p.dense2_w.as_slice_mut().unwrap(),
        p.dense2_b.as_slice_mut().unwrap(),
    ]
}

fn slices(p: &Parameters<f64>) -> [&[f64]; 8] {
    [
        p.conv1_w.as_slice().unwrap(),
        p.conv1_b.as_slice().unwrap(),
        p.conv2_w.as_slice().unwrap(),
        p.conv2_b.as_slice().unwrap(),
        p.dense1_w.as_slice().unwrap(),
        p.dense1_b.as_slice().unwrap(),
        p.dense2_w.as_slice().unwrap(),
        p.dense2_b.as_slice().unwrap(),
    ]
}

fn apply_update(
    params: &mut Parameters<f32>,
    acc: &BatchAccumulator,
    adam: &mut Option<AdamState>,
    config: &TrainingConfig,
) {
    let scale = 1.0 / acc.count as f64;
    let lr = config.learning_rate;
    let ps = slices_mut(params);
    let gs = slices(&acc.sums);
    match (&config.optimizer, adam) {
        (OptimizerKind::Sgd, _) => {
            for (p, g) in ps.into_iter().zip(gs) {
                for (pv, &gv) in p.iter_mut().zip(g) {
                    *pv -= (lr * gv * scale) as f32;
                }
            }
        }
        (
            OptimizerKind::Adam {
                beta1,
                beta2,
                epsilon,
            },
            Some(state),
        ) => {
            state.t += 1;
            let (b1, b2, eps) = (*beta1, *beta2, *epsilon);
            let bc1 = 1.0 - b1.powi(state.t as i32);
            let bc2 = 1.0 - b2.powi(state.t as i32);
            let ms = slices_mut(&mut state.m);
            let vs = slices_mut(&mut state.v);
            for (((p, g), m), v) in ps.into_iter().zip(gs).zip(ms).zip(vs) {
                for i in 0..p.len() {
                    let grad = g[i] * scale;
                    let mi = b1 * m[i] as f64 + (1.0 - b1) * grad;
                    let vi = b2 * v[i] as f64 + (1.0 - b2) * grad * grad;
                    m[i] = mi as f32;
                    v[i] = vi as f32;
                    p[i] -= (lr * (mi / bc1) / ((vi / bc2).sqrt() + eps)) as f32;
                }
            }
        }
        _ => unreachable!("Adam state exists exactly when the optimizer is Adam"),
    }
}

fn cases_of(dataset: &Dataset, indices: &[u32]) -> (Vec<Array2<f32>>, Vec<usize>) {
    let images = indices
        .iter()
        .map(|&i| dataset.records[i as usize].grid.to_f32())
        .collect();
    let labels = indices
        .iter()
        .map(|&i| dataset.records[i as usize].label.class_index())
        .collect();
    (images, labels)
}

/// Mini-batch optimization over the train split. Deterministic under the
/// two seeds; non-finite loss surfaces as a distinct failure.
pub fn train(
    dataset: &Dataset,
    spec: &ArchitectureSpec,
    config: &TrainingConfig,
) -> Result<(NetworkParameters, TrainingHistory)> {
    spec.validate()?;
    config.validate()?;
    if dataset.train.is_empty() {
        return Err(Error::InvalidInput("training split is empty".into()));
    }
    if dataset.resolution() != spec.input_resolution {
        return Err(Error::ShapeMismatch(format!(
            "dataset resolution {} does not match network input {}",
            dataset.resolution(),
            spec.input_resolution
        )));
    }

    let (train_images, train_labels) = cases_of(dataset, &dataset.train);
    let (test_images, test_labels) = cases_of(dataset, &dataset.test);

    let mut net = he_init(spec, config.init_seed);
    let mut adam = match config.optimizer {
        OptimizerKind::Adam { .. } => Some(AdamState {
            m: Parameters::<f32>::zeros_like(spec),
            v: Parameters::<f32>::zeros_like(spec),
            t: 0,
        }),
        OptimizerKind::Sgd => None,
    };
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.shuffle_seed);
    let mut order: Vec<usize> = (0..train_images.len()).collect();
    let mut acc = BatchAccumulator::new(spec);
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0f64;
        let mut correct = 0usize;
        for batch in order.chunks(config.batch_size) {
            acc.reset();
            for &i in batch {
                let (loss, grads) =
                    example_gradients(&net.params, spec, &train_images[i], train_labels[i])?;
                if !loss.is_finite() {
                    return Err(Error::Divergence { epoch });
                }
                loss_sum += loss as f64;
                acc.add(&grads);
            }
            apply_update(&mut net.params, &acc, &mut adam, config);
        }
        // training accuracy on the post-epoch parameters
        for (img, &label) in train_images.iter().zip(&train_labels) {
            if forward(&net, img)?.class_index() == label {
                correct += 1;
            }
        }
        let test_accuracy = accuracy_of(&net, &test_images, &test_labels)?;
        history.push(EpochStats {
            epoch,
            train_loss: loss_sum / train_images.len() as f64,
            train_accuracy: correct as f64 / train_images.len() as f64,
            test_accuracy,
        });
    }
    Ok((net, history))
}

fn accuracy_of(net: &NetworkParameters, images: &[Array2<f32>], labels: &[usize]) -> Result<f64> {
    if images.is_empty() {
        return Ok(f64::NAN);
    }
    let mut correct = 0usize;
    for (img, &label) in images.iter().zip(labels) {
        if forward(net, img)?.class_index() == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / images.len() as f64)
}

/// Accuracy, per-class accuracy (absent for empty classes), and confusion
/// counts `[true class][predicted class]` under the `b1 > b2` rule.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub accuracy: f64,
    pub per_class: [Option<f64>; NUM_CLASSES],
    pub confusion: [[usize; NUM_CLASSES]; NUM_CLASSES],
}

pub fn evaluate<'a, I>(net: &NetworkParameters, cases: I) -> Result<EvalReport>
where
    I: IntoIterator<Item = EvalCase<'a>>,
{
    let mut confusion = [[0usize; NUM_CLASSES]; NUM_CLASSES];
    for case in cases {
        let pred = forward(net, case.image)?.class_index();
        if case.target >= NUM_CLASSES {
            return Err(Error::InvalidInput(format!(
                "class index {} out of range",
                case.target
            )));
        }
        confusion[case.target][pred] += 1;
    }
    let total: usize = confusion.iter().flatten().sum();
    if total == 0 {
        return Err(Error::InvalidInput("no cases to evaluate".into()));
    }
    let correct: usize = (0..NUM_CLASSES).map(|c| confusion[c][c]).sum();
    let per_class = std::array::from_fn(|c| {
        let class_total: usize = confusion[c].iter().sum();
        if class_total == 0 {
            None
        } else {
            Some(confusion[c][c] as f64 / class_total as f64)
        }
    });
    Ok(EvalReport {
        accuracy: correct as f64 / total as f64,
        per_class,
        confusion,
    })
}
