//! Leave-out influence: retrain without a subset and compare predictions on
//! a fixed test state.

use crate::error::{Error, Result};
use crate::imaging::{Dataset, Label};
use crate::net::{forward, train, ArchitectureSpec, NetworkParameters, TrainingConfig};
use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Effect of removing one set `beta` from the training data: the change of
/// the integrable-probability output on the test state.
#[derive(Debug, Clone, Copy)]
pub struct InfluenceResult {
    /// Energy of the first (lowest-index) left-out state.
    pub beta_first_energy: f64,
    pub beta_size: usize,
    /// `f1 - f1_without_beta`, in `[-1, 1]`.
    pub f1_diff: f64,
}

/// Retrains with each `beta` (dataset record indices inside the train
/// split) removed, under identical seeds and hyperparameters, and records
/// the prediction differences. `record_energies` aligns with
/// `dataset.records`.
pub fn leave_out_influence(
    dataset: &Dataset,
    record_energies: &[f64],
    spec: &ArchitectureSpec,
    config: &TrainingConfig,
    betas: &[Vec<u32>],
    test_image: &Array2<f32>,
    baseline: Option<&NetworkParameters>,
) -> Result<Vec<InfluenceResult>> {
    if record_energies.len() != dataset.len() {
        return Err(Error::LengthMismatch {
            expected: dataset.len(),
            got: record_energies.len(),
        });
    }
    let train_set: std::collections::HashSet<u32> = dataset.train.iter().copied().collect();
    for beta in betas {
        if let Some(&bad) = beta.iter().find(|i| !train_set.contains(i)) {
            return Err(Error::InvalidInput(format!(
                "left-out record {bad} is not in the train split"
            )));
        }
    }

    let trained;
    let baseline = match baseline {
        Some(net) => net,
        None => {
            trained = train(dataset, spec, config)?.0;
            &trained
        }
    };
    let f1 = forward(baseline, test_image)?.b1;

    let mut results = Vec::with_capacity(betas.len());
    for beta in betas {
        let f1_without = if beta.is_empty() {
            // identical training is bit-deterministic, so the difference is
            // exactly zero without retraining
            f1
        } else {
            let exclude: std::collections::HashSet<u32> = beta.iter().copied().collect();
            let mut reduced = dataset.clone();
            reduced.train.retain(|i| !exclude.contains(i));
            let (net, _) = train(&reduced, spec, config)?;
            forward(&net, test_image)?.b1
        };
        let first = beta.iter().min().copied();
        results.push(InfluenceResult {
            beta_first_energy: first
                .map(|i| record_energies[i as usize])
                .unwrap_or(f64::NAN),
            beta_size: beta.len(),
            f1_diff: f1 - f1_without,
        });
    }
    Ok(results)
}

/// Picks the test-split record with the given label whose prediction is
/// correct with at least `min_confidence`, closest in energy to
/// `near_energy`. Returns the record index.
pub fn select_test_state(
    dataset: &Dataset,
    record_energies: &[f64],
    net: &NetworkParameters,
    label: Label,
    near_energy: f64,
    min_confidence: f64,
) -> Result<usize> {
    let mut best: Option<(f64, usize)> = None;
    for &i in &dataset.test {
        let rec = &dataset.records[i as usize];
        if rec.label != label {
            continue;
        }
        let pred = forward(net, &rec.grid.to_f32())?;
        let confidence = match label {
            Label::Integrable => pred.b1,
            Label::NonIntegrable => pred.b2,
        };
        if confidence < min_confidence {
            continue;
        }
        let dist = (record_energies[i as usize] - near_energy).abs();
        if best.map_or(true, |(d, _)| dist < d) {
            best = Some((dist, i as usize));
        }
    }
    best.map(|(_, i)| i).ok_or_else(|| {
        Error::InvalidInput("no confidently classified test state matches".into())
    })
}

fn source_train_records(dataset: &Dataset, inv_kappa: f64) -> Vec<u32> {
    let mut ids: Vec<u32> = dataset
        .train
        .iter()
        .copied()
        .filter(|&i| dataset.records[i as usize].inv_kappa == inv_kappa)
        .collect();
    ids.sort_by_key(|&i| dataset.records[i as usize].state_index);
    ids
}

/// Draws `count` distinct single-record sets from the train split of one
/// source mass ratio.
pub fn singleton_betas(
    dataset: &Dataset,
    inv_kappa: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<u32>>> {
    let mut pool = source_train_records(dataset, inv_kappa);
    if pool.len() < count {
        return Err(Error::LengthMismatch {
            expected: count,
            got: pool.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);
    pool.truncate(count);
    pool.sort_unstable();
    Ok(pool.into_iter().map(|i| vec![i]).collect())
}

/// Draws `count` blocks of `block_len` consecutive train-split records
/// (consecutive in the energy ordering of one source mass ratio).
pub fn block_betas(
    dataset: &Dataset,
    inv_kappa: f64,
    block_len: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<u32>>> {
    let pool = source_train_records(dataset, inv_kappa);
    if pool.len() < block_len || block_len == 0 {
        return Err(Error::InvalidInput(
            "source has too few train records for the requested blocks".into(),
        ));
    }
    let max_start = pool.len() - block_len;
    let mut starts: Vec<usize> = (0..=max_start).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    starts.shuffle(&mut rng);
    starts.truncate(count);
    starts.sort_unstable();
    Ok(starts
        .into_iter()
        .map(|s| pool[s..s + block_len].to_vec())
        .collect())
}

/// Spearman rank correlation with average ranks on ties.
pub fn rank_correlation(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let rank = |v: &[f64]| -> Vec<f64> {
        let mut order: Vec<usize> = (0..v.len()).collect();
        order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut ranks = vec![0.0; v.len()];
        let mut i = 0;
        while i < order.len() {
            let mut j = i;
            while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &order[i..=j] {
                ranks[k] = avg;
            }
            i = j + 1;
        }
        ranks
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut num = 0.0;
    let (mut dx, mut dy) = (0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        num += (a - mean) * (b - mean);
        dx += (a - mean).powi(2);
        dy += (b - mean).powi(2);
    }
    if dx == 0.0 || dy == 0.0 {
        return 0.0;
    }
    num / (dx * dy).sqrt()
}
