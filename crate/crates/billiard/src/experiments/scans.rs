//! Accuracy scans over mass ratio, image scale, noise strength, and fully
//! synthetic inputs.

use super::derive_seed;
use crate::error::{Error, Result};
use crate::imaging::{
    additive_noise, bosonic_pairs_by_energy, bosonic_state, multiplicative_noise, random_image,
    scale_image, Dataset, GridKind, Label, NoiseDistribution, PixelGrid, Rasterizer,
};
use crate::net::{forward, NetworkParameters};
use crate::spectral::EigenSolution;

/// One scan point with its seed-ensemble band.
#[derive(Debug, Clone, Copy)]
pub struct BandedPoint {
    pub x: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Accuracy against mass ratio, with ensemble bands.
#[derive(Debug, Clone)]
pub struct MassScan {
    pub points: Vec<BandedPoint>,
}

/// Accuracy of an ensemble on the eigenstates of one mass ratio: fraction
/// of states whose predicted class matches the integrability of the mass
/// ratio. Points come out ordered by ascending `kappa`.
pub fn mass_scan(
    ensemble: &[NetworkParameters],
    spectra: &[&EigenSolution],
    state_range: std::ops::Range<usize>,
    resolution: usize,
) -> Result<MassScan> {
    if ensemble.is_empty() {
        return Err(Error::InvalidInput("empty model ensemble".into()));
    }
    let mut order: Vec<usize> = (0..spectra.len()).collect();
    order.sort_by(|&a, &b| {
        spectra[b]
            .mass
            .inv_kappa()
            .total_cmp(&spectra[a].mass.inv_kappa())
    });
    let mut points = Vec::with_capacity(spectra.len());
    for idx in order {
        let sol = spectra[idx];
        if sol.num_states() < state_range.end {
            return Err(Error::LengthMismatch {
                expected: state_range.end,
                got: sol.num_states(),
            });
        }
        let expect_integrable = sol.mass.is_integrable();
        let raster = Rasterizer::new(sol.cutoff, resolution)?;
        let mut correct = vec![0usize; ensemble.len()];
        for state in state_range.clone() {
            let image = raster.state(sol, state, GridKind::Density)?.to_f32();
            for (k, net) in ensemble.iter().enumerate() {
                if forward(net, &image)?.is_integrable() == expect_integrable {
                    correct[k] += 1;
                }
            }
        }
        let n = state_range.len() as f64;
        let accs: Vec<f64> = correct.iter().map(|&c| c as f64 / n).collect();
        points.push(BandedPoint {
            x: sol.mass.kappa(),
            mean: accs.iter().sum::<f64>() / accs.len() as f64,
            min: accs.iter().cloned().fold(f64::INFINITY, f64::min),
            max: accs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    Ok(MassScan { points })
}

/// One row of the scale scan: overall accuracy and the per-source curves.
#[derive(Debug, Clone, Copy)]
pub struct AlphaRow {
    pub alpha: f64,
    pub acc_overall: f64,
    pub acc_k1: f64,
    pub acc_k2: f64,
    pub acc_k5: f64,
    pub acc_kinf: f64,
}

#[derive(Debug, Clone)]
pub struct AlphaScan {
    pub rows: Vec<AlphaRow>,
}

/// Accuracy on the dataset images multiplied by `alpha`, overall and per
/// source mass ratio. The dataset must hold the four standard sources.
pub fn alpha_scan(
    net: &NetworkParameters,
    dataset: &Dataset,
    alphas: &[f64],
) -> Result<AlphaScan> {
    let sources = [1.0, 0.5, 0.2, 0.0]; // inv_kappa of kappa = 1, 2, 5, inf
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let mut per_source = [(0usize, 0usize); 4];
        for record in &dataset.records {
            let Some(slot) = sources
                .iter()
                .position(|&ik| record.inv_kappa == ik)
            else {
                return Err(Error::InvalidInput(format!(
                    "unexpected source 1/kappa = {} in dataset",
                    record.inv_kappa
                )));
            };
            let scaled = scale_image(&record.grid, alpha)?;
            let pred = forward(net, &scaled.to_f32())?;
            let correct = pred.is_integrable() == (record.label == Label::Integrable);
            per_source[slot].1 += 1;
            if correct {
                per_source[slot].0 += 1;
            }
        }
        let acc = |slot: usize| -> f64 {
            let (c, n) = per_source[slot];
            c as f64 / n.max(1) as f64
        };
        let total_correct: usize = per_source.iter().map(|&(c, _)| c).sum();
        let total: usize = per_source.iter().map(|&(_, n)| n).sum();
        rows.push(AlphaRow {
            alpha,
            acc_overall: total_correct as f64 / total.max(1) as f64,
            acc_k1: acc(0),
            acc_k2: acc(1),
            acc_k5: acc(2),
            acc_kinf: acc(3),
        });
    }
    Ok(AlphaScan { rows })
}

/// Noise model applied to wave functions before re-forming densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    /// `psi -> a psi (1 + r)`: keeps nodal lines.
    Multiplicative,
    /// `psi -> a (psi + G r)`: large `G` erases the state.
    Additive { weight: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct NoiseRow {
    pub sigma: f64,
    pub acc_integrable: f64,
    pub acc_nonintegrable: f64,
    pub acc_avg: f64,
}

#[derive(Debug, Clone)]
pub struct NoiseScan {
    pub rows: Vec<NoiseRow>,
}

/// Class accuracies on noisy versions of labeled wave-function grids.
/// Every (state, sigma) pair draws its own seeded noise field.
pub fn noise_scan(
    net: &NetworkParameters,
    states: &[(PixelGrid, Label)],
    sigmas: &[f64],
    mode: NoiseMode,
    seed_base: u64,
) -> Result<NoiseScan> {
    if states.is_empty() {
        return Err(Error::InvalidInput("no states to perturb".into()));
    }
    let mut rows = Vec::with_capacity(sigmas.len());
    for (si, &sigma) in sigmas.iter().enumerate() {
        let mut counts = [(0usize, 0usize); 2]; // per class: (correct, total)
        for (i, (psi, label)) in states.iter().enumerate() {
            let seed = derive_seed(seed_base, si as u64, i as u64);
            let noisy = match mode {
                NoiseMode::Multiplicative => multiplicative_noise(psi, sigma, seed)?,
                NoiseMode::Additive { weight } => additive_noise(psi, sigma, weight, seed)?,
            };
            let image = noisy.to_density()?.to_f32();
            let pred = forward(net, &image)?;
            let class = label.class_index();
            counts[class].1 += 1;
            if pred.class_index() == class {
                counts[class].0 += 1;
            }
        }
        let acc_integrable = counts[0].0 as f64 / counts[0].1.max(1) as f64;
        let acc_nonintegrable = counts[1].0 as f64 / counts[1].1.max(1) as f64;
        rows.push(NoiseRow {
            sigma,
            acc_integrable,
            acc_nonintegrable,
            acc_avg: 0.5 * (acc_integrable + acc_nonintegrable),
        });
    }
    Ok(NoiseScan { rows })
}

#[derive(Debug, Clone)]
pub struct RandomImageRow {
    pub zero_fraction: f64,
    pub distribution: NoiseDistribution,
    pub frac_nonintegrable: f64,
    pub count: usize,
}

/// Fraction of synthetic random density images classified non-integrable,
/// per zero fraction and generator distribution.
pub fn random_image_study(
    net: &NetworkParameters,
    count: usize,
    zero_fractions: &[f64],
    distributions: &[NoiseDistribution],
    seed_base: u64,
) -> Result<Vec<RandomImageRow>> {
    if count == 0 {
        return Err(Error::InvalidInput("image count must be >= 1".into()));
    }
    let resolution = net.spec.input_resolution;
    let mut rows = Vec::new();
    for (zi, &zero_fraction) in zero_fractions.iter().enumerate() {
        for (di, &distribution) in distributions.iter().enumerate() {
            let mut nonintegrable = 0usize;
            for i in 0..count {
                let seed = derive_seed(seed_base, (zi * 101 + di) as u64, i as u64);
                let img = random_image(resolution, zero_fraction, distribution, seed)?;
                if !forward(net, &img.to_f32())?.is_integrable() {
                    nonintegrable += 1;
                }
            }
            rows.push(RandomImageRow {
                zero_fraction,
                distribution,
                frac_nonintegrable: nonintegrable as f64 / count as f64,
                count,
            });
        }
    }
    Ok(rows)
}

/// Per-seed fractions of bosonic states classified integrable.
#[derive(Debug, Clone)]
pub struct BosonicReport {
    pub per_seed: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Classifies box-boson states (ordered by energy, indices in
/// `state_range`) with every ensemble member.
pub fn bosonic_classification(
    ensemble: &[NetworkParameters],
    state_range: std::ops::Range<usize>,
    resolution: usize,
) -> Result<BosonicReport> {
    if ensemble.is_empty() {
        return Err(Error::InvalidInput("empty model ensemble".into()));
    }
    if state_range.is_empty() {
        return Err(Error::InvalidInput("empty state range".into()));
    }
    let pairs = bosonic_pairs_by_energy(state_range.end);
    let mut integrable = vec![0usize; ensemble.len()];
    for &(k1, k2) in &pairs[state_range.clone()] {
        let image = bosonic_state(k1, k2, resolution)?
            .normalized()?
            .to_density()?
            .to_f32();
        for (s, net) in ensemble.iter().enumerate() {
            if forward(net, &image)?.is_integrable() {
                integrable[s] += 1;
            }
        }
    }
    let n = state_range.len() as f64;
    let per_seed: Vec<f64> = integrable.iter().map(|&c| c as f64 / n).collect();
    Ok(BosonicReport {
        mean: per_seed.iter().sum::<f64>() / per_seed.len() as f64,
        min: per_seed.iter().cloned().fold(f64::INFINITY, f64::min),
        max: per_seed.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        per_seed,
    })
}
