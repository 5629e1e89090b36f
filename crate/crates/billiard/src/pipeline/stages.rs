//! The pipeline stages the command-line binary dispatches to.

use super::{write_sidecar, RunConfig};
use crate::binio::atomic_write;
use crate::error::{Error, Result};
use crate::experiments::{
    adversarial_attack, alpha_scan, block_betas, bosonic_classification, csv as ecsv,
    leave_out_influence, mass_scan, noise_scan, random_image_study, rank_correlation,
    select_test_state, singleton_betas, NoiseMode,
};
use crate::imaging::{
    amplitude_histogram, build_dataset, gaussian_prediction, rasterize, read_dataset,
    write_dataset, write_pgm, Dataset, GridKind, Label, NoiseDistribution, PixelGrid, Rasterizer,
};
use crate::net::{
    evaluate, load_model, save_model, train, EvalCase, NetworkParameters, TrainingHistory,
};
use crate::spectral::{
    bethe_energies, benchmark_accuracy, read_spectrum, solve_merged, write_spectrum,
    EigenSolution, MassRatio, SolveOptions,
};
use crate::stats::{
    delta_min_average, fit_power_law, spacing_histogram, unfold_sector, write_delta_min_csv,
    write_power_law_csv, write_spacing_csv,
};
use std::io::Write;
use std::path::{Path, PathBuf};

fn load_spectrum(path: &Path, stage: &str) -> Result<EigenSolution> {
    read_spectrum(path).map_err(|e| Error::Config(format!("{stage}: cannot read {}: {e}", path.display())))
}

fn load_net(path: &Path, stage: &str) -> Result<NetworkParameters> {
    load_model(path).map_err(|e| Error::Config(format!("{stage}: cannot read {}: {e}", path.display())))
}

fn load_ds(path: &Path, stage: &str) -> Result<Dataset> {
    read_dataset(path).map_err(|e| Error::Config(format!("{stage}: cannot read {}: {e}", path.display())))
}

/// Diagonalizes one mass ratio and writes the spectrum file. Prints the
/// level count, and the closed-form benchmark for the equal-mass case.
pub fn stage_diagonalize(
    mass: MassRatio,
    cutoff: u32,
    out: &Path,
    coefficients: bool,
    max_states: Option<usize>,
) -> Result<()> {
    let sol = solve_merged(
        cutoff,
        mass,
        SolveOptions {
            vectors: coefficients,
            max_states,
        },
    )?;
    write_spectrum(out, &sol, coefficients)?;
    println!(
        "diagonalize: {} levels at cutoff {} for 1/kappa = {}{}",
        sol.num_states(),
        cutoff,
        mass.inv_kappa(),
        if mass.inv_kappa() == 0.0 {
            " (diagonal path)"
        } else {
            ""
        }
    );
    if mass == MassRatio::equal_mass() {
        let bethe = bethe_energies(sol.num_states())?;
        let rep = benchmark_accuracy(&sol, &bethe)?;
        println!(
            "benchmark: {} levels with eps<1e-4, {} with eps<1e-3 (thresholds 726 / 3795)",
            rep.count_below_1e4, rep.count_below_1e3
        );
    }
    Ok(())
}

/// Spacing histogram of one parity sector, as CSV.
pub fn stage_stats_spacing(
    spectrum: &Path,
    parity: i8,
    levels: Option<usize>,
    bins: Option<usize>,
    references: bool,
    out: &Path,
) -> Result<()> {
    let sol = load_spectrum(spectrum, "stats spacing")?;
    let unfolded = unfold_sector(&sol, parity, levels)?;
    let hist = spacing_histogram(&unfolded, bins)?;
    atomic_write(out, |w| write_spacing_csv(w, &hist, references))?;
    println!(
        "stats spacing: {} spacings from parity {parity:+}, {} bins -> {}",
        unfolded.levels.len() - 1,
        hist.num_bins(),
        out.display()
    );
    Ok(())
}

/// Minimal-gap curve averaged over spectra, with its power-law fit.
pub fn stage_stats_deltamin(
    spectra: &[PathBuf],
    parity: i8,
    levels: usize,
    n_min: usize,
    points: usize,
    out: &Path,
    fit_out: Option<&Path>,
) -> Result<()> {
    if spectra.is_empty() {
        return Err(Error::Config("stats deltamin: no spectrum files".into()));
    }
    let unfolded = spectra
        .iter()
        .map(|p| unfold_sector(&load_spectrum(p, "stats deltamin")?, parity, Some(levels)))
        .collect::<Result<Vec<_>>>()?;
    let grid: Vec<usize> = (0..points)
        .map(|i| {
            ((n_min as f64) * ((levels as f64 - 1.0) / n_min as f64).powf(i as f64 / (points - 1) as f64))
                .round() as usize
        })
        .collect();
    let curve = delta_min_average(&unfolded, &grid)?;
    let n: Vec<f64> = curve.n.iter().map(|&v| v as f64).collect();
    let (amplitude, exponent) = fit_power_law(&n, &curve.values)?;
    atomic_write(out, |w| write_delta_min_csv(w, &curve))?;
    if let Some(fp) = fit_out {
        atomic_write(fp, |w| write_power_law_csv(w, amplitude, exponent))?;
    }
    println!(
        "stats deltamin: {} spectra, fit amplitude {amplitude:.4}, exponent {exponent:.4} -> {}",
        spectra.len(),
        out.display()
    );
    Ok(())
}

/// Amplitude histogram of one state with the parameter-free Gaussian
/// reference column: `bin_left,bin_right,density,gaussian`.
pub fn stage_stats_amplitude(
    spectrum: &Path,
    state: usize,
    resolution: usize,
    bins: Option<usize>,
    out: &Path,
) -> Result<()> {
    let sol = load_spectrum(spectrum, "stats amplitude")?;
    let grid = rasterize(&sol, state, resolution, GridKind::Wavefunction)?;
    let hist = amplitude_histogram(&grid, bins)?;
    atomic_write(out, |w| {
        writeln!(w, "bin_left,bin_right,density,gaussian")?;
        for i in 0..hist.num_bins() {
            let (l, r) = (hist.edges[i], hist.edges[i + 1]);
            let mid = 0.5 * (l + r);
            // the amplitude law folds the Gaussian onto |psi| >= 0
            let reference = 2.0 * gaussian_prediction(mid, crate::BOX_LENGTH);
            writeln!(w, "{},{},{},{}", l, r, hist.densities[i], reference)?;
        }
        Ok(())
    })?;
    println!(
        "stats amplitude: state {state} at {resolution}x{resolution} -> {}",
        out.display()
    );
    Ok(())
}

/// Builds the labeled dataset from spectrum files with coefficients.
pub fn stage_dataset_build(spectra: &[PathBuf], cfg: &RunConfig, out: &Path) -> Result<()> {
    let sols = spectra
        .iter()
        .map(|p| load_spectrum(p, "dataset build"))
        .collect::<Result<Vec<_>>>()?;
    for (p, s) in spectra.iter().zip(&sols) {
        if s.coefficients.is_none() {
            return Err(Error::Config(format!(
                "dataset build: {} has no coefficients",
                p.display()
            )));
        }
    }
    let refs: Vec<&EigenSolution> = sols.iter().collect();
    let ds = build_dataset(
        &refs,
        cfg.state_range(),
        cfg.resolution,
        GridKind::Density,
        cfg.split_seed,
    )?;
    write_dataset(out, &ds)?;
    write_sidecar(out, "dataset-build", cfg)?;
    println!(
        "dataset build: {} records ({} train / {} test) -> {}",
        ds.len(),
        ds.train.len(),
        ds.test.len(),
        out.display()
    );
    Ok(())
}

fn history_csv(history: &TrainingHistory, out: &Path) -> Result<()> {
    atomic_write(out, |w| {
        writeln!(w, "epoch,train_loss,train_accuracy,test_accuracy")?;
        for h in history {
            writeln!(
                w,
                "{},{},{},{}",
                h.epoch, h.train_loss, h.train_accuracy, h.test_accuracy
            )?;
        }
        Ok(())
    })
}

/// Trains ensemble member `member` on a dataset file and writes the model.
pub fn stage_train(
    dataset: &Path,
    cfg: &RunConfig,
    member: usize,
    out: &Path,
    history_out: Option<&Path>,
) -> Result<()> {
    let ds = load_ds(dataset, "train")?;
    if ds.resolution() != cfg.resolution {
        return Err(Error::Config(format!(
            "train: dataset resolution {} does not match configured resolution {}",
            ds.resolution(),
            cfg.resolution
        )));
    }
    let (net, history) = train(&ds, &cfg.architecture(), &cfg.training(member))?;
    save_model(out, &net)?;
    write_sidecar(out, "train", cfg)?;
    if let Some(hp) = history_out {
        history_csv(&history, hp)?;
    }
    let last = history.last().expect("at least one epoch");
    println!(
        "train: member {member}, {} epochs, train accuracy {:.4}, test accuracy {:.4} -> {}",
        history.len(),
        last.train_accuracy,
        last.test_accuracy,
        out.display()
    );
    Ok(())
}

/// Evaluates a model on a dataset split and prints the report.
pub fn stage_eval(model: &Path, dataset: &Path, split: &str) -> Result<()> {
    let net = load_net(model, "eval")?;
    let ds = load_ds(dataset, "eval")?;
    if ds.resolution() != net.spec.input_resolution {
        return Err(Error::Config(format!(
            "eval: dataset resolution {} does not match model input {}",
            ds.resolution(),
            net.spec.input_resolution
        )));
    }
    let indices: Vec<u32> = match split {
        "train" => ds.train.clone(),
        "test" => ds.test.clone(),
        "all" => (0..ds.len() as u32).collect(),
        _ => {
            return Err(Error::Config(format!(
                "eval: unknown split '{split}' (train, test, or all)"
            )))
        }
    };
    let images: Vec<_> = indices
        .iter()
        .map(|&i| ds.records[i as usize].grid.to_f32())
        .collect();
    let report = evaluate(
        &net,
        images.iter().zip(&indices).map(|(image, &i)| EvalCase {
            image,
            target: ds.records[i as usize].label.class_index(),
        }),
    )?;
    println!(
        "eval: split {split}, {} cases, accuracy {:.4}",
        indices.len(),
        report.accuracy
    );
    for (c, name) in [(0usize, "integrable"), (1, "non-integrable")] {
        match report.per_class[c] {
            Some(a) => println!("eval: {name} accuracy {a:.4}"),
            None => println!("eval: {name} accuracy absent (no cases)"),
        }
    }
    println!(
        "eval: confusion [[{}, {}], [{}, {}]]",
        report.confusion[0][0], report.confusion[0][1], report.confusion[1][0], report.confusion[1][1]
    );
    Ok(())
}

/// Mass scan of an ensemble over spectrum files.
pub fn stage_experiment_mass(
    models: &[PathBuf],
    spectra: &[PathBuf],
    cfg: &RunConfig,
    out: &Path,
) -> Result<()> {
    let ensemble = models
        .iter()
        .map(|p| load_net(p, "experiment mass"))
        .collect::<Result<Vec<_>>>()?;
    let sols = spectra
        .iter()
        .map(|p| load_spectrum(p, "experiment mass"))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&EigenSolution> = sols.iter().collect();
    let scan = mass_scan(&ensemble, &refs, cfg.state_range(), cfg.resolution)?;
    atomic_write(out, |w| ecsv::write_mass_scan_csv(w, &scan))?;
    write_sidecar(out, "experiment-mass", cfg)?;
    println!(
        "experiment mass: {} mass ratios x {} models -> {}",
        scan.points.len(),
        ensemble.len(),
        out.display()
    );
    Ok(())
}

/// Scale scan of one model over the dataset.
pub fn stage_experiment_alpha(
    model: &Path,
    dataset: &Path,
    alphas: &[f64],
    cfg: &RunConfig,
    out: &Path,
) -> Result<()> {
    let net = load_net(model, "experiment alpha")?;
    let ds = load_ds(dataset, "experiment alpha")?;
    let scan = alpha_scan(&net, &ds, alphas)?;
    atomic_write(out, |w| ecsv::write_alpha_scan_csv(w, &scan))?;
    write_sidecar(out, "experiment-alpha", cfg)?;
    println!(
        "experiment alpha: {} scale factors -> {}",
        alphas.len(),
        out.display()
    );
    Ok(())
}

/// Rebuilds the wave-function grids of every dataset record from the
/// spectra that produced it.
fn dataset_wavefunctions(
    ds: &Dataset,
    sols: &[EigenSolution],
    resolution: usize,
    stage: &str,
) -> Result<Vec<(PixelGrid, Label)>> {
    let mut rasterizers: Vec<Rasterizer> = Vec::with_capacity(sols.len());
    for sol in sols {
        rasterizers.push(Rasterizer::new(sol.cutoff, resolution)?);
    }
    let mut grids = Vec::with_capacity(ds.len());
    for rec in &ds.records {
        let Some(k) = sols
            .iter()
            .position(|s| s.mass.inv_kappa() == rec.inv_kappa)
        else {
            return Err(Error::Config(format!(
                "{stage}: no spectrum provided for source 1/kappa = {}",
                rec.inv_kappa
            )));
        };
        grids.push((
            rasterizers[k].state(&sols[k], rec.state_index as usize, GridKind::Wavefunction)?,
            rec.label,
        ));
    }
    Ok(grids)
}

/// Noise scan: perturbs the wave functions of all dataset records.
#[allow(clippy::too_many_arguments)]
pub fn stage_experiment_noise(
    model: &Path,
    dataset: &Path,
    spectra: &[PathBuf],
    sigmas: &[f64],
    mode: NoiseMode,
    seed: u64,
    cfg: &RunConfig,
    out: &Path,
) -> Result<()> {
    let net = load_net(model, "experiment noise")?;
    let ds = load_ds(dataset, "experiment noise")?;
    let sols = spectra
        .iter()
        .map(|p| load_spectrum(p, "experiment noise"))
        .collect::<Result<Vec<_>>>()?;
    let grids = dataset_wavefunctions(&ds, &sols, ds.resolution(), "experiment noise")?;
    let scan = noise_scan(&net, &grids, sigmas, mode, seed)?;
    atomic_write(out, |w| ecsv::write_noise_scan_csv(w, &scan))?;
    write_sidecar(out, "experiment-noise", cfg)?;
    println!(
        "experiment noise: {} states x {} sigmas -> {}",
        grids.len(),
        sigmas.len(),
        out.display()
    );
    Ok(())
}

/// Random-image study.
pub fn stage_experiment_random(
    model: &Path,
    count: usize,
    zero_fractions: &[f64],
    distributions: &[NoiseDistribution],
    seed: u64,
    cfg: &RunConfig,
    out: &Path,
) -> Result<()> {
    let net = load_net(model, "experiment random")?;
    let rows = random_image_study(&net, count, zero_fractions, distributions, seed)?;
    atomic_write(out, |w| ecsv::write_random_study_csv(w, &rows))?;
    write_sidecar(out, "experiment-random", cfg)?;
    for row in &rows {
        println!(
            "experiment random: zero fraction {:.2}, {}: {:.4} classified non-integrable",
            row.zero_fraction,
            row.distribution.name(),
            row.frac_nonintegrable
        );
    }
    println!("experiment random -> {}", out.display());
    Ok(())
}

/// Bosonic out-of-distribution test.
pub fn stage_experiment_bosonic(
    models: &[PathBuf],
    cfg: &RunConfig,
    out: &Path,
) -> Result<()> {
    let ensemble = models
        .iter()
        .map(|p| load_net(p, "experiment bosonic"))
        .collect::<Result<Vec<_>>>()?;
    let report = bosonic_classification(&ensemble, cfg.state_range(), cfg.resolution)?;
    atomic_write(out, |w| ecsv::write_bosonic_csv(w, &report))?;
    write_sidecar(out, "experiment-bosonic", cfg)?;
    println!(
        "experiment bosonic: fraction integrable mean {:.4} (band {:.4}..{:.4}) -> {}",
        report.mean,
        report.min,
        report.max,
        out.display()
    );
    Ok(())
}

/// Leave-out influence sweep.
#[allow(clippy::too_many_arguments)]
pub fn stage_experiment_loo(
    dataset: &Path,
    spectra: &[PathBuf],
    cfg: &RunConfig,
    singles: usize,
    blocks: usize,
    block_len: usize,
    source_kappa: f64,
    target_energy: f64,
    draw_seed: u64,
    out: &Path,
) -> Result<()> {
    let ds = load_ds(dataset, "experiment loo")?;
    let sols = spectra
        .iter()
        .map(|p| load_spectrum(p, "experiment loo"))
        .collect::<Result<Vec<_>>>()?;
    let mut energies = Vec::with_capacity(ds.len());
    for rec in &ds.records {
        let Some(sol) = sols.iter().find(|s| s.mass.inv_kappa() == rec.inv_kappa) else {
            return Err(Error::Config(format!(
                "experiment loo: no spectrum for source 1/kappa = {}",
                rec.inv_kappa
            )));
        };
        energies.push(sol.energies[rec.state_index as usize]);
    }

    let spec = cfg.architecture();
    let training = cfg.training(0);
    let (baseline, _) = train(&ds, &spec, &training)?;
    let source_inv = 1.0 / source_kappa;
    let test_record = select_test_state(
        &ds,
        &energies,
        &baseline,
        Label::NonIntegrable,
        target_energy,
        0.99,
    )?;
    let test_image = ds.records[test_record].grid.to_f32();
    println!(
        "experiment loo: test record {} (1/kappa {}, state {}, energy {:.2})",
        test_record,
        ds.records[test_record].inv_kappa,
        ds.records[test_record].state_index,
        energies[test_record]
    );

    let mut betas = vec![Vec::new()]; // the empty control set
    betas.extend(singleton_betas(&ds, source_inv, singles, draw_seed)?);
    betas.extend(block_betas(&ds, source_inv, block_len, blocks, draw_seed + 1)?);
    let results = leave_out_influence(
        &ds,
        &energies,
        &spec,
        &training,
        &betas,
        &test_image,
        Some(&baseline),
    )?;
    atomic_write(out, |w| ecsv::write_loo_csv(w, &results))?;
    write_sidecar(out, "experiment-loo", cfg)?;

    let nonempty: Vec<_> = results.iter().filter(|r| r.beta_size > 0).collect();
    let xs: Vec<f64> = nonempty.iter().map(|r| r.beta_first_energy).collect();
    let ys: Vec<f64> = nonempty.iter().map(|r| r.f1_diff.abs()).collect();
    let rho = rank_correlation(&xs, &ys);
    println!(
        "experiment loo: {} retrainings, energy-influence rank correlation {:.4} -> {}",
        nonempty.len(),
        rho,
        out.display()
    );
    Ok(())
}

/// Adversarial attack over the correctly classified test states of one
/// label, toward the opposite label.
#[allow(clippy::too_many_arguments)]
pub fn stage_experiment_attack(
    model: &Path,
    dataset: &Path,
    from_label: Label,
    step_rel: f64,
    max_iters: usize,
    limit: Option<usize>,
    cfg: &RunConfig,
    out: &Path,
    pgm_dir: Option<&Path>,
) -> Result<()> {
    let net = load_net(model, "experiment attack")?;
    let ds = load_ds(dataset, "experiment attack")?;
    let target = match from_label {
        Label::Integrable => Label::NonIntegrable,
        Label::NonIntegrable => Label::Integrable,
    };
    let mut rows = Vec::new();
    let mut results = Vec::new();
    let mut exported = false;
    for &i in &ds.test {
        let rec = &ds.records[i as usize];
        if rec.label != from_label {
            continue;
        }
        let pred = crate::net::forward(&net, &rec.grid.to_f32())?;
        if pred.class_index() != from_label.class_index() {
            continue; // only attack correctly classified states
        }
        let result = adversarial_attack(&net, &rec.grid, target, step_rel, max_iters)?;
        if result.success && !exported {
            if let Some(dir) = pgm_dir {
                std::fs::create_dir_all(dir)?;
                write_pgm(&dir.join("attack_before.pgm"), &rec.grid)?;
                let after = PixelGrid::new(
                    result.perturbed.mapv(|v| v as f64),
                    GridKind::Density,
                )?;
                write_pgm(&dir.join("attack_after.pgm"), &after)?;
                let diff = PixelGrid::new(
                    (after.values() - rec.grid.values()).mapv(f64::abs),
                    GridKind::Density,
                )?;
                write_pgm(&dir.join("attack_diff.pgm"), &diff)?;
                exported = true;
            }
        }
        results.push((i, result));
        if let Some(lim) = limit {
            if results.len() >= lim {
                break;
            }
        }
    }
    for (i, r) in &results {
        rows.push((*i, r));
    }
    atomic_write(out, |w| ecsv::write_attack_csv(w, &rows))?;
    write_sidecar(out, "experiment-attack", cfg)?;
    let succeeded = results.iter().filter(|(_, r)| r.success).count();
    println!(
        "experiment attack: {}/{} states flipped within {} iterations -> {}",
        succeeded,
        results.len(),
        max_iters,
        out.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn diagonalize_and_spacing_stage_round_trip() {
        let dir = tempdir().unwrap();
        let spectrum = dir.path().join("k3_c20.qbs1");
        stage_diagonalize(
            MassRatio::from_kappa(3.0).unwrap(),
            20,
            &spectrum,
            false,
            None,
        )
        .unwrap();
        assert!(spectrum.exists());
        let csv = dir.path().join("spacing.csv");
        stage_stats_spacing(&spectrum, 1, None, Some(8), true, &csv).unwrap();
        let text = std::fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with("bin_left,bin_right,density,goe,poisson\n"));
        assert_eq!(text.lines().count(), 9);
    }

    #[test]
    fn eval_rejects_mismatched_resolution() {
        let dir = tempdir().unwrap();
        // dataset at 16x16 but a model expecting 8x8
        let heavy = solve_merged(16, MassRatio::infinite_impurity(), SolveOptions::default())
            .unwrap();
        let k2 = solve_merged(
            16,
            MassRatio::from_kappa(2.0).unwrap(),
            SolveOptions::default(),
        )
        .unwrap();
        let ds = build_dataset(&[&heavy, &k2], 2..12, 16, GridKind::Density, 1).unwrap();
        let ds_path = dir.path().join("d.qbd1");
        write_dataset(&ds_path, &ds).unwrap();
        let net = crate::net::he_init(
            &crate::net::ArchitectureSpec {
                input_resolution: 8,
                conv1_filters: 2,
                conv1_kernel: 3,
                conv2_filters: 2,
                conv2_kernel: 3,
                dense1_width: 4,
            },
            1,
        );
        let model_path = dir.path().join("m.qbn1");
        save_model(&model_path, &net).unwrap();
        let err = stage_eval(&model_path, &ds_path, "test").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn sidecar_written_next_to_output() {
        let dir = tempdir().unwrap();
        let heavy = solve_merged(14, MassRatio::infinite_impurity(), SolveOptions::default())
            .unwrap();
        let k2 = solve_merged(
            14,
            MassRatio::from_kappa(2.0).unwrap(),
            SolveOptions::default(),
        )
        .unwrap();
        let p1 = dir.path().join("a.qbs1");
        let p2 = dir.path().join("b.qbs1");
        write_spectrum(&p1, &heavy, true).unwrap();
        write_spectrum(&p2, &k2, true).unwrap();
        let mut cfg = RunConfig::default();
        cfg.set("resolution", "16").unwrap();
        cfg.set("state_lo", "2").unwrap();
        cfg.set("state_hi", "12").unwrap();
        let out = dir.path().join("ds.qbd1");
        stage_dataset_build(&[p1, p2], &cfg, &out).unwrap();
        let meta = std::fs::read_to_string(dir.path().join("ds.qbd1.meta")).unwrap();
        assert!(meta.starts_with("stage=dataset-build\n"));
        assert!(meta.contains(&format!("config_digest={}", cfg.digest())));
        assert!(meta.contains("resolution=16"));
    }
}
