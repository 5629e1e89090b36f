//! Command-line surface: thin argument parsing and dispatch into the
//! library's pipeline stages.

use billiard::error::Result;
use billiard::experiments::NoiseMode;
use billiard::imaging::{Label, NoiseDistribution};
use billiard::pipeline::{self, Preset, RunConfig};
use billiard::spectral::MassRatio;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "billiard",
    about = "Triangular quantum billiard laboratory: spectra, level statistics, state images, and a morphology classifier",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Named scale preset (fast, ci, full).
    #[arg(long)]
    preset: Option<String>,
    /// Key=value configuration file ('#' comments).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Explicit key=value override (repeatable; applied after the file).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.preset {
            Some(name) => RunConfig::with_preset(Preset::parse(name)?),
            None => RunConfig::default(),
        };
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for assignment in &self.sets {
            let (key, value) = assignment.split_once('=').ok_or_else(|| {
                billiard::Error::Config(format!("--set expects key=value, got '{assignment}'"))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        eprintln!("resolved config (digest {}):", cfg.digest());
        for line in cfg.resolved_text().lines() {
            eprintln!("  {line}");
        }
        Ok(cfg)
    }
}

fn parse_inv_kappa(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("1/kappa must lie in [0, 1], got {v}"));
    }
    Ok(v)
}

fn parse_kappa(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !(v >= 1.0) {
        return Err(format!("kappa must be >= 1, got {v}"));
    }
    Ok(v)
}

#[derive(Subcommand)]
enum Command {
    /// Diagonalize one mass ratio and write a spectrum file.
    Diagonalize {
        /// Inverse mass ratio in [0, 1] (0 = infinitely heavy impurity).
        #[arg(long, value_parser = parse_inv_kappa, conflicts_with = "kappa")]
        inv_kappa: Option<f64>,
        /// Mass ratio kappa >= 1.
        #[arg(long, value_parser = parse_kappa)]
        kappa: Option<f64>,
        /// Basis cutoff.
        #[arg(long, default_value_t = 130)]
        cutoff: u32,
        /// Store eigenvector coefficients as well as energies.
        #[arg(long)]
        coefficients: bool,
        /// Keep only the lowest N states.
        #[arg(long)]
        max_states: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Level statistics and amplitude histograms.
    Stats {
        #[command(subcommand)]
        what: StatsCommand,
    },
    /// Dataset construction.
    Dataset {
        #[command(subcommand)]
        what: DatasetCommand,
    },
    /// Train a classifier on a dataset file.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        /// Ensemble member index (offsets the seeds).
        #[arg(long, default_value_t = 0)]
        member: usize,
        #[arg(long)]
        out: PathBuf,
        /// Optional per-epoch history CSV.
        #[arg(long)]
        history: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Evaluate a model on a dataset split.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Which split to evaluate: train, test, or all.
        #[arg(long, default_value = "test")]
        split: String,
    },
    /// The numerical experiments on a trained network.
    Experiment {
        #[command(subcommand)]
        what: ExperimentCommand,
    },
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Nearest-neighbor spacing histogram of one parity sector.
    Spacing {
        #[arg(long)]
        spectrum: PathBuf,
        /// Parity sector: +1 or -1.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        parity: i8,
        /// Use only the lowest N sector levels.
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        bins: Option<usize>,
        /// Add Wigner/Poisson reference columns.
        #[arg(long)]
        refs: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Minimal-gap curve averaged over spectra, with power-law fit.
    Deltamin {
        /// Spectrum files to average over.
        #[arg(long, required = true, num_args = 1..)]
        spectra: Vec<PathBuf>,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        parity: i8,
        /// Sector levels used per spectrum.
        #[arg(long, default_value_t = 2000)]
        levels: usize,
        /// Smallest level count in the curve.
        #[arg(long, default_value_t = 100)]
        n_min: usize,
        /// Number of grid points.
        #[arg(long, default_value_t = 24)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
        /// Optional one-line fit summary CSV.
        #[arg(long)]
        fit_out: Option<PathBuf>,
    },
    /// Amplitude histogram of one state with the Gaussian reference.
    Amplitude {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long, default_value_t = 500)]
        state: usize,
        #[arg(long, default_value_t = 315)]
        resolution: usize,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum DatasetCommand {
    /// Rasterize labeled states from spectrum files with coefficients.
    Build {
        /// Spectrum files (one per source mass ratio).
        #[arg(long, required = true, num_args = 1..)]
        spectra: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Ensemble accuracy against mass ratio.
    Mass {
        #[arg(long, required = true, num_args = 1..)]
        models: Vec<PathBuf>,
        #[arg(long, required = true, num_args = 1..)]
        spectra: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Accuracy against image scale.
    Alpha {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, num_args = 1.., default_values_t = [0.25, 0.5, 0.8, 1.0, 1.25, 2.0, 4.0])]
        alphas: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Accuracy against noise strength.
    Noise {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Spectra that produced the dataset (for wave functions).
        #[arg(long, required = true, num_args = 1..)]
        spectra: Vec<PathBuf>,
        #[arg(long, num_args = 1.., default_values_t = [0.0, 0.1, 0.25, 0.5, 1.0, 2.0])]
        sigmas: Vec<f64>,
        /// Noise mode: multiplicative or additive.
        #[arg(long, default_value = "multiplicative")]
        mode: String,
        /// Relative weight G of the additive field.
        #[arg(long, default_value_t = 1.0)]
        weight: f64,
        #[arg(long, default_value_t = 9000)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Classification of synthetic random images.
    Random {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, num_args = 1.., default_values_t = [0.0, 0.35])]
        zero_fractions: Vec<f64>,
        /// gaussian, laplace, uniform (repeatable).
        #[arg(long, num_args = 1.., default_values = ["gaussian", "laplace", "uniform"])]
        distributions: Vec<String>,
        #[arg(long, default_value_t = 4000)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Classification of box-boson states.
    Bosonic {
        #[arg(long, required = true, num_args = 1..)]
        models: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Leave-out influence sweep (retrains per left-out set).
    Loo {
        #[arg(long)]
        dataset: PathBuf,
        /// Spectra that produced the dataset (for state energies).
        #[arg(long, required = true, num_args = 1..)]
        spectra: Vec<PathBuf>,
        #[arg(long, default_value_t = 40)]
        singles: usize,
        #[arg(long, default_value_t = 20)]
        blocks: usize,
        #[arg(long, default_value_t = 10)]
        block_len: usize,
        /// Source mass ratio the left-out sets are drawn from.
        #[arg(long, default_value_t = 5.0, value_parser = parse_kappa)]
        source_kappa: f64,
        /// Pick the test state near this energy.
        #[arg(long, default_value_t = 534.86)]
        target_energy: f64,
        #[arg(long, default_value_t = 777)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Gradient-sign attacks on correctly classified test states.
    Attack {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Label under attack: integrable or non-integrable states.
        #[arg(long, default_value = "integrable")]
        from: String,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        /// Attack at most this many states.
        #[arg(long)]
        limit: Option<usize>,
        /// Directory for example before/after/difference images.
        #[arg(long)]
        pgm_dir: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Diagonalize {
            inv_kappa,
            kappa,
            cutoff,
            coefficients,
            max_states,
            out,
        } => {
            let mass = match (inv_kappa, kappa) {
                (Some(ik), None) => MassRatio::from_inv_kappa(ik)?,
                (None, Some(k)) => MassRatio::from_kappa(k)?,
                _ => {
                    return Err(billiard::Error::Config(
                        "diagonalize: give exactly one of --inv-kappa or --kappa".into(),
                    ))
                }
            };
            pipeline::stage_diagonalize(mass, cutoff, &out, coefficients, max_states)
        }
        Command::Stats { what } => match what {
            StatsCommand::Spacing {
                spectrum,
                parity,
                levels,
                bins,
                refs,
                out,
            } => pipeline::stage_stats_spacing(&spectrum, parity, levels, bins, refs, &out),
            StatsCommand::Deltamin {
                spectra,
                parity,
                levels,
                n_min,
                points,
                out,
                fit_out,
            } => pipeline::stage_stats_deltamin(
                &spectra,
                parity,
                levels,
                n_min,
                points,
                &out,
                fit_out.as_deref(),
            ),
            StatsCommand::Amplitude {
                spectrum,
                state,
                resolution,
                bins,
                out,
            } => pipeline::stage_stats_amplitude(&spectrum, state, resolution, bins, &out),
        },
        Command::Dataset { what } => match what {
            DatasetCommand::Build {
                spectra,
                out,
                config,
            } => {
                let cfg = config.resolve()?;
                pipeline::stage_dataset_build(&spectra, &cfg, &out)
            }
        },
        Command::Train {
            dataset,
            member,
            out,
            history,
            config,
        } => {
            let cfg = config.resolve()?;
            pipeline::stage_train(&dataset, &cfg, member, &out, history.as_deref())
        }
        Command::Eval {
            model,
            dataset,
            split,
        } => pipeline::stage_eval(&model, &dataset, &split),
        Command::Experiment { what } => match what {
            ExperimentCommand::Mass {
                models,
                spectra,
                out,
                config,
            } => {
                let cfg = config.resolve()?;
                pipeline::stage_experiment_mass(&models, &spectra, &cfg, &out)
            }
            ExperimentCommand::Alpha {
                model,
                dataset,
                alphas,
                out,
                config,
            } => {
                let cfg = config.resolve()?;
                pipeline::stage_experiment_alpha(&model, &dataset, &alphas, &cfg, &out)
            }
            ExperimentCommand::Noise {
                model,
                dataset,
                spectra,
                sigmas,
                mode,
                weight,
                seed,
                out,
                config,
            } => {
                let cfg = config.resolve()?;
                let mode = match mode.as_str() {
                    "multiplicative" => NoiseMode::Multiplicative,
                    "additive" => NoiseMode::Additive { weight },
                    other => {
                        return Err(billiard::Error::Config(format!(
                            "experiment noise: unknown mode '{other}'"
                        )))
                    }
                };
                pipeline::stage_experiment_noise(
                    &model, &dataset, &spectra, &sigmas, mode, seed, &cfg, &out,
                )
            }
            ExperimentCommand::Random {
                model,
                count,
                zero_fractions,
                distributions,
                seed,
                out,
                config,
            } => {
                let cfg = config.resolve()?;
                let dists = distributions
                    .iter()
                    .map(|s| NoiseDistribution::parse(s))
                    .collect::<Result<Vec<_>>>()?;
                pipeline::stage_experiment_random(
                    &model,
                    count,
                    &zero_fractions,
                    &dists,
                    seed,
                    &cfg,
                    &out,
                )
            }
            ExperimentCommand::Bosonic {
                models,
                out,
                config,
            } => {
                let cfg = config.resolve()?;
                pipeline::stage_experiment_bosonic(&models, &cfg, &out)
            }
            ExperimentCommand::Loo {
                dataset,
                spectra,
                singles,
                blocks,
                block_len,
                source_kappa,
                target_energy,
                seed,
                out,
                config,
            } => {
                let cfg = config.resolve()?;
                pipeline::stage_experiment_loo(
                    &dataset,
                    &spectra,
                    &cfg,
                    singles,
                    blocks,
                    block_len,
                    source_kappa,
                    target_energy,
                    seed,
                    &out,
                )
            }
            ExperimentCommand::Attack {
                model,
                dataset,
                from,
                step,
                max_iters,
                limit,
                pgm_dir,
                out,
                config,
            } => {
                let cfg = config.resolve()?;
                let from_label = match from.as_str() {
                    "integrable" => Label::Integrable,
                    "non-integrable" | "nonintegrable" => Label::NonIntegrable,
                    other => {
                        return Err(billiard::Error::Config(format!(
                            "experiment attack: unknown label '{other}'"
                        )))
                    }
                };
                pipeline::stage_experiment_attack(
                    &model,
                    &dataset,
                    from_label,
                    step,
                    max_iters,
                    limit,
                    &cfg,
                    &out,
                    pgm_dir.as_deref(),
                )
            }
        },
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
