//! Shared fixtures for the acceptance suite: a disk cache of the expensive
//! artifacts (spectra, dataset, trained ensemble), built on demand and
//! reused across runs. Everything here is deterministic, so cached files
//! are equivalent to fresh ones.

#![allow(dead_code)]

use billiard::imaging::{
    build_dataset, read_dataset, write_dataset, Dataset, GridKind, Label, PixelGrid, Rasterizer,
};
use billiard::net::{
    load_model, save_model, train, ArchitectureSpec, NetworkParameters, TrainingConfig,
};
use billiard::spectral::{
    read_spectrum, solve_merged, write_spectrum, EigenSolution, MassRatio, SolveOptions,
};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

/// Seed of the deterministic train/test split.
pub const SPLIT_SEED: u64 = 7;
/// Number of independently seeded trainings in the ensemble.
pub const ENSEMBLE_SIZE: usize = 5;
/// States contributing to the dataset, in merged energy ordering.
pub const STATE_RANGE: std::ops::Range<usize> = 50..1050;
/// Coefficient rows kept in spectrum files (covers the state range).
pub const COEFF_STATES: usize = 1200;

/// Mass-ratio tags whose spectra keep eigenvector coefficients.
const COEFF_TAGS: [&str; 11] = [
    "k1", "k2", "k5", "kinf", "k1.05", "k1.1", "k1.25", "k1.5", "k3", "k4", "k10",
];

pub fn mass_of_tag(tag: &str) -> MassRatio {
    if tag == "kinf" {
        return MassRatio::infinite_impurity();
    }
    let kappa: f64 = tag
        .strip_prefix('k')
        .expect("tags look like k<value>")
        .parse()
        .expect("numeric mass-ratio tag");
    MassRatio::from_kappa(kappa).expect("kappa >= 1")
}

pub struct Lab {
    root: PathBuf,
    build_lock: Mutex<()>,
}

fn cache_root() -> PathBuf {
    if let Ok(dir) = std::env::var("BILLIARD_CACHE") {
        return PathBuf::from(dir);
    }
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join("target/billiard-cache")
}

impl Lab {
    pub fn get() -> &'static Lab {
        static LAB: OnceLock<Lab> = OnceLock::new();
        LAB.get_or_init(|| {
            let root = cache_root();
            std::fs::create_dir_all(root.join("qbs1")).expect("create cache dir");
            std::fs::create_dir_all(root.join("models")).expect("create cache dir");
            std::fs::create_dir_all(root.join("out")).expect("create cache dir");
            Lab {
                root,
                build_lock: Mutex::new(()),
            }
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Directory for experiment outputs produced during acceptance runs.
    pub fn out_dir(&self) -> PathBuf {
        self.root.join("out")
    }

    fn spectrum_path(&self, tag: &str, coeff: bool) -> PathBuf {
        let suffix = if coeff { "coeff" } else { "full" };
        self.root.join("qbs1").join(format!("{tag}_c130_{suffix}.qbs1"))
    }

    fn ensure_spectrum(&self, tag: &str, coeff: bool) {
        let path = self.spectrum_path(tag, coeff);
        if path.exists() {
            return;
        }
        let _guard = self.build_lock.lock().unwrap();
        if path.exists() {
            return;
        }
        let mass = mass_of_tag(tag);
        let with_vectors = COEFF_TAGS.contains(&tag);
        eprintln!("[lab] solving c=130 spectrum for {tag} (vectors: {with_vectors})");
        let t = std::time::Instant::now();
        let mut sol = solve_merged(
            130,
            mass,
            SolveOptions {
                vectors: with_vectors,
                max_states: None,
            },
        )
        .expect("c=130 eigensolve");
        let full_path = self.spectrum_path(tag, false);
        let full = EigenSolution {
            coefficients: None,
            ..sol.clone()
        };
        write_spectrum(&full_path, &full, false).expect("write spectrum");
        if with_vectors {
            sol.truncate(COEFF_STATES);
            write_spectrum(&self.spectrum_path(tag, true), &sol, true).expect("write spectrum");
        }
        eprintln!("[lab] solved {tag} in {:?}", t.elapsed());
    }

    /// All energies (no coefficients) of the c=130 solution for a tag.
    pub fn spectrum_full(&self, tag: &str) -> EigenSolution {
        self.ensure_spectrum(tag, false);
        read_spectrum(&self.spectrum_path(tag, false)).expect("read spectrum")
    }

    /// Lowest [`COEFF_STATES`] states with coefficients.
    pub fn spectrum_coeff(&self, tag: &str) -> EigenSolution {
        assert!(COEFF_TAGS.contains(&tag), "no coefficient spectrum for {tag}");
        self.ensure_spectrum(tag, true);
        read_spectrum(&self.spectrum_path(tag, true)).expect("read spectrum")
    }

    fn dataset_path(&self) -> PathBuf {
        self.root.join(format!(
            "dataset_r64_s{}-{}_seed{}.qbd1",
            STATE_RANGE.start, STATE_RANGE.end, SPLIT_SEED
        ))
    }

    /// The 4000-image density dataset at 64x64.
    pub fn dataset(&self) -> Dataset {
        let path = self.dataset_path();
        if !path.exists() {
            let sols: Vec<EigenSolution> = ["k1", "k2", "k5", "kinf"]
                .iter()
                .map(|t| self.spectrum_coeff(t))
                .collect();
            let _guard = self.build_lock.lock().unwrap();
            if !path.exists() {
                eprintln!("[lab] building dataset");
                let refs: Vec<&EigenSolution> = sols.iter().collect();
                let ds = build_dataset(&refs, STATE_RANGE, 64, GridKind::Density, SPLIT_SEED)
                    .expect("build dataset");
                write_dataset(&path, &ds).expect("write dataset");
            }
        }
        read_dataset(&path).expect("read dataset")
    }

    /// Training configuration of ensemble member `s`.
    pub fn train_config(s: usize) -> TrainingConfig {
        TrainingConfig {
            init_seed: 100 + s as u64,
            shuffle_seed: 200 + s as u64,
            ..Default::default()
        }
    }

    /// Training configuration of the leave-out sweep: identical seeds and
    /// hyperparameters across the 60 retrainings, at a shorter epoch budget
    /// so the sweep stays tractable.
    pub fn loo_config() -> TrainingConfig {
        TrainingConfig {
            epochs: 12,
            ..Self::train_config(0)
        }
    }

    /// Wave-function grids of every dataset record, rebuilt from the source
    /// spectra (labels attached).
    pub fn dataset_wavefunctions(&self) -> Vec<(PixelGrid, Label)> {
        let ds = self.dataset();
        let sols: Vec<EigenSolution> = ["k1", "k2", "k5", "kinf"]
            .iter()
            .map(|t| self.spectrum_coeff(t))
            .collect();
        let rasterizers: Vec<Rasterizer> = sols
            .iter()
            .map(|s| Rasterizer::new(s.cutoff, 64).expect("rasterizer"))
            .collect();
        ds.records
            .iter()
            .map(|rec| {
                let k = sols
                    .iter()
                    .position(|s| s.mass.inv_kappa() == rec.inv_kappa)
                    .expect("record source");
                (
                    rasterizers[k]
                        .state(&sols[k], rec.state_index as usize, GridKind::Wavefunction)
                        .expect("rasterize"),
                    rec.label,
                )
            })
            .collect()
    }

    /// Energies aligned with the dataset records.
    pub fn record_energies(&self) -> Vec<f64> {
        let ds = self.dataset();
        let sols: Vec<EigenSolution> = ["k1", "k2", "k5", "kinf"]
            .iter()
            .map(|t| self.spectrum_coeff(t))
            .collect();
        ds.records
            .iter()
            .map(|rec| {
                let sol = sols
                    .iter()
                    .find(|s| s.mass.inv_kappa() == rec.inv_kappa)
                    .expect("record source");
                sol.energies[rec.state_index as usize]
            })
            .collect()
    }

    fn model_path(&self, s: usize) -> PathBuf {
        self.root.join("models").join(format!("model_seed{s}.qbn1"))
    }

    /// One trained classifier per ensemble seed.
    pub fn ensemble(&self) -> Vec<NetworkParameters> {
        let spec = ArchitectureSpec::default();
        let missing: Vec<usize> = (0..ENSEMBLE_SIZE)
            .filter(|&s| !self.model_path(s).exists())
            .collect();
        if !missing.is_empty() {
            let ds = self.dataset();
            let _guard = self.build_lock.lock().unwrap();
            for s in missing {
                if self.model_path(s).exists() {
                    continue;
                }
                eprintln!("[lab] training ensemble member {s}");
                let t = std::time::Instant::now();
                let (net, history) =
                    train(&ds, &spec, &Self::train_config(s)).expect("training run");
                let last = history.last().unwrap();
                eprintln!(
                    "[lab] member {s}: test accuracy {:.4} in {:?}",
                    last.test_accuracy,
                    t.elapsed()
                );
                save_model(&self.model_path(s), &net).expect("save model");
            }
        }
        (0..ENSEMBLE_SIZE)
            .map(|s| load_model(&self.model_path(s)).expect("load model"))
            .collect()
    }
}

/// Prints the per-criterion verdict line.
pub fn report(number: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {:02} {:<28} {} {}",
        number,
        name,
        if pass { "PASS" } else { "FAIL" },
        detail
    );
}

/// Asserts with the standard reporting line.
pub fn check(number: usize, name: &str, pass: bool, detail: &str) {
    report(number, name, pass, detail);
    assert!(pass, "acceptance {number} {name}: {detail}");
}
