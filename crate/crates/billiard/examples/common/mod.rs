//! Shared glue for the runnable examples: desk-scale artifacts cached under
//! `./out/` so the examples stay fast after the first run.

#![allow(dead_code)]

use billiard::imaging::{build_dataset, read_dataset, write_dataset, Dataset, GridKind};
use billiard::net::{load_model, save_model, train, ArchitectureSpec, NetworkParameters, TrainingConfig};
use billiard::spectral::{read_spectrum, solve_merged, write_spectrum, EigenSolution, MassRatio, SolveOptions};
use std::path::PathBuf;

/// Desk-scale cutoff: spectra solve in seconds.
pub const FAST_CUTOFF: u32 = 60;
/// Desk-scale dataset states, 250 per source.
pub const FAST_STATES: std::ops::Range<usize> = 50..300;

pub fn out_dir() -> PathBuf {
    let dir = PathBuf::from("out");
    std::fs::create_dir_all(&dir).expect("create ./out");
    dir
}

/// Cached desk-scale spectrum with coefficients.
pub fn spectrum(kappa_label: &str, mass: MassRatio) -> EigenSolution {
    let path = out_dir().join(format!("{kappa_label}_c{FAST_CUTOFF}.qbs1"));
    if !path.exists() {
        eprintln!("[example] diagonalizing {kappa_label} at cutoff {FAST_CUTOFF}");
        let sol = solve_merged(FAST_CUTOFF, mass, SolveOptions::default()).expect("eigensolve");
        write_spectrum(&path, &sol, true).expect("write spectrum");
    }
    read_spectrum(&path).expect("read spectrum")
}

/// Cached desk-scale dataset: kappa in {1, 2, 5, inf}, 1000 images at 64x64.
pub fn dataset() -> Dataset {
    let path = out_dir().join("dataset_fast.qbd1");
    if !path.exists() {
        let sols = [
            spectrum("k1", MassRatio::equal_mass()),
            spectrum("k2", MassRatio::from_kappa(2.0).unwrap()),
            spectrum("k5", MassRatio::from_kappa(5.0).unwrap()),
            spectrum("kinf", MassRatio::infinite_impurity()),
        ];
        let refs: Vec<&EigenSolution> = sols.iter().collect();
        eprintln!("[example] rasterizing the desk-scale dataset");
        let ds = build_dataset(&refs, FAST_STATES, 64, GridKind::Density, 7).expect("dataset");
        write_dataset(&path, &ds).expect("write dataset");
    }
    read_dataset(&path).expect("read dataset")
}

/// Cached desk-scale classifier (reduced epochs; accuracy is still high).
pub fn classifier(member: usize) -> NetworkParameters {
    let path = out_dir().join(format!("model_fast_{member}.qbn1"));
    if !path.exists() {
        let ds = dataset();
        let config = TrainingConfig {
            epochs: 12,
            init_seed: 100 + member as u64,
            shuffle_seed: 200 + member as u64,
            ..Default::default()
        };
        eprintln!("[example] training classifier member {member} (12 epochs)");
        let (net, history) = train(&ds, &ArchitectureSpec::default(), &config).expect("training");
        let last = history.last().unwrap();
        eprintln!(
            "[example] member {member}: train accuracy {:.3}, test accuracy {:.3}",
            last.train_accuracy, last.test_accuracy
        );
        save_model(&path, &net).expect("save model");
    }
    load_model(&path).expect("load model")
}
