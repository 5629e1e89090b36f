//! Leave-out influence at desk scale: retrain without single states or
//! blocks of ten and watch how little any one training state matters.

mod common;

use billiard::experiments::{
    block_betas, leave_out_influence, rank_correlation, select_test_state, singleton_betas,
};
use billiard::imaging::Label;
use billiard::net::{train, ArchitectureSpec, TrainingConfig};
use billiard::spectral::MassRatio;

fn main() {
    let ds = common::dataset();
    let sols = [
        common::spectrum("k1", MassRatio::equal_mass()),
        common::spectrum("k2", MassRatio::from_kappa(2.0).unwrap()),
        common::spectrum("k5", MassRatio::from_kappa(5.0).unwrap()),
        common::spectrum("kinf", MassRatio::infinite_impurity()),
    ];
    let energies: Vec<f64> = ds
        .records
        .iter()
        .map(|rec| {
            let sol = sols
                .iter()
                .find(|s| s.mass.inv_kappa() == rec.inv_kappa)
                .unwrap();
            sol.energies[rec.state_index as usize]
        })
        .collect();

    let spec = ArchitectureSpec::default();
    let config = TrainingConfig {
        epochs: 8,
        ..Default::default()
    };
    eprintln!("[example] training the baseline");
    let (baseline, _) = train(&ds, &spec, &config).unwrap();
    let test_record = select_test_state(&ds, &energies, &baseline, Label::NonIntegrable, 500.0, 0.9)
        .expect("confident test state");
    println!(
        "test state: record {test_record} (1/kappa {}, energy {:.2})",
        ds.records[test_record].inv_kappa, energies[test_record]
    );

    let mut betas = vec![Vec::new()];
    betas.extend(singleton_betas(&ds, 0.2, 6, 777).unwrap());
    betas.extend(block_betas(&ds, 0.2, 10, 3, 778).unwrap());
    eprintln!("[example] running {} retrainings", betas.len() - 1);
    let results = leave_out_influence(
        &ds,
        &energies,
        &spec,
        &config,
        &betas,
        &ds.records[test_record].grid.to_f32(),
        Some(&baseline),
    )
    .unwrap();

    println!("{:>14} {:>6} {:>12}", "first energy", "size", "f1 change");
    for r in &results {
        println!(
            "{:>14.2} {:>6} {:>12.2e}",
            r.beta_first_energy, r.beta_size, r.f1_diff
        );
    }
    let swept: Vec<_> = results.iter().filter(|r| r.beta_size > 0).collect();
    let xs: Vec<f64> = swept.iter().map(|r| r.beta_first_energy).collect();
    let ys: Vec<f64> = swept.iter().map(|r| r.f1_diff.abs()).collect();
    println!(
        "\nrank correlation of |change| with left-out energy: {:.3} (no energy preference)",
        rank_correlation(&xs, &ys)
    );
}
