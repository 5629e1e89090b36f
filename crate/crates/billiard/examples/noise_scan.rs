//! Noise resilience: multiplicative noise keeps nodal lines and only the
//! integrable class degrades; strong additive noise erases the state and
//! the classifier falls back to chance.

mod common;

use billiard::experiments::{noise_scan, NoiseMode};
use billiard::imaging::{GridKind, Rasterizer};

fn main() {
    let ds = common::dataset();
    let net = common::classifier(0);

    // rebuild the wave functions behind the dataset records
    let sols = [
        common::spectrum("k1", billiard::spectral::MassRatio::equal_mass()),
        common::spectrum("k2", billiard::spectral::MassRatio::from_kappa(2.0).unwrap()),
        common::spectrum("k5", billiard::spectral::MassRatio::from_kappa(5.0).unwrap()),
        common::spectrum("kinf", billiard::spectral::MassRatio::infinite_impurity()),
    ];
    let rasterizers: Vec<_> = sols
        .iter()
        .map(|s| Rasterizer::new(s.cutoff, 64).unwrap())
        .collect();
    let states: Vec<_> = ds
        .records
        .iter()
        .map(|rec| {
            let k = sols
                .iter()
                .position(|s| s.mass.inv_kappa() == rec.inv_kappa)
                .unwrap();
            (
                rasterizers[k]
                    .state(&sols[k], rec.state_index as usize, GridKind::Wavefunction)
                    .unwrap(),
                rec.label,
            )
        })
        .collect();

    let sigmas = [0.0, 0.25, 0.5, 1.0, 2.0];
    println!("multiplicative noise:");
    println!("{:>6} {:>12} {:>16} {:>8}", "sigma", "integrable", "non-integrable", "average");
    let mult = noise_scan(&net, &states, &sigmas, NoiseMode::Multiplicative, 9000).unwrap();
    for r in &mult.rows {
        println!(
            "{:>6} {:>12.4} {:>16.4} {:>8.4}",
            r.sigma, r.acc_integrable, r.acc_nonintegrable, r.acc_avg
        );
    }

    println!("\nadditive noise, weight G = 20:");
    println!("{:>6} {:>12} {:>16} {:>8}", "sigma", "integrable", "non-integrable", "average");
    let add = noise_scan(
        &net,
        &states,
        &[0.0, 0.5, 1.0],
        NoiseMode::Additive { weight: 20.0 },
        9001,
    )
    .unwrap();
    for r in &add.rows {
        println!(
            "{:>6} {:>12.4} {:>16.4} {:>8.4}",
            r.sigma, r.acc_integrable, r.acc_nonintegrable, r.acc_avg
        );
    }
}
