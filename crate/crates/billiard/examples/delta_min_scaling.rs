//! Minimal level gap against the number of considered levels: averaging
//! over mass ratios recovers the random-matrix 1/sqrt(N) decay that no
//! single spectrum shows cleanly.

mod common;

use billiard::spectral::MassRatio;
use billiard::stats::{delta_min_average, fit_power_law, unfold_sector, write_delta_min_csv};

fn main() {
    let kappas = [1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0];
    let spectra: Vec<_> = kappas
        .iter()
        .map(|&k| {
            let sol = common::spectrum(&format!("k{k}"), MassRatio::from_kappa(k).unwrap());
            unfold_sector(&sol, 1, Some(800)).expect("unfold")
        })
        .collect();

    let grid: Vec<usize> = (0..16)
        .map(|i| (50.0 * (799.0f64 / 50.0).powf(i as f64 / 15.0)).round() as usize)
        .collect();
    let curve = delta_min_average(&spectra, &grid).expect("average");
    let n: Vec<f64> = curve.n.iter().map(|&v| v as f64).collect();
    let (amplitude, exponent) = fit_power_law(&n, &curve.values).expect("fit");

    println!("{:>6} {:>12}", "N", "delta_min");
    for (n, v) in curve.n.iter().zip(&curve.values) {
        println!("{:>6} {:>12.6}", n, v);
    }
    println!("\npower-law fit: {amplitude:.4} * N^({exponent:.4})  [random-matrix expectation: exponent -1/2]");

    let path = common::out_dir().join("delta_min.csv");
    let mut file = std::fs::File::create(&path).unwrap();
    write_delta_min_csv(&mut file, &curve).unwrap();
    println!("curve written to {}", path.display());
}
