//! What does the network see in pure noise? Random density images with
//! enough zero pixels are read as non-integrable regardless of the
//! generator distribution.

mod common;

use billiard::experiments::random_image_study;
use billiard::imaging::NoiseDistribution;

fn main() {
    let net = common::classifier(0);
    let dists = [
        NoiseDistribution::Gaussian,
        NoiseDistribution::Laplace,
        NoiseDistribution::Uniform,
    ];
    let rows = random_image_study(&net, 300, &[0.0, 0.2, 0.35, 0.5], &dists, 4000).unwrap();

    println!("{:>12} {:>10} {:>22}", "zero pixels", "generator", "read as non-integrable");
    for r in &rows {
        println!(
            "{:>11.0}% {:>10} {:>22.3}",
            r.zero_fraction * 100.0,
            r.distribution.name(),
            r.frac_nonintegrable
        );
    }
}
