//! Out-of-distribution test: box-boson states live in the symmetry class
//! orthogonal to everything the network trained on, yet are still
//! recognized as integrable.

mod common;

use billiard::experiments::bosonic_classification;

fn main() {
    let ensemble = vec![common::classifier(0), common::classifier(1)];
    let report = bosonic_classification(&ensemble, common::FAST_STATES, 64).expect("bosonic run");

    for (s, f) in report.per_seed.iter().enumerate() {
        println!("seed {s}: {:.4} of the bosonic states classified integrable", f);
    }
    println!(
        "ensemble: mean {:.4}, band {:.4}..{:.4}",
        report.mean, report.min, report.max
    );
    println!("\n(the training data is antisymmetric under particle exchange; these states are symmetric)");
}
