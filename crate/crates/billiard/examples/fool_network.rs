//! Fooling the classifier: tiny gradient-sign perturbations flip integrable
//! states to "non-integrable" far more easily than the reverse.

mod common;

use billiard::experiments::adversarial_attack;
use billiard::imaging::{write_pgm, GridKind, Label, PixelGrid};
use billiard::net::forward;

fn main() {
    let ds = common::dataset();
    let net = common::classifier(0);
    let out = common::out_dir();

    let mut stats = [(0usize, 0usize); 2]; // per direction: (attacked, flipped)
    let mut exported = false;
    for &i in &ds.test {
        let rec = &ds.records[i as usize];
        let pred = forward(&net, &rec.grid.to_f32()).unwrap();
        if pred.class_index() != rec.label.class_index() {
            continue;
        }
        let (dir_idx, target) = match rec.label {
            Label::Integrable => (0, Label::NonIntegrable),
            Label::NonIntegrable => (1, Label::Integrable),
        };
        let result = adversarial_attack(&net, &rec.grid, target, 1e-3, 200).unwrap();
        stats[dir_idx].0 += 1;
        if result.success && result.linf_rel <= 0.05 {
            stats[dir_idx].1 += 1;
            if !exported && dir_idx == 0 {
                write_pgm(&out.join("fool_before.pgm"), &rec.grid).unwrap();
                let after =
                    PixelGrid::new(result.perturbed.mapv(|v| v as f64), GridKind::Density)
                        .unwrap();
                write_pgm(&out.join("fool_after.pgm"), &after).unwrap();
                let diff = PixelGrid::new(
                    (after.values() - rec.grid.values()).mapv(f64::abs),
                    GridKind::Density,
                )
                .unwrap();
                write_pgm(&out.join("fool_diff.pgm"), &diff).unwrap();
                println!(
                    "example flip: state {} of 1/kappa {} in {} iterations, max relative change {:.4}",
                    rec.state_index, rec.inv_kappa, result.iterations, result.linf_rel
                );
                println!("  before: integrable probability {:.4}", result.before.b1);
                println!("  after:  integrable probability {:.4}", result.after.b1);
                exported = true;
            }
        }
    }

    let rate = |s: (usize, usize)| s.1 as f64 / s.0.max(1) as f64;
    println!(
        "\nintegrable -> non-integrable: {}/{} flipped ({:.2})",
        stats[0].1,
        stats[0].0,
        rate(stats[0])
    );
    println!(
        "non-integrable -> integrable: {}/{} flipped ({:.2})",
        stats[1].1,
        stats[1].0,
        rate(stats[1])
    );
    println!("\nimages in ./out/fool_*.pgm (before, after, difference)");
}
