//! Builds the labeled image dataset and exports a few states as PGM images
//! for visual inspection.

mod common;

use billiard::imaging::{write_pgm, Label};

fn main() {
    let ds = common::dataset();
    println!(
        "dataset: {} records at {r}x{r} pixels, {} train / {} test (split seed {})",
        ds.len(),
        ds.train.len(),
        ds.test.len(),
        ds.split_seed,
        r = ds.resolution()
    );
    let integrable = ds
        .records
        .iter()
        .filter(|r| r.label == Label::Integrable)
        .count();
    println!("labels: {integrable} integrable, {} non-integrable", ds.len() - integrable);

    let out = common::out_dir();
    for (name, pick) in [
        ("integrable", ds.records.iter().position(|r| r.inv_kappa == 1.0).unwrap()),
        ("chaotic", ds.records.iter().position(|r| r.inv_kappa == 0.2).unwrap()),
    ] {
        let rec = &ds.records[pick];
        let path = out.join(format!("state_{name}.pgm"));
        write_pgm(&path, &rec.grid).unwrap();
        println!(
            "wrote {} (1/kappa {}, state {})",
            path.display(),
            rec.inv_kappa,
            rec.state_index
        );
    }
}
