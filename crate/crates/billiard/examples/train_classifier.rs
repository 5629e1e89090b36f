//! Trains the convolutional classifier on the desk-scale dataset and
//! reports accuracies and the confusion matrix.

mod common;

use billiard::net::{evaluate, EvalCase};

fn main() {
    let ds = common::dataset();
    let net = common::classifier(0);

    let cases: Vec<_> = ds
        .test_records()
        .map(|r| (r.grid.to_f32(), r.label.class_index()))
        .collect();
    let report = evaluate(
        &net,
        cases.iter().map(|(image, target)| EvalCase {
            image,
            target: *target,
        }),
    )
    .unwrap();

    println!("held-out accuracy: {:.4} on {} states", report.accuracy, cases.len());
    println!(
        "per class: integrable {:?}, non-integrable {:?}",
        report.per_class[0], report.per_class[1]
    );
    println!("confusion (rows true, columns predicted):");
    println!("  integrable     {:>4} {:>4}", report.confusion[0][0], report.confusion[0][1]);
    println!("  non-integrable {:>4} {:>4}", report.confusion[1][0], report.confusion[1][1]);
    let wrong = cases.len() - (report.confusion[0][0] + report.confusion[1][1]);
    println!("misclassified: {wrong} states");
}
