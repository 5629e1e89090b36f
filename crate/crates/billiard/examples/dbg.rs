use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let flat: Array1<f32> = Array1::from_shape_fn(8192, |_| rng.gen_range(-1.0..1.0));
    let w: Array2<f32> = Array2::from_shape_fn((8192, 128), |_| rng.gen_range(-0.1..0.1));
    let wt = w.t().to_owned(); // (128, 8192) contiguous rows
    let n = 200;

    let t = std::time::Instant::now();
    let mut acc = 0.0f32;
    for _ in 0..n { acc += flat.dot(&w)[0]; }
    println!("vec . mat (row-major 8192x128): {:?}", t.elapsed() / n);

    let t = std::time::Instant::now();
    for _ in 0..n { acc += wt.dot(&flat)[0]; }
    println!("mat(128x8192 rows) . vec:       {:?}", t.elapsed() / n);

    // conv2-shaped GEMM
    let cols: Array2<f32> = Array2::from_shape_fn((1024, 144), |_| rng.gen_range(-1.0..1.0));
    let wc: Array2<f32> = Array2::from_shape_fn((144, 32), |_| rng.gen_range(-0.1..0.1));
    let t = std::time::Instant::now();
    for _ in 0..n { acc += cols.dot(&wc)[[0, 0]]; }
    println!("gemm 1024x144 * 144x32:         {:?}", t.elapsed() / n);

    // conv1-shaped GEMM
    let cols1: Array2<f32> = Array2::from_shape_fn((4096, 9), |_| rng.gen_range(-1.0..1.0));
    let wc1: Array2<f32> = Array2::from_shape_fn((9, 16), |_| rng.gen_range(-0.1..0.1));
    let t = std::time::Instant::now();
    for _ in 0..n { acc += cols1.dot(&wc1)[[0, 0]]; }
    println!("gemm 4096x9 * 9x16:             {:?}", t.elapsed() / n);
    eprintln!("(sink {acc})");
}
