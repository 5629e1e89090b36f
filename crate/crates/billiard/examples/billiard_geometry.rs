//! The mass ratio as geometry: every impurity mass maps to an isosceles
//! billiard triangle, and the smoothed level density follows its area.

use billiard::spectral::{triangle_geometry, weyl_density, MassRatio};
use billiard::BOX_LENGTH;

fn main() {
    println!(
        "{:>8} {:>12} {:>12} {:>14}",
        "kappa", "base angle", "apex angle", "level density"
    );
    for kappa in [1.0, 1.2, 2.0, 5.0, 20.0, f64::INFINITY] {
        let mass = if kappa.is_infinite() {
            MassRatio::infinite_impurity()
        } else {
            MassRatio::from_kappa(kappa).unwrap()
        };
        let angles = triangle_geometry(mass);
        let density = weyl_density(mass, BOX_LENGTH);
        println!(
            "{:>8} {:>11.3}° {:>11.3}° {:>14.6}",
            kappa,
            angles.base.to_degrees(),
            angles.apex.to_degrees(),
            density
        );
    }
    println!("\nkappa = 1 is the equilateral triangle, the heavy impurity the right isosceles one;");
    println!("both endpoints are solvable, everything in between is chaotic");
}
