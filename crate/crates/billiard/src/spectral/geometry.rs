//! Billiard geometry: the smoothed density of states and the isosceles
//! triangle equivalent to a given mass ratio.

use super::MassRatio;

/// Asymptotic density of states of the equivalent triangular billiard,
/// `L^2/(4 pi) * sqrt(kappa / (kappa + 2))`. Constant in energy for a
/// two-dimensional domain.
pub fn weyl_density(mass: MassRatio, box_length: f64) -> f64 {
    let ratio = 1.0 / (1.0 + 2.0 * mass.inv_kappa());
    box_length * box_length / (4.0 * std::f64::consts::PI) * ratio.sqrt()
}

/// Base and apex angles (radians) of the isosceles triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleAngles {
    pub base: f64,
    pub apex: f64,
}

/// Triangle equivalent of the three-body problem: base angle
/// `alpha = atan(sqrt((kappa + 2)/kappa))`, apex `pi - 2 alpha`.
///
/// The heavy-impurity limit comes out of the same formula as the right
/// isosceles triangle (90, 45, 45 degrees); equal masses give the
/// equilateral one.
pub fn triangle_geometry(mass: MassRatio) -> TriangleAngles {
    let base = (1.0 + 2.0 * mass.inv_kappa()).sqrt().atan();
    TriangleAngles {
        base,
        apex: std::f64::consts::PI - 2.0 * base,
    }
}
