//! Direction grids, quadrature, compensated summation and small linear
//! algebra shared by the rest of the crate.

mod grid;
mod optimize;
mod quadrature;
mod summation;
pub mod vector;

pub use grid::{spherical_triangle_area, subdivided_icosahedron, DirectionGrid};
pub use optimize::{brent_maximize, scan_and_refine, ScalarMax};
pub use quadrature::{
    adaptive_simpson, directional_derivative, integrate_circle, integrate_circle_on_sphere,
    is_unit, GaussLegendre,
};
pub use summation::{compensated_sum, CompensatedSum};

/// Volume of the Euclidean unit ball in dimension `n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}
