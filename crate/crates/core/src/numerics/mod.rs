//! Quadrature, Bessel J1 and root bracketing shared by the physics modules.

mod bessel;
mod quadrature;
mod roots;

pub use bessel::bessel_j1;
pub use quadrature::{integrate, integrate_with_breaks, Estimate, QuadratureSpec, TailPolicy};
pub use roots::find_zero;
