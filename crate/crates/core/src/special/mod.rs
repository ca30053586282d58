//! Quadrature and special functions.
//!
//! Everything here is stateless: rules are immutable after construction and
//! all functions are pure.

mod gauss;
mod si;

pub use gauss::{integrate_adaptive, QuadratureRule};
pub use si::sine_integral;
