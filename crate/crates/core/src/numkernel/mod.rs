//! Adaptive IVP integration with dense output, bracketed root finding and
//! adaptive quadrature.

pub mod ode;
pub mod quad;
pub mod roots;

pub use ode::{integrate_ivp, DenseSolution, Tolerances, DEFAULT_ABS_TOL, DEFAULT_REL_TOL};
pub use quad::{adaptive_quadrature, DEFAULT_QUAD_TOL};
pub use roots::{brent_root, brent_root_fallible, DEFAULT_X_TOL};
