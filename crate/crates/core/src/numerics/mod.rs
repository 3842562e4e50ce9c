//! Shared numerical kernels: quadrature, root bracketing, an adaptive
//! Runge-Kutta integrator and the few special-function values the radial
//! geometry needs.

pub mod bisect;
pub mod ode;
pub mod quad;
pub mod special;
