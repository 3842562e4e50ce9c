//! Numerical construction and verification of radial solutions to the
//! Kirchhoff-type equation
//!
//! ```text
//! -(a + b int_{R^N} |grad u|^2) Delta u = g(u)   in R^N,  N >= 3,
//! ```
//!
//! with g(s) = -m s + |s|^{p-1} s, m > 0 and 1 < p < (N+2)/(N-2).
//!
//! The pipeline has three stages:
//!
//! 1. [`shooting`] finds decaying radial solutions v of the scalar-field
//!    equation -Delta v = g(v) with a prescribed number of nodes, by
//!    bisection on the shooting value v(0), and computes the gradient
//!    mass K = int |grad v|^2 and int G(v).
//! 2. [`scaling`] solves a t^2 + b K t^{4-N} = 1, whose roots t turn
//!    v into Kirchhoff solutions u = v(t x). The root count encodes the
//!    existence theory: always one for N = 3, conditional for N = 4, and
//!    for N >= 5 a threshold a_max with two, one, or zero solutions.
//! 3. [`functional`] evaluates the action of each solution three
//!    independent ways, checks the Pohozaev identity and a direct
//!    finite-difference residual of the equation, and rescales the
//!    solution back to the scalar field as a round trip.
//!
//! [`report`] fixes the JSON vocabulary in which results are published.

pub mod error;
pub mod functional;
pub mod nonlinearity;
pub mod numerics;
pub mod report;
pub mod scaling;
pub mod shooting;

pub use error::{Error, Result};
pub use functional::{NonnegativityReport, RoundTrip, ScaledProfile};
pub use nonlinearity::{NonlinearityModel, ValidationReport};
pub use report::{EffectiveConfig, VerifyTolerances, SPEC_VERSION};
pub use scaling::{KirchhoffProblem, Regime, ScalingRoots, Threshold};
pub use shooting::{Classification, RadialProfile, ShootConfig};
