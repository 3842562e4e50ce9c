//! Error type shared across the library.

use thiserror::Error;

/// Failure modes of shooting, scaling and verification.
#[derive(Debug, Error)]
pub enum Error {
    /// The ODE state left the finite range (NaN or infinity), or the step
    /// budget ran out before the end of the interval.
    #[error("integration blew up at r = {r_last}")]
    IntegrationBlowup { r_last: f64 },

    /// The overshoot search exhausted its xi range without bracketing.
    #[error("no shooting bracket: no overshoot found with xi up to {xi_hi}")]
    NoBracket { xi_hi: f64 },

    /// Bisection converged but the profile has the wrong node count.
    #[error("shooting failed: profile has {got} nodes, wanted {want}")]
    ShootingFailed { want: usize, got: usize },

    /// The trajectory never came close enough to the phase-plane origin to
    /// call it a decaying solution.
    #[error(
        "decay not reached: best scaled phase distance {best:.3e} is above threshold {threshold:.3e}"
    )]
    DecayNotReached { best: f64, threshold: f64 },

    /// The operation is undefined in this dimension.
    #[error("dimension error: {what} (got N = {n})")]
    Dimension { n: u32, what: &'static str },

    /// A model hypothesis or an operation precondition fails.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// The supplied t does not satisfy the scaling relation.
    #[error("t = {t} is not a scaling root: |f(t) - 1| = {residual:.3e}")]
    NotARoot { t: f64, residual: f64 },

    /// Grid too coarse for the requested finite-difference stencil.
    #[error("grid error: {points} points, need at least {min}")]
    Grid { points: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
