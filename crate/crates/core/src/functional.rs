//! Actions, verification residuals, and the energy nonnegativity sampler.
//!
//! A Kirchhoff solution here is a rescaled scalar-field profile
//! u = v(t x) with t a root of a t^2 + b K t^{4-N} = 1. Its action
//!
//! ```text
//! I(u) = (a/2 + b K_u/4) K_u - int G(u),   K_u = t^{2-N} K,
//! ```
//!
//! admits two closed forms that agree exactly at roots: one in K_u alone
//! (via the Pohozaev identity of the base profile) and one in (t, K).
//! Evaluating the definition with independently requadratured integrals
//! and comparing all three is the main internal consistency check; the
//! finite-difference residual of the full equation and the round trip
//! back to the scalar field close the loop from the other directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearityModel;
use crate::numerics::special::{gamma_half, sphere_area};
use crate::scaling::{self, KirchhoffProblem};
use crate::shooting::{self, RadialProfile, ShootConfig};

/// Largest |f(t) - 1| accepted when building a solution from a claimed root.
pub const NOT_A_ROOT_TOL: f64 = 1e-8;

/// Sampled actions above this floor count as nonnegative.
pub const NONNEG_FLOOR: f64 = -1e-10;

/// A scalar-field profile rescaled into a Kirchhoff solution, with its
/// integral quantities both transformed in closed form and requadratured
/// on the scaled grid.
#[derive(Clone, Debug)]
pub struct ScaledProfile {
    pub base: RadialProfile,
    pub problem: KirchhoffProblem,
    pub t: f64,
    /// rho_i = r_i / t.
    pub grid: Vec<f64>,
    /// u(rho_i) = v(r_i).
    pub values: Vec<f64>,
    /// u'(rho_i) = t v'(r_i).
    pub derivs: Vec<f64>,
    /// K_u = t^{2-N} K, transformed exactly.
    pub k_u: f64,
    /// K_u from Simpson plus tail on the scaled grid.
    pub k_u_quad: f64,
    /// int G(u) = t^{-N} int G(v), transformed exactly.
    pub g_int_u: f64,
    /// int G(u) requadratured.
    pub g_int_u_quad: f64,
}

impl ScaledProfile {
    pub fn n(&self) -> u32 {
        self.base.n
    }

    pub fn model(&self) -> &NonlinearityModel {
        &self.base.model
    }

    /// Diffusion coefficient a + b K_u; equals 1/t^2 at an exact root.
    pub fn coeff(&self) -> f64 {
        self.problem.a + self.problem.b * self.k_u
    }

    /// Relative disagreement between the closed-form and requadratured
    /// integral quantities; bounds the quadrature error of the pipeline.
    pub fn scale_consistency(&self) -> f64 {
        let dk = ((self.k_u_quad - self.k_u) / self.k_u).abs();
        let dg = ((self.g_int_u_quad - self.g_int_u) / self.g_int_u).abs();
        dk.max(dg)
    }
}

/// Rescales a profile by a root t of the scaling equation. Rejects t if
/// its residual exceeds NOT_A_ROOT_TOL: the result would not solve the
/// Kirchhoff equation, no matter how clean the base profile is.
pub fn build_kirchhoff_solution(
    base: &RadialProfile,
    problem: &KirchhoffProblem,
    t: f64,
) -> Result<ScaledProfile> {
    problem.validated()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Hypothesis(format!(
            "scaling factor must be positive and finite, got {t}"
        )));
    }
    let residual = scaling::scaling_residual(base.n, problem.a, problem.b, base.k_grad, t);
    if residual.abs() > NOT_A_ROOT_TOL {
        return Err(Error::NotARoot { t, residual });
    }
    let n = base.n;
    let k_u = t.powi(2 - n as i32) * base.k_grad;
    let g_int_u = base.g_int / t.powi(n as i32);
    let grid: Vec<f64> = base.grid.iter().map(|&r| r / t).collect();
    let values = base.values.clone();
    let derivs: Vec<f64> = base.derivs.iter().map(|&d| t * d).collect();
    // Requadrature on the refined samples, rescaled pointwise; the decay
    // rate of u is sqrt(m) t.
    let qgrid: Vec<f64> = base.quad.grid.iter().map(|&r| r / t).collect();
    let qderivs: Vec<f64> = base.quad.derivs.iter().map(|&d| t * d).collect();
    let cfg = ShootConfig::default();
    let (k_u_quad, g_int_u_quad) = shooting::profile_integrals(
        &base.model,
        n,
        &qgrid,
        &base.quad.values,
        &qderivs,
        base.model.m.sqrt() * t,
        cfg.tail_span_factor,
        cfg.tail_intervals,
    );
    Ok(ScaledProfile {
        base: base.clone(),
        problem: *problem,
        t,
        grid,
        values,
        derivs,
        k_u,
        k_u_quad,
        g_int_u,
        g_int_u_quad,
    })
}

/// I(u) straight from the definition, using the requadratured integrals:
/// (a/2) K_u + (b/4) K_u^2 - int G(u).
pub fn action_definition(sp: &ScaledProfile) -> f64 {
    let k = sp.k_u_quad;
    0.5 * sp.problem.a * k + 0.25 * sp.problem.b * k * k - sp.g_int_u_quad
}

/// The two closed forms of the action at a root of the scaling equation.
#[derive(Clone, Copy, Debug)]
pub struct ClosedActions {
    /// I in terms of (t, K): (a/4) K t^{2-N} + (4-N)/(4N) K t^{-N}.
    pub i_func: f64,
    /// I in terms of K_u alone: (a/N) K_u + b (4-N)/(4N) K_u^2.
    pub i_reduced: f64,
}

/// Evaluates both closed forms for a base level K and scaling factor t.
/// They agree (in exact arithmetic) iff t is a root.
pub fn action_from_scaling(n: u32, problem: &KirchhoffProblem, k: f64, t: f64) -> ClosedActions {
    let nf = n as f64;
    let i_func = 0.25 * problem.a * k * t.powi(2 - n as i32)
        + (4.0 - nf) / (4.0 * nf) * k * t.powi(-(n as i32));
    let k_u = t.powi(2 - n as i32) * k;
    let i_reduced = problem.a / nf * k_u + problem.b * (4.0 - nf) / (4.0 * nf) * k_u * k_u;
    ClosedActions { i_func, i_reduced }
}

/// Relative defect of the Pohozaev identity for the Kirchhoff equation,
/// (N-2)/(2N) (a K_u + b K_u^2) = int G(u), using the exactly transformed
/// quantities; inherits the base profile's scalar defect at a root.
pub fn kirchhoff_pohozaev_residual(sp: &ScaledProfile) -> f64 {
    let c = (sp.n() as f64 - 2.0) / (2.0 * sp.n() as f64);
    let lhs = c * (sp.problem.a * sp.k_u + sp.problem.b * sp.k_u * sp.k_u);
    (lhs - sp.g_int_u).abs() / (c * sp.problem.a * sp.k_u)
}

/// Sup-norm residual of -coeff (u'' + (N-1)/r u') = g(u) by central
/// differences on a uniform grid, normalized by sup |g(u)| over the same
/// points. The first three points (FD across the parity fold at r = 0
/// and the series handoff) and the last point are excluded.
pub fn fd_radial_residual(
    grid: &[f64],
    values: &[f64],
    coeff: f64,
    model: &NonlinearityModel,
    n: u32,
) -> Result<f64> {
    let m = grid.len();
    if m < 64 {
        return Err(Error::Grid { points: m, min: 64 });
    }
    let h = grid[1] - grid[0];
    let nm1 = (n - 1) as f64;
    let mut sup_r = 0f64;
    let mut sup_g = 0f64;
    for i in 3..m - 1 {
        let upp = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
        let up = (values[i + 1] - values[i - 1]) / (2.0 * h);
        let g = model.g(values[i]);
        let res = -coeff * (upp + nm1 / grid[i] * up) - g;
        sup_r = sup_r.max(res.abs());
        sup_g = sup_g.max(g.abs());
    }
    Ok(if sup_g > 0.0 { sup_r / sup_g } else { sup_r })
}

/// FD residual of the full Kirchhoff equation for a scaled profile.
pub fn pde_residual(sp: &ScaledProfile) -> Result<f64> {
    fd_radial_residual(&sp.grid, &sp.values, sp.coeff(), sp.model(), sp.n())
}

/// Result of pulling a Kirchhoff solution back to the scalar field.
#[derive(Clone, Copy, Debug)]
pub struct RoundTrip {
    /// Contraction factor h = sqrt(a + b K_u); 1/t at an exact root.
    pub h: f64,
    /// Scalar Pohozaev defect of w(y) = u(y/h).
    pub pohozaev_residual: f64,
    /// FD residual of -Delta w = g(w).
    pub pde_residual: f64,
}

/// Rescales u by h = sqrt(a + b K_u), which must reproduce a scalar-field
/// solution: w(y) = u(y/h) satisfies -Delta w = g(w). Both residuals of w
/// are computed fresh from the resampled arrays.
pub fn round_trip_scalar(sp: &ScaledProfile) -> Result<RoundTrip> {
    let h = sp.coeff().sqrt();
    let grid: Vec<f64> = sp.grid.iter().map(|&rho| rho / h).collect();
    let derivs: Vec<f64> = sp.derivs.iter().map(|&du| h * du).collect();
    let w = RadialProfile::from_samples(sp.n(), *sp.model(), grid, sp.values.clone(), derivs)?;
    let pde = fd_radial_residual(&w.grid, &w.values, 1.0, &w.model, w.n)?;
    Ok(RoundTrip {
        h,
        pohozaev_residual: w.pohozaev_residual(),
        pde_residual: pde,
    })
}

/// Kirchhoff action of the Gaussian trial alpha e^{-(r/sigma)^2} in
/// closed form: every integral is a gamma function.
pub fn gaussian_action(
    n: u32,
    problem: &KirchhoffProblem,
    model: &NonlinearityModel,
    alpha: f64,
    sigma: f64,
) -> f64 {
    let omega = sphere_area(n);
    let nf = n as f64;
    let s2 = sigma * sigma;
    // int_0^inf r^{N+1} e^{-2 r^2/s2} dr = Gamma((N+2)/2)/2 (s2/2)^{(N+2)/2}
    let k = omega
        * alpha
        * alpha
        * (4.0 / (s2 * s2))
        * 0.5
        * gamma_half(n + 2)
        * (s2 / 2.0).powf((nf + 2.0) / 2.0);
    // J_q = int_0^inf r^{N-1} e^{-q r^2/s2} dr = Gamma(N/2)/2 (s2/q)^{N/2}
    let j = |q: f64| 0.5 * gamma_half(n) * (s2 / q).powf(nf / 2.0);
    let g_int = omega
        * (-model.m * alpha * alpha / 2.0 * j(2.0)
            + alpha.powf(model.p + 1.0) / (model.p + 1.0) * j(model.p + 1.0));
    0.5 * problem.a * k + 0.25 * problem.b * k * k - g_int
}

/// Outcome of the random Gaussian trial sweep for energy nonnegativity.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct NonnegativityReport {
    pub trials: usize,
    pub min_action: f64,
    pub min_alpha: f64,
    pub min_sigma: f64,
    /// min_action >= -1e-10.
    pub pass: bool,
}

/// Samples the Kirchhoff action over Gaussians with log-uniform
/// amplitude alpha in zeta0 * [1e-2, 1e2] and width sigma in [1e-5, 10],
/// deterministically from the seed. Above the existence threshold the
/// minimum must be nonnegative; below it, narrow trials (small sigma
/// keeps b K^2/4 negligible) expose the negative well.
pub fn nonnegativity_sample(
    n: u32,
    problem: &KirchhoffProblem,
    model: &NonlinearityModel,
    trials: usize,
    seed: u64,
) -> Result<NonnegativityReport> {
    model.validated(n)?;
    problem.validated()?;
    let zeta0 = model.zeta0();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_action = f64::INFINITY;
    let mut min_alpha = f64::NAN;
    let mut min_sigma = f64::NAN;
    for _ in 0..trials {
        let ea: f64 = rng.gen();
        let es: f64 = rng.gen();
        let alpha = zeta0 * 10f64.powf(-2.0 + 4.0 * ea);
        let sigma = 10f64.powf(-5.0 + 6.0 * es);
        let action = gaussian_action(n, problem, model, alpha, sigma);
        if action < min_action {
            min_action = action;
            min_alpha = alpha;
            min_sigma = sigma;
        }
    }
    Ok(NonnegativityReport {
        trials,
        min_action,
        min_alpha,
        min_sigma,
        pass: min_action >= NONNEG_FLOOR,
    })
}
