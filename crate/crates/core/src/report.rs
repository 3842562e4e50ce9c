//! Serializable report types: the stable JSON surface of the library.
//!
//! Field names and spellings here are contract, not style; downstream
//! consumers key on "N", "K", "GInt", "I_func", "K_u" and the
//! SCREAMING_SNAKE_CASE regime tags. Every top-level report is wrapped
//! with the schema version and the effective numeric configuration so a
//! run can be reproduced from its own output.

use serde::Serialize;

use crate::error::Result;
use crate::functional::{self, ScaledProfile};
use crate::scaling::{KirchhoffProblem, Regime, ScalingRoots};
use crate::shooting::RadialProfile;

/// Version of the report schemas produced by this crate.
pub const SPEC_VERSION: &str = "1.0.0";

/// The numeric settings a run actually used, echoed into every report.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EffectiveConfig {
    pub seed: u64,
    pub jobs: usize,
    pub ode_rtol: f64,
    pub shoot_tol_rel: f64,
    pub grid_points: usize,
    pub r_max_factor: f64,
    pub decay_rel: f64,
}

/// A report body wrapped with the schema version and configuration echo.
#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub spec_version: &'static str,
    pub config: EffectiveConfig,
    #[serde(flatten)]
    pub body: T,
}

pub fn enveloped<T: Serialize>(config: EffectiveConfig, body: T) -> Report<T> {
    Report {
        spec_version: SPEC_VERSION,
        config,
        body,
    }
}

/// Sidecar summary written next to a profile CSV.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProfileSidecar {
    #[serde(rename = "N")]
    pub n: u32,
    pub m: f64,
    pub p: f64,
    pub xi: f64,
    pub nodes: usize,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "GInt")]
    pub g_int: f64,
    pub pohozaev_residual: f64,
}

impl ProfileSidecar {
    pub fn from_profile(profile: &RadialProfile) -> Self {
        ProfileSidecar {
            n: profile.n,
            m: profile.model.m,
            p: profile.model.p,
            xi: profile.xi,
            nodes: profile.nodes,
            k: profile.k_grad,
            g_int: profile.g_int,
            pohozaev_residual: profile.pohozaev_residual(),
        }
    }
}

/// Root structure of the scaling equation for one (N, a, b, K).
#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    #[serde(rename = "N")]
    pub n: u32,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub regime: Regime,
    pub roots: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_max: Option<f64>,
}

pub fn scaling_report(
    n: u32,
    problem: &KirchhoffProblem,
    k: f64,
    roots: &ScalingRoots,
) -> ScalingReport {
    ScalingReport {
        n,
        a: problem.a,
        b: problem.b,
        k,
        regime: roots.regime,
        roots: roots.roots.clone(),
        t_star: roots.t_star,
        f_min: roots.f_min,
        a_max: roots.a_max,
    }
}

/// Action values and verification residuals of one Kirchhoff solution.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ActionReport {
    #[serde(rename = "I_definition")]
    pub i_definition: f64,
    #[serde(rename = "I_reduced")]
    pub i_reduced: f64,
    #[serde(rename = "I_func")]
    pub i_func: f64,
    pub pohozaev_residual: f64,
    pub pde_residual: f64,
    pub t: f64,
    #[serde(rename = "K_u")]
    pub k_u: f64,
}

pub fn action_report(sp: &ScaledProfile) -> Result<ActionReport> {
    let closed = functional::action_from_scaling(sp.n(), &sp.problem, sp.base.k_grad, sp.t);
    Ok(ActionReport {
        i_definition: functional::action_definition(sp),
        i_reduced: closed.i_reduced,
        i_func: closed.i_func,
        pohozaev_residual: functional::kirchhoff_pohozaev_residual(sp),
        pde_residual: functional::pde_residual(sp)?,
        t: sp.t,
        k_u: sp.k_u,
    })
}

/// Gates applied by the verification commands; the defaults are the
/// documented contract of the pipeline.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct VerifyTolerances {
    /// Scalar Pohozaev defect of a shot profile.
    pub pohozaev_scalar: f64,
    /// Pohozaev defect of a scaled Kirchhoff solution.
    pub pohozaev_kirchhoff: f64,
    /// Normalized FD residual of either equation.
    pub pde_residual: f64,
    /// Action from the definition vs the closed forms.
    pub action_def_vs_closed: f64,
    /// The two closed action forms against each other.
    pub action_closed_forms: f64,
    /// Closed-form vs requadratured K_u and int G(u).
    pub scaling_identity: f64,
    /// |f(t) - 1| for returned roots.
    pub root_residual: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        VerifyTolerances {
            pohozaev_scalar: 1e-6,
            pohozaev_kirchhoff: 1e-5,
            pde_residual: 1e-4,
            action_def_vs_closed: 1e-5,
            action_closed_forms: 1e-12,
            scaling_identity: 1e-8,
            root_residual: 1e-10,
        }
    }
}
