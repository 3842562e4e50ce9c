//! Radial shooting for the scalar-field equation -Delta v = g(v) in R^N.
//!
//! In radial coordinates the equation is v'' + (N-1)/r v' + g(v) = 0 with
//! v(0) = xi, v'(0) = 0, and a decaying solution is found by bisecting on
//! xi. The classifier rests on the energy E(r) = v'^2/2 + G(v), which is
//! nonincreasing (dE/dr = -(N-1)/r v'^2): at a turning point v' = 0 the
//! energy equals G(v), so a turn with |v| < zeta0 forces E < 0 from then
//! on and the trajectory can never reach zero again (undershoot). A turn
//! with |v| >= zeta0 is not trapping; nodal trajectories turn around on
//! the negative side above zeta0 in magnitude and still escape, so the
//! |v| < zeta0 test is what makes shooting for k >= 1 nodes work.
//!
//! The r = 0 singularity is avoided with the Taylor start
//! v(r) = xi - g(xi) r^2/(2N) + g'(xi) g(xi) r^4/(8N(N+2)) on [0, 1e-3].
//!
//! A final decaying profile cannot follow the separatrix forever in
//! floating point: a perturbation of size d grows like d e^{sqrt(m) r}
//! while the solution decays like e^{-sqrt(m) r}, so the scaled phase
//! distance max(|v|, |v'|/sqrt(m))/xi attains a minimum (typically
//! 1e-12..1e-9 with an ulp-tight bracket) and then blows back up. The
//! profile is truncated at that minimum and the remaining mass of the
//! integrals is restored from the linearized far field
//! v ~ C r^{(1-N)/2} e^{-sqrt(m) r}.

use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearityModel;
use crate::numerics::ode::{self, OdeConfig, StepRecord};
use crate::numerics::quad::simpson_uniform;
use crate::numerics::special::sphere_area;

/// End of the Taylor start region.
pub const R_SERIES: f64 = 1e-3;

/// Quadrature subintervals per output grid interval. The Pohozaev defect
/// of a profile is amplified by 1/(a t^2) when it reappears as the
/// Kirchhoff-level defect (a factor of several thousand for N = 3 with
/// realistic K), so the integrals are computed on a grid this much finer
/// than the published one.
const QUAD_REFINE: usize = 4;

/// Tunables for shooting and profile construction. Defaults are the
/// values every report echoes.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ShootConfig {
    /// Relative local error tolerance of the integrator.
    pub ode_rtol: f64,
    /// Absolute tolerance scale; the per-shot atol is this times max(xi, 1).
    pub ode_atol_scale: f64,
    /// Bisection stops when the xi bracket is narrower than this times xi
    /// (or when no representable point remains inside).
    pub shoot_tol_rel: f64,
    /// Integration range r_max = r_max_factor / sqrt(m).
    pub r_max_factor: f64,
    /// Points in the returned uniform profile grid (both endpoints included).
    pub grid_points: usize,
    /// Acceptance threshold on the scaled phase distance at truncation;
    /// also the decay classification threshold during a shot.
    pub decay_rel: f64,
    /// Far-field span integrated for tail corrections, in units of the
    /// decay length 1/rate.
    pub tail_span_factor: f64,
    /// Simpson intervals for the tail integrals.
    pub tail_intervals: usize,
    /// Overshoot search gives up after zeta0 * 2^xi_doublings.
    pub xi_doublings: u32,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig {
            ode_rtol: 1e-12,
            ode_atol_scale: 1e-14,
            shoot_tol_rel: 1e-15,
            r_max_factor: 50.0,
            grid_points: 4096,
            decay_rel: 1e-6,
            tail_span_factor: 60.0,
            tail_intervals: 2048,
            xi_doublings: 40,
        }
    }
}

/// Outcome of integrating a single shot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Classification {
    /// v reached zero (first crossing at r_cross) while still untrapped.
    CrossesZero { r_cross: f64 },
    /// A trapping turn: v' = 0 with |v| < zeta0, so E < 0 afterwards.
    Undershoot { r_turn: f64 },
    /// Both |v| and |v'|/sqrt(m) fell below decay_rel * xi.
    Decays { r_decay: f64 },
    /// Reached r_max without resolving; treated as undershoot by the
    /// bisection but flagged in diagnostics.
    Inconclusive,
}

/// One point of the phase plane with its scaled distance from the origin.
#[derive(Clone, Copy, Debug)]
pub struct PhasePoint {
    pub r: f64,
    pub v: f64,
    pub dv: f64,
    /// max(|v|, |dv|/sqrt(m)) / xi.
    pub dist: f64,
}

/// Diagnostic record of a single integration.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// (r, v, v') at every accepted step end.
    pub ends: Vec<[f64; 3]>,
    /// Radii of the zero crossings, in order.
    pub crossings: Vec<f64>,
    /// Non-trapping turning points (r, v); |v| >= zeta0 at each.
    pub turns: Vec<(f64, f64)>,
    /// Closest approach to the phase-plane origin.
    pub best: PhasePoint,
    /// First point with dist <= decay_rel. Profiles are truncated here
    /// rather than at best: at the threshold the state still dominates
    /// the integrator's exponentially amplified roundoff, while near the
    /// dip bottom it does not.
    pub threshold_hit: Option<PhasePoint>,
}

enum ShotOutcome {
    /// Crossed more often than allowed; r of the offending crossing.
    Over {
        r_cross: f64,
    },
    Trapped {
        r_turn: f64,
    },
    OutOfRange,
}

/// Samples on the refined quadrature grid backing K and int G(v); finer
/// than the published profile grid by QUAD_REFINE.
#[derive(Clone, Debug)]
pub struct QuadSamples {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

/// A discretized decaying radial solution with its integral quantities.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    pub n: u32,
    pub model: NonlinearityModel,
    /// Uniform radii, grid[0] = 0.
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Pointwise v'.
    pub derivs: Vec<f64>,
    /// Refined samples used for the integral quantities.
    pub quad: QuadSamples,
    /// Shooting value v(0).
    pub xi: f64,
    /// Count of strict sign changes in values.
    pub nodes: usize,
    /// K = int_{R^N} |grad v|^2, interior quadrature plus far-field tail.
    pub k_grad: f64,
    /// int_{R^N} G(v), same treatment.
    pub g_int: f64,
    /// Scaled phase distance at the truncation radius.
    pub decay_dist: f64,
    /// Shots the bisection had to treat as undershoots without a verdict.
    pub inconclusive_shots: usize,
}

impl RadialProfile {
    /// Truncation radius of the grid.
    pub fn r_end(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// K = int |grad v|^2 as stored at construction.
    pub fn gradient_norm_sq(&self) -> f64 {
        self.k_grad
    }

    /// Relative defect of the scalar Pohozaev identity
    /// (N-2)/2 K = N int G(v); zero for exact solutions.
    pub fn pohozaev_residual(&self) -> f64 {
        let lhs = (self.n as f64 - 2.0) / 2.0 * self.k_grad;
        (lhs - self.n as f64 * self.g_int).abs() / lhs.abs()
    }

    /// Builds a profile from raw uniform-grid samples and computes its
    /// integral quantities; used for externally supplied or deliberately
    /// perturbed data. The grid must be uniform and start at 0.
    pub fn from_samples(
        n: u32,
        model: NonlinearityModel,
        grid: Vec<f64>,
        values: Vec<f64>,
        derivs: Vec<f64>,
    ) -> Result<Self> {
        if grid.len() < 8 || grid.len() != values.len() || grid.len() != derivs.len() {
            return Err(Error::Grid {
                points: grid.len().min(values.len()).min(derivs.len()),
                min: 8,
            });
        }
        let h = grid[1] - grid[0];
        let uniform = grid
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
        if grid[0] != 0.0 || !uniform {
            return Err(Error::Hypothesis(
                "profile grid must be uniform and start at r = 0".into(),
            ));
        }
        let cfg = ShootConfig::default();
        let (k_grad, g_int) = profile_integrals(
            &model,
            n,
            &grid,
            &values,
            &derivs,
            model.m.sqrt(),
            cfg.tail_span_factor,
            cfg.tail_intervals,
        );
        let xi = values[0];
        let nodes = count_nodes(&values);
        let sm = model.m.sqrt();
        let last = grid.len() - 1;
        let dist = (values[last].abs().max(derivs[last].abs() / sm)) / xi.abs().max(1e-300);
        let quad = QuadSamples {
            grid: grid.clone(),
            values: values.clone(),
            derivs: derivs.clone(),
        };
        Ok(RadialProfile {
            n,
            model,
            grid,
            values,
            derivs,
            quad,
            xi,
            nodes,
            k_grad,
            g_int,
            decay_dist: dist,
            inconclusive_shots: 0,
        })
    }
}

/// Strict sign changes in a sample sequence.
pub fn count_nodes(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
}

/// Taylor start: state (v, v') at radius r <= R_SERIES.
fn series_state(model: &NonlinearityModel, n: u32, xi: f64, r: f64) -> [f64; 2] {
    let nf = n as f64;
    let g0 = model.g(xi);
    let a2 = -g0 / (2.0 * nf);
    let a4 = model.g_prime(xi) * g0 / (8.0 * nf * (nf + 2.0));
    let r2 = r * r;
    [
        xi + a2 * r2 + a4 * r2 * r2,
        2.0 * a2 * r + 4.0 * a4 * r2 * r,
    ]
}

fn ode_config(model: &NonlinearityModel, xi: f64, cfg: &ShootConfig) -> OdeConfig {
    OdeConfig {
        rtol: cfg.ode_rtol,
        atol: cfg.ode_atol_scale * xi.abs().max(1.0),
        h_max: 0.5 / model.m.sqrt(),
        h_init: 1e-4,
        max_steps: 50_000_000,
    }
}

/// Locates a zero of state component `comp` inside a step by bisection on
/// the dense output over [ta, 1].
fn locate_zero(rec: &StepRecord, comp: usize, mut ta: f64, mut tb: f64) -> f64 {
    let positive = rec.eval_theta(ta)[comp] > 0.0;
    for _ in 0..80 {
        let tm = 0.5 * (ta + tb);
        let fm = rec.eval_theta(tm)[comp];
        if fm != 0.0 && (fm > 0.0) == positive {
            ta = tm;
        } else {
            tb = tm;
        }
        if tb - ta < 1e-15 {
            break;
        }
    }
    0.5 * (ta + tb)
}

/// Integrates one shot from the Taylor start, watching for zero
/// crossings of v and turning points of v. Crossing number allow + 1
/// ends the shot as Over; a trapping turn ends it as Trapped. A shot
/// never stops at a decay dip: the closest approach to the phase-plane
/// origin is tracked in best and judged by the caller, so that the
/// over/under boundary seen by the bisection is the true separatrix and
/// not the decay threshold.
fn shoot_once(
    model: &NonlinearityModel,
    n: u32,
    xi: f64,
    r_max: f64,
    allow: usize,
    cfg: &ShootConfig,
) -> Result<(Trajectory, ShotOutcome)> {
    let zeta0 = model.zeta0();
    let sm = model.m.sqrt();
    let nm1 = (n - 1) as f64;
    let rhs = |r: f64, y: [f64; 2]| [y[1], -nm1 / r * y[1] - model.g(y[0])];
    let y0 = series_state(model, n, xi, R_SERIES);
    let ocfg = ode_config(model, xi, cfg);

    let mut tr = Trajectory {
        ends: Vec::new(),
        crossings: Vec::new(),
        turns: Vec::new(),
        best: PhasePoint {
            r: R_SERIES,
            v: y0[0],
            dv: y0[1],
            dist: f64::INFINITY,
        },
        threshold_hit: None,
    };
    let mut outcome = ShotOutcome::OutOfRange;

    let dist_of = |v: f64, dv: f64| v.abs().max(dv.abs() / sm) / xi;

    let (_, _, _) = ode::integrate(rhs, R_SERIES, y0, r_max, &ocfg, |rec| {
        tr.ends.push([rec.r1, rec.y1[0], rec.y1[1]]);
        // Walk the events inside this step in increasing r.
        let mut ta = 0.0;
        let mut ya = rec.y0;
        for _ in 0..16 {
            let mut next: Option<(f64, usize)> = None;
            for (comp, (&fa, &fb)) in ya.iter().zip(&rec.y1).enumerate() {
                if fa != 0.0 && fb != 0.0 && (fa > 0.0) != (fb > 0.0) {
                    let th = locate_zero(rec, comp, ta, 1.0);
                    if next.is_none_or(|(t0, _)| th < t0) {
                        next = Some((th, comp));
                    }
                }
            }
            let Some((th, comp)) = next else { break };
            let r_ev = rec.r0 + th * rec.h();
            let y_ev = rec.eval_theta(th);
            if comp == 0 {
                tr.crossings.push(r_ev);
                if tr.crossings.len() > allow {
                    outcome = ShotOutcome::Over { r_cross: r_ev };
                    return false;
                }
            } else {
                // Turning point: v' = 0, so the phase distance is |v|/xi.
                let v_t = y_ev[0];
                let pt = PhasePoint {
                    r: r_ev,
                    v: v_t,
                    dv: 0.0,
                    dist: v_t.abs() / xi,
                };
                if pt.dist < tr.best.dist {
                    tr.best = pt;
                }
                if tr.threshold_hit.is_none() && pt.dist <= cfg.decay_rel {
                    tr.threshold_hit = Some(pt);
                }
                if v_t.abs() < zeta0 {
                    outcome = ShotOutcome::Trapped { r_turn: r_ev };
                    return false;
                }
                tr.turns.push((r_ev, v_t));
            }
            ta = (th + 1e-9).min(1.0);
            if ta >= 1.0 {
                break;
            }
            ya = rec.eval_theta(ta);
        }
        // Step-end bookkeeping: closest approach to the origin.
        let d = dist_of(rec.y1[0], rec.y1[1]);
        let pt = PhasePoint {
            r: rec.r1,
            v: rec.y1[0],
            dv: rec.y1[1],
            dist: d,
        };
        if d < tr.best.dist {
            tr.best = pt;
        }
        if tr.threshold_hit.is_none() && d <= cfg.decay_rel {
            tr.threshold_hit = Some(pt);
        }
        true
    })?;

    Ok((tr, outcome))
}

/// Integrates the radial initial value problem from v(0) = xi until the
/// first zero crossing, the first trapping turn, or r_max, and
/// classifies the trajectory. A dip of the phase distance below
/// decay_rel anywhere along the path classifies as decay regardless of
/// how the trajectory ends: past its closest approach a near-separatrix
/// shot always veers off to a crossing or a turn in finite precision.
pub fn integrate_profile(
    model: &NonlinearityModel,
    n: u32,
    xi: f64,
    r_max: f64,
    cfg: &ShootConfig,
) -> Result<(Trajectory, Classification)> {
    model.validated(n)?;
    let (tr, outcome) = shoot_once(model, n, xi, r_max, 0, cfg)?;
    let class = if let Some(hit) = tr.threshold_hit {
        Classification::Decays { r_decay: hit.r }
    } else {
        match outcome {
            ShotOutcome::Over { r_cross } => Classification::CrossesZero { r_cross },
            ShotOutcome::Trapped { r_turn } => Classification::Undershoot { r_turn },
            ShotOutcome::OutOfRange => Classification::Inconclusive,
        }
    };
    Ok((tr, class))
}

/// Interior quadrature plus linearized tail for K = int |grad v|^2 and
/// int G(v) over R^N. `rate` is the far-field decay rate (sqrt(m) for a
/// base profile, sqrt(m) t for one rescaled by t).
#[allow(clippy::too_many_arguments)]
pub(crate) fn profile_integrals(
    model: &NonlinearityModel,
    n: u32,
    grid: &[f64],
    values: &[f64],
    derivs: &[f64],
    rate: f64,
    tail_span_factor: f64,
    tail_intervals: usize,
) -> (f64, f64) {
    let omega = sphere_area(n);
    let h = grid[1] - grid[0];
    let w = |r: f64| r.powi(n as i32 - 1);
    let fk: Vec<f64> = grid
        .iter()
        .zip(derivs)
        .map(|(&r, &dv)| dv * dv * w(r))
        .collect();
    let fg: Vec<f64> = grid
        .iter()
        .zip(values)
        .map(|(&r, &v)| model.g_primitive(v) * w(r))
        .collect();
    let mut k = simpson_uniform(&fk, h);
    let mut g = simpson_uniform(&fg, h);
    let (kt, gt) = tail_integrals(
        model,
        n,
        *grid.last().unwrap(),
        *values.last().unwrap(),
        rate,
        tail_span_factor,
        tail_intervals,
    );
    k += kt;
    g += gt;
    (omega * k, omega * g)
}

/// Integrals of the linearized far field v(r) = v_end (r/r_end)^{(1-N)/2}
/// e^{-rate (r - r_end)} over [r_end, r_end + span_factor/rate], without
/// the omega factor. Written with exponent differences only, so large
/// r_end never overflows.
pub(crate) fn tail_integrals(
    model: &NonlinearityModel,
    n: u32,
    r_end: f64,
    v_end: f64,
    rate: f64,
    span_factor: f64,
    intervals: usize,
) -> (f64, f64) {
    let span = span_factor / rate;
    let h = span / intervals as f64;
    let half_nm1 = (n as f64 - 1.0) / 2.0;
    let mut fk = Vec::with_capacity(intervals + 1);
    let mut fg = Vec::with_capacity(intervals + 1);
    for i in 0..=intervals {
        let r = r_end + i as f64 * h;
        let v = v_end * (r / r_end).powf(-half_nm1) * (-(rate) * (r - r_end)).exp();
        let dv = v * (-rate - half_nm1 / r);
        let w = r.powi(n as i32 - 1);
        fk.push(dv * dv * w);
        fg.push(model.g_primitive(v) * w);
    }
    (simpson_uniform(&fk, h), simpson_uniform(&fg, h))
}

/// Shoots for the decaying radial solution with the requested node count.
///
/// Bisects xi between the guaranteed undershoot seed zeta0 and an
/// overshoot found by doubling, truncates the optimal trajectory at its
/// closest approach to the phase-plane origin, reintegrates on a uniform
/// grid whose points are exact integrator stops, and computes K and
/// int G(v) by composite Simpson plus the linearized tail.
pub fn shoot_state(
    model: &NonlinearityModel,
    n: u32,
    target_nodes: usize,
    cfg: &ShootConfig,
) -> Result<RadialProfile> {
    model.validated(n)?;
    assert!(target_nodes <= 2, "node targets above 2 are not supported");
    let zeta0 = model.zeta0();
    let r_max = cfg.r_max_factor / model.m.sqrt();
    let mut inconclusive = 0usize;

    let mut classify = |xi: f64| -> Result<bool> {
        // true = overshoot side
        let (_, outcome) = shoot_once(model, n, xi, r_max, target_nodes, cfg)?;
        Ok(match outcome {
            ShotOutcome::Over { .. } => true,
            ShotOutcome::OutOfRange => {
                inconclusive += 1;
                false
            }
            _ => false,
        })
    };

    // zeta0 starts with zero energy and loses energy immediately, so it
    // can never reach v = 0 with v' != 0: a guaranteed undershoot.
    let mut lo = zeta0;
    if classify(lo)? {
        return Err(Error::ShootingFailed {
            want: target_nodes,
            got: target_nodes + 1,
        });
    }
    let mut hi = 2.0 * zeta0;
    let mut bracketed = false;
    for _ in 0..=cfg.xi_doublings {
        if classify(hi)? {
            bracketed = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !bracketed {
        return Err(Error::NoBracket { xi_hi: hi / 2.0 });
    }

    while hi - lo > cfg.shoot_tol_rel * lo {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if classify(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let xi = lo;

    // Truncation pass: the undershoot-side trajectory hugs the
    // separatrix; cut it where the scaled phase distance first drops
    // through decay_rel. It dips further beyond that point, but there
    // the state no longer dominates amplified roundoff.
    let (tr, _) = shoot_once(model, n, xi, r_max, target_nodes, cfg)?;
    let Some(hit) = tr.threshold_hit else {
        return Err(Error::DecayNotReached {
            best: tr.best.dist,
            threshold: cfg.decay_rel,
        });
    };

    let profile = finalize_profile(model, n, xi, hit.r, hit.dist, inconclusive, cfg)?;
    if profile.nodes != target_nodes {
        return Err(Error::ShootingFailed {
            want: target_nodes,
            got: profile.nodes,
        });
    }
    Ok(profile)
}

/// Reintegrates [0, r_end] with every quadrature radius an exact stop
/// and assembles the profile with its integral quantities. The published
/// grid is every QUAD_REFINE-th quadrature point, so its radii are exact
/// integrator stops too.
fn finalize_profile(
    model: &NonlinearityModel,
    n: u32,
    xi: f64,
    r_end: f64,
    decay_dist: f64,
    inconclusive_shots: usize,
    cfg: &ShootConfig,
) -> Result<RadialProfile> {
    let pts = cfg.grid_points.max(64);
    let grid: Vec<f64> = (0..pts)
        .map(|i| r_end * (i as f64 / (pts - 1) as f64))
        .collect();
    let mut qgrid = Vec::with_capacity((pts - 1) * QUAD_REFINE + 1);
    for w in grid.windows(2) {
        qgrid.push(w[0]);
        let h_sub = (w[1] - w[0]) / QUAD_REFINE as f64;
        for k in 1..QUAD_REFINE {
            qgrid.push(w[0] + k as f64 * h_sub);
        }
    }
    qgrid.push(r_end);

    let mut qvalues = vec![0.0; qgrid.len()];
    let mut qderivs = vec![0.0; qgrid.len()];
    let mut first_free = 0usize;
    for (i, &r) in qgrid.iter().enumerate() {
        if r <= R_SERIES {
            let y = series_state(model, n, xi, r);
            qvalues[i] = y[0];
            qderivs[i] = y[1];
            first_free = i + 1;
        } else {
            break;
        }
    }
    let targets = &qgrid[first_free..];
    let nm1 = (n - 1) as f64;
    let rhs = |r: f64, y: [f64; 2]| [y[1], -nm1 / r * y[1] - model.g(y[0])];
    let y0 = series_state(model, n, xi, R_SERIES);
    let ocfg = ode_config(model, xi, cfg);
    let mut cursor = 0usize;
    ode::integrate_through(
        rhs,
        R_SERIES,
        y0,
        r_end,
        &ocfg,
        targets.iter().copied(),
        |rec| {
            if cursor < targets.len() && rec.r1 == targets[cursor] {
                qvalues[first_free + cursor] = rec.y1[0];
                qderivs[first_free + cursor] = rec.y1[1];
                cursor += 1;
            }
            true
        },
    )?;
    debug_assert_eq!(cursor, targets.len(), "a forced grid stop was missed");

    let (k_grad, g_int) = profile_integrals(
        model,
        n,
        &qgrid,
        &qvalues,
        &qderivs,
        model.m.sqrt(),
        cfg.tail_span_factor,
        cfg.tail_intervals,
    );
    let values: Vec<f64> = (0..pts).map(|i| qvalues[i * QUAD_REFINE]).collect();
    let derivs: Vec<f64> = (0..pts).map(|i| qderivs[i * QUAD_REFINE]).collect();
    let nodes = count_nodes(&values);
    Ok(RadialProfile {
        n,
        model: *model,
        grid,
        values,
        derivs,
        quad: QuadSamples {
            grid: qgrid,
            values: qvalues,
            derivs: qderivs,
        },
        xi,
        nodes,
        k_grad,
        g_int,
        decay_dist,
        inconclusive_shots,
    })
}
