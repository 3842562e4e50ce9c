//! Adaptive Dormand-Prince 5(4) integration for two-component systems.
//!
//! The embedded pair controls the local error; the fifth-order solution is
//! propagated (local extrapolation) with the classic FSAL optimization.
//! Each accepted step carries the standard quartic dense-output polynomial,
//! which the shooting layer uses to locate zero crossings and turning
//! points inside a step, and an exact-stop mode lands on caller-supplied
//! radii so profile grids never involve interpolation.

use crate::error::{Error, Result};

/// Tolerances and guards for one integration run.
#[derive(Clone, Copy, Debug)]
pub struct OdeConfig {
    /// Relative local error tolerance per step.
    pub rtol: f64,
    /// Absolute local error tolerance per step (same units as the state).
    pub atol: f64,
    /// Upper bound on the step size.
    pub h_max: f64,
    /// First trial step.
    pub h_init: f64,
    /// Step budget; exceeding it reports IntegrationBlowup.
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig {
            rtol: 1e-12,
            atol: 1e-14,
            h_max: 1.0,
            h_init: 1e-4,
            max_steps: 50_000_000,
        }
    }
}

/// One accepted step with its dense-output coefficients.
#[derive(Clone, Copy, Debug)]
pub struct StepRecord {
    pub r0: f64,
    pub r1: f64,
    pub y0: [f64; 2],
    pub y1: [f64; 2],
    /// Coefficients of the continuous extension, Horner-ready.
    cont: [[f64; 2]; 5],
}

impl StepRecord {
    /// Step width.
    pub fn h(&self) -> f64 {
        self.r1 - self.r0
    }

    /// Dense-output state at r in [r0, r1] (fourth-order accurate).
    pub fn eval(&self, r: f64) -> [f64; 2] {
        let theta = (r - self.r0) / (self.r1 - self.r0);
        self.eval_theta(theta)
    }

    /// Dense-output state at normalized position theta in [0, 1].
    pub fn eval_theta(&self, theta: f64) -> [f64; 2] {
        let t1 = 1.0 - theta;
        let c = &self.cont;
        let mut y = [0.0; 2];
        for i in 0..2 {
            y[i] = c[0][i] + theta * (c[1][i] + t1 * (c[2][i] + theta * (c[3][i] + t1 * c[4][i])));
        }
        y
    }
}

/// Why the integration loop returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Reached r_end.
    ReachedEnd,
    /// The step callback asked to stop.
    Stopped,
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Error coefficients: b5 - b4 (row 7 of A is b5).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense-output weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;

/// Integrates y' = rhs(r, y) from (r0, y0) to r_end.
///
/// `on_step` sees every accepted step in order and returns false to stop
/// early (the shooting layer stops on classification events). Returns the
/// final (r, y) and whether the run reached r_end or was stopped.
pub fn integrate<F, S>(
    rhs: F,
    r0: f64,
    y0: [f64; 2],
    r_end: f64,
    cfg: &OdeConfig,
    mut on_step: S,
) -> Result<(f64, [f64; 2], Status)>
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
    S: FnMut(&StepRecord) -> bool,
{
    integrate_impl(
        &rhs,
        r0,
        y0,
        r_end,
        cfg,
        &mut on_step,
        &mut std::iter::empty(),
    )
}

/// Like [`integrate`], but lands exactly on every radius yielded by
/// `targets` (strictly increasing, all within (r0, r_end]); the step size
/// is clipped so each target is a step endpoint, never an interpolant.
pub fn integrate_through<F, S, T>(
    rhs: F,
    r0: f64,
    y0: [f64; 2],
    r_end: f64,
    cfg: &OdeConfig,
    mut targets: T,
    mut on_step: S,
) -> Result<(f64, [f64; 2], Status)>
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
    S: FnMut(&StepRecord) -> bool,
    T: Iterator<Item = f64>,
{
    integrate_impl(&rhs, r0, y0, r_end, cfg, &mut on_step, &mut targets)
}

fn integrate_impl<F, S>(
    rhs: &F,
    r0: f64,
    y0: [f64; 2],
    r_end: f64,
    cfg: &OdeConfig,
    on_step: &mut S,
    targets: &mut dyn Iterator<Item = f64>,
) -> Result<(f64, [f64; 2], Status)>
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
    S: FnMut(&StepRecord) -> bool,
{
    assert!(r_end > r0, "integration runs forward only");
    let mut r = r0;
    let mut y = y0;
    let mut k1 = rhs(r, y);
    let mut h = cfg.h_init.min(cfg.h_max).min(r_end - r0);
    let mut next_target = targets.next();
    while let Some(t) = next_target {
        // Skip targets at or before the start.
        if t > r0 {
            break;
        }
        next_target = targets.next();
    }

    for _ in 0..cfg.max_steps {
        if r >= r_end {
            return Ok((r, y, Status::ReachedEnd));
        }
        h = h.min(cfg.h_max).min(r_end - r);
        // Clip onto the next forced output radius.
        let mut forced = None;
        if let Some(t) = next_target {
            if r + h >= t {
                h = t - r;
                forced = Some(t);
            }
        }

        // Stage evaluations; k1 comes in via FSAL.
        let mut k = [[0.0f64; 2]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += h * A[s][j] * kj[0];
                ys[1] += h * A[s][j] * kj[1];
            }
            k[s] = rhs(r + C[s] * h, ys);
        }
        // Stage 7 evaluates at r + h with the fifth-order solution.
        let y1 = {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                ys[0] += h * A[6][j] * kj[0];
                ys[1] += h * A[6][j] * kj[1];
            }
            ys
        };

        if !y1[0].is_finite() || !y1[1].is_finite() {
            return Err(Error::IntegrationBlowup { r_last: r });
        }

        // Scaled RMS error over both components.
        let mut err = 0.0;
        for i in 0..2 {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let scale = cfg.atol + cfg.rtol * y[i].abs().max(y1[i].abs());
            let q = h * e / scale;
            err += q * q;
        }
        err = (err / 2.0).sqrt();

        if err <= 1.0 {
            // Accept. Build the dense-output coefficients.
            let rec = {
                let mut cont = [[0.0f64; 2]; 5];
                for i in 0..2 {
                    let dy = y1[i] - y[i];
                    let bspl = h * k[0][i] - dy;
                    let mut dsum = 0.0;
                    for (j, kj) in k.iter().enumerate() {
                        dsum += D[j] * kj[i];
                    }
                    cont[0][i] = y[i];
                    cont[1][i] = dy;
                    cont[2][i] = bspl;
                    cont[3][i] = dy - h * k[6][i] - bspl;
                    cont[4][i] = h * dsum;
                }
                StepRecord {
                    r0: r,
                    r1: if let Some(t) = forced { t } else { r + h },
                    y0: y,
                    y1,
                    cont,
                }
            };
            r = rec.r1;
            y = y1;
            k1 = k[6]; // FSAL
            if forced.is_some() {
                next_target = targets.next();
            }
            if !on_step(&rec) {
                return Ok((r, y, Status::Stopped));
            }
            let scale = if err == 0.0 {
                MAX_SCALE
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)
            };
            h *= scale;
        } else {
            // Reject and retry with a smaller step.
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, 1.0);
            if h <= 0.0 || h.is_nan() || r + h == r {
                return Err(Error::IntegrationBlowup { r_last: r });
            }
        }
    }
    Err(Error::IntegrationBlowup { r_last: r })
}
