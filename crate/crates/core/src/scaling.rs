//! The scaling map between scalar-field profiles and Kirchhoff solutions.
//!
//! If v solves -Delta v = g(v) with K = int |grad v|^2, then u = v(t x)
//! solves -(a + b int |grad u|^2) Delta u = g(u) exactly when
//!
//! ```text
//! f(t) = a t^2 + b K t^{4-N} = 1.
//! ```
//!
//! The root structure of f splits by dimension: N = 3 gives one root of a
//! quadratic for every (a, b, K); N = 4 gives t = sqrt((1 - bK)/a) when
//! bK < 1 and nothing otherwise; N >= 5 makes f coercive with a single
//! interior minimum at t_star, so roots exist iff f(t_star) <= 1, which
//! is a threshold in a alone: a <= a_max(N, b, K).
//!
//! For N >= 5 the factored form f(t) = f(t_star) phi(t/t_star) with
//! phi(s) = ((N-4) s^2 + 2 s^{4-N})/(N-2) keeps the bisection for the two
//! roots well conditioned: phi(1) = 1 is the exact minimum regardless of
//! how a compares to a_max in floating point.

use std::fmt;

use crate::error::{Error, Result};
use crate::functional;
use crate::numerics::bisect::bisect;

/// Relative half-width of the a ~ a_max band reported as a double root.
const A_EQ_REL: f64 = 1e-9;

/// Kirchhoff diffusion coefficients in -(a + b int |grad u|^2) Delta u.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct KirchhoffProblem {
    pub a: f64,
    pub b: f64,
}

impl KirchhoffProblem {
    pub fn new(a: f64, b: f64) -> Self {
        KirchhoffProblem { a, b }
    }

    pub fn validated(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::Hypothesis(format!(
                "coefficient a must be positive and finite, got {}",
                self.a
            )));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::Hypothesis(format!(
                "coefficient b must be positive and finite, got {}",
                self.b
            )));
        }
        Ok(())
    }
}

/// Root structure of the scaling equation for one (N, a, b, K).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    UniqueN3,
    UniqueN4,
    NoneN4,
    TwoRoots,
    DoubleRoot,
    NoRoot,
}

impl fmt::Display for Regime {
    /// Same tags as the serialized form, for CSV cells.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::UniqueN3 => "UNIQUE_N3",
            Regime::UniqueN4 => "UNIQUE_N4",
            Regime::NoneN4 => "NONE_N4",
            Regime::TwoRoots => "TWO_ROOTS",
            Regime::DoubleRoot => "DOUBLE_ROOT",
            Regime::NoRoot => "NO_ROOT",
        })
    }
}

/// Solved scaling equation: the regime, the roots in increasing order,
/// and for N >= 5 the minimizer diagnostics.
#[derive(Clone, Debug)]
pub struct ScalingRoots {
    pub regime: Regime,
    pub roots: Vec<f64>,
    /// Minimizer of f (N >= 5 only).
    pub t_star: Option<f64>,
    /// f(t_star) computed as (a/a_max)^{(N-4)/(N-2)} (N >= 5 only).
    pub f_min: Option<f64>,
    /// Existence threshold in a (N >= 5 only).
    pub a_max: Option<f64>,
}

/// Existence threshold for N >= 5.
#[derive(Clone, Copy, Debug)]
pub struct Threshold {
    pub a_max: f64,
    /// Minimizer of f at a = a_max; the unique root there.
    pub t_star: f64,
}

/// f(t) - 1, the defect of a candidate root.
pub fn scaling_residual(n: u32, a: f64, b: f64, k: f64, t: f64) -> f64 {
    a * t * t + b * k * t.powi(4 - n as i32) - 1.0
}

fn check_inputs(n: u32, problem: &KirchhoffProblem, k: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::Dimension {
            n,
            what: "the scaling equation is defined for N >= 3",
        });
    }
    problem.validated()?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Hypothesis(format!(
            "gradient mass K must be positive and finite, got {k}"
        )));
    }
    Ok(())
}

/// a_max(N, b, K) = ((N-4)/(N-2))^{(N-2)/(N-4)} (2/((N-4) b K))^{2/(N-4)},
/// the largest a for which the scaling equation has a root when N >= 5.
pub fn threshold_a_max(n: u32, b: f64, k: f64) -> Result<Threshold> {
    if n < 5 {
        return Err(Error::Dimension {
            n,
            what: "the existence threshold a_max requires N >= 5",
        });
    }
    check_inputs(n, &KirchhoffProblem::new(1.0, b), k)?;
    let nf = n as f64;
    let a_max = ((nf - 4.0) / (nf - 2.0)).powf((nf - 2.0) / (nf - 4.0))
        * (2.0 / ((nf - 4.0) * b * k)).powf(2.0 / (nf - 4.0));
    let t_star = t_star_of(n, a_max, b, k);
    Ok(Threshold { a_max, t_star })
}

/// Minimizer of f: t_star = ((N-4) b K / (2a))^{1/(N-2)}.
fn t_star_of(n: u32, a: f64, b: f64, k: f64) -> f64 {
    let nf = n as f64;
    ((nf - 4.0) * b * k / (2.0 * a)).powf(1.0 / (nf - 2.0))
}

/// Solves f(t) = 1 and classifies the root structure.
pub fn solve_scaling(n: u32, problem: &KirchhoffProblem, k: f64) -> Result<ScalingRoots> {
    check_inputs(n, problem, k)?;
    let (a, b) = (problem.a, problem.b);
    match n {
        3 => {
            // a t^2 + b K t = 1; the positive quadratic root, written to
            // avoid cancellation.
            let bk = b * k;
            let t = 2.0 / (bk + (bk * bk + 4.0 * a).sqrt());
            Ok(ScalingRoots {
                regime: Regime::UniqueN3,
                roots: vec![t],
                t_star: None,
                f_min: None,
                a_max: None,
            })
        }
        4 => {
            // a t^2 + b K = 1.
            let bk = b * k;
            if bk < 1.0 {
                let t = ((1.0 - bk) / a).sqrt();
                Ok(ScalingRoots {
                    regime: Regime::UniqueN4,
                    roots: vec![t],
                    t_star: None,
                    f_min: None,
                    a_max: None,
                })
            } else {
                Ok(ScalingRoots {
                    regime: Regime::NoneN4,
                    roots: vec![],
                    t_star: None,
                    f_min: None,
                    a_max: None,
                })
            }
        }
        _ => solve_high_dimension(n, a, b, k),
    }
}

fn solve_high_dimension(n: u32, a: f64, b: f64, k: f64) -> Result<ScalingRoots> {
    let nf = n as f64;
    let threshold = threshold_a_max(n, b, k)?;
    let a_max = threshold.a_max;
    let t_star = t_star_of(n, a, b, k);
    // f(t_star) = (a/a_max)^{(N-4)/(N-2)}; exactly 1 when a == a_max.
    let f_min = ((a / a_max).ln() * (nf - 4.0) / (nf - 2.0)).exp();
    let diag = |regime, roots| ScalingRoots {
        regime,
        roots,
        t_star: Some(t_star),
        f_min: Some(f_min),
        a_max: Some(a_max),
    };

    if a > a_max * (1.0 + A_EQ_REL) {
        return Ok(diag(Regime::NoRoot, vec![]));
    }
    if (a - a_max).abs() <= A_EQ_REL * a_max {
        return Ok(diag(Regime::DoubleRoot, vec![t_star]));
    }

    // Two roots of phi(s) = 1/f_min on either side of s = 1 with
    // phi(s) = ((N-4) s^2 + 2 s^{4-N})/(N-2), then t = s t_star.
    let target = 1.0 / f_min;
    let phi = |s: f64| ((nf - 4.0) * s * s + 2.0 * s.powi(4 - n as i32)) / (nf - 2.0);
    let obj = |s: f64| phi(s) - target;

    let mut s_lo = 0.5;
    while phi(s_lo) < target {
        s_lo *= 0.5;
    }
    let s1 = bisect(obj, s_lo, 1.0, 0.0);

    let mut s_hi = 2.0;
    while phi(s_hi) < target {
        s_hi *= 2.0;
    }
    let s2 = bisect(obj, 1.0, s_hi, 0.0);

    Ok(diag(Regime::TwoRoots, vec![s1 * t_star, s2 * t_star]))
}

/// Ordering data for two scalar-field levels under the same (a, b):
/// scaling factors and reduced actions for K_first < K_second.
#[derive(Clone, Copy, Debug)]
pub struct OrderingComparison {
    pub t_first: f64,
    pub t_second: f64,
    pub action_first: f64,
    pub action_second: f64,
}

/// Compares the Kirchhoff solutions generated by two profile levels with
/// K_first < K_second in a dimension where each level yields exactly one
/// solution (N = 3 always, N = 4 when b K_second < 1). A larger K forces
/// a smaller t and a larger action.
pub fn compare_solutions(
    n: u32,
    problem: &KirchhoffProblem,
    k_first: f64,
    k_second: f64,
) -> Result<OrderingComparison> {
    check_inputs(n, problem, k_first.min(k_second))?;
    if k_first >= k_second || k_first.is_nan() || k_second.is_nan() {
        return Err(Error::Hypothesis(format!(
            "ordering comparison requires K_first < K_second, got {k_first} vs {k_second}"
        )));
    }
    match n {
        3 => {}
        4 => {
            if problem.b * k_second >= 1.0 {
                return Err(Error::Hypothesis(format!(
                    "N = 4 ordering requires b K_second < 1, got {}",
                    problem.b * k_second
                )));
            }
        }
        _ => {
            return Err(Error::Hypothesis(format!(
                "the uniqueness-based ordering applies to N = 3 or 4, got N = {n}"
            )));
        }
    }
    let t_first = solve_scaling(n, problem, k_first)?.roots[0];
    let t_second = solve_scaling(n, problem, k_second)?.roots[0];
    let action_first = functional::action_from_scaling(n, problem, k_first, t_first).i_func;
    let action_second = functional::action_from_scaling(n, problem, k_second, t_second).i_func;
    Ok(OrderingComparison {
        t_first,
        t_second,
        action_first,
        action_second,
    })
}
