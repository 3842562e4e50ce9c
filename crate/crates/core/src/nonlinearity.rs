//! The built-in nonlinearity family g(s) = -m s + |s|^{p-1} s.
//!
//! One parametric family is enough to exercise every statement in the
//! library: the scaling machinery depends on the scalar-field solution only
//! through its gradient seminorm. The family has a closed-form primitive
//! G(s) = -m s^2/2 + |s|^{p+1}/(p+1), a closed-form first positive zero of
//! G at zeta0 = ((p+1) m / 2)^{1/(p-1)}, and it satisfies the standing
//! hypotheses (odd continuous g, linear decay rate -m at 0, subcritical
//! growth, G positive somewhere) whenever m > 0, 1 < p < (N+2)/(N-2).

use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters (m, p) of g(s) = -m s + |s|^{p-1} s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NonlinearityModel {
    /// Linear decay rate at the origin; must be positive.
    pub m: f64,
    /// Exponent of the focusing power term; must exceed 1.
    pub p: f64,
}

impl NonlinearityModel {
    pub fn new(m: f64, p: f64) -> Self {
        NonlinearityModel { m, p }
    }

    /// g(s) = -m s + |s|^{p-1} s. Odd, continuous, g(0) = 0.
    pub fn g(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        -self.m * s + s.abs().powf(self.p - 1.0) * s
    }

    /// Exact primitive G(s) = -m s^2/2 + |s|^{p+1}/(p+1), G(0) = 0. Even.
    pub fn g_primitive(&self, s: f64) -> f64 {
        -self.m * s * s / 2.0 + s.abs().powf(self.p + 1.0) / (self.p + 1.0)
    }

    /// g'(s) = -m + p |s|^{p-1}; the limit -m at s = 0.
    pub fn g_prime(&self, s: f64) -> f64 {
        -self.m + self.p * s.abs().powf(self.p - 1.0)
    }

    /// First positive zero of G: zeta0 = ((p+1) m / 2)^{1/(p-1)}.
    /// Trajectory energy 1/2 v'^2 + G(v) is negative wherever |v| < zeta0
    /// and v' = 0, which is what traps undershooting trajectories.
    pub fn zeta0(&self) -> f64 {
        ((self.p + 1.0) * self.m / 2.0).powf(1.0 / (self.p - 1.0))
    }

    /// Positive zero of g: s* = m^{1/(p-1)}, the rest point below zeta0.
    pub fn g_zero(&self) -> f64 {
        self.m.powf(1.0 / (self.p - 1.0))
    }

    /// Subcriticality bound for dimension N: p must stay below 2* - 1.
    pub fn subcritical_bound(n: u32) -> f64 {
        (n as f64 + 2.0) / (n as f64 - 2.0)
    }

    /// Checks the standing hypotheses for dimension N and returns the full
    /// report; convenience gate for callers that only need pass/fail.
    pub fn validated(&self, n: u32) -> Result<()> {
        let report = validate_hypotheses(self, n);
        if report.accepted {
            Ok(())
        } else {
            Err(Error::Hypothesis(report.diagnostic.unwrap_or_default()))
        }
    }
}

/// Outcome of checking the model hypotheses in a given dimension.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub m: f64,
    pub p: f64,
    #[serde(rename = "N")]
    pub n: u32,
    /// zeta0 when it is defined (m > 0, p > 1).
    pub zeta0: Option<f64>,
    /// The subcritical bound 2* - 1 = (N+2)/(N-2).
    pub subcritical_bound: f64,
    /// g continuous with g(0) = 0; automatic for the family.
    pub g1_continuous: bool,
    /// Linear decay rate at 0 is -m < 0.
    pub g2_negative_rate: bool,
    /// Strictly subcritical growth: p < 2* - 1.
    pub g3_subcritical: bool,
    /// G positive somewhere; holds whenever p > 1 since p + 1 > 2.
    pub g4_positive_primitive: bool,
    pub accepted: bool,
    /// Names the first failed hypothesis; None when accepted.
    pub diagnostic: Option<String>,
}

/// Checks (g1)-(g4) for the model in dimension N >= 3. Each rejection
/// carries a distinct diagnostic naming the violated hypothesis.
pub fn validate_hypotheses(model: &NonlinearityModel, n: u32) -> ValidationReport {
    assert!(n >= 3, "dimension must be at least 3");
    let bound = NonlinearityModel::subcritical_bound(n);
    let g2 = model.m > 0.0;
    let p_ok = model.p > 1.0;
    let g3 = p_ok && model.p < bound;
    let diagnostic = if !g2 {
        Some(format!("(g2) requires m > 0, got m = {}", model.m))
    } else if !p_ok {
        Some(format!(
            "(g1)/(g4) require a superlinear power term, got p = {} <= 1",
            model.p
        ))
    } else if !g3 {
        Some(format!(
            "(g3) requires subcritical growth p < 2* - 1 = {} at N = {}, got p = {} (critical exponent reached)",
            bound, n, model.p
        ))
    } else {
        None
    };
    let accepted = diagnostic.is_none();
    ValidationReport {
        m: model.m,
        p: model.p,
        n,
        zeta0: (g2 && p_ok).then(|| model.zeta0()),
        subcritical_bound: bound,
        g1_continuous: p_ok,
        g2_negative_rate: g2,
        g3_subcritical: g3,
        g4_positive_primitive: p_ok,
        accepted,
        diagnostic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_values_for_cubic_model() {
        let model = NonlinearityModel::new(1.0, 3.0);
        assert_eq!(model.g(0.0), 0.0);
        assert_eq!(model.g(1.0), 0.0); // -1 + 1
        assert_eq!(model.g(2.0), 6.0); // -2 + 8
    }

    #[test]
    fn primitive_values_for_cubic_model() {
        let model = NonlinearityModel::new(1.0, 3.0);
        assert!((model.g_primitive(2f64.sqrt())).abs() < 1e-15); // zeta0 = sqrt(2)
        assert!((model.g_primitive(1.0) + 0.25).abs() < 1e-15); // -1/2 + 1/4
        assert!((model.g_primitive(2.0) - 2.0).abs() < 1e-15); // -2 + 4
    }

    #[test]
    fn zeta0_is_a_zero_of_the_primitive() {
        for (m, p) in [(1.0, 3.0), (1.0, 2.0), (2.0, 2.5), (0.3, 1.7), (5.0, 4.0)] {
            let model = NonlinearityModel::new(m, p);
            let z = model.zeta0();
            assert!(
                model.g_primitive(z).abs() < 1e-12,
                "G(zeta0) = {} for (m={m}, p={p})",
                model.g_primitive(z)
            );
            // g's zero sits strictly below G's zero.
            assert!(model.g_zero() < z);
        }
    }

    #[test]
    fn g_is_odd_and_primitive_is_even() {
        let model = NonlinearityModel::new(2.0, 2.5);
        for i in 0..200 {
            let s = -10.0 + 0.1 * i as f64;
            assert!((model.g(-s) + model.g(s)).abs() < 1e-12 * (1.0 + model.g(s).abs()));
            assert!(
                (model.g_primitive(-s) - model.g_primitive(s)).abs()
                    < 1e-12 * (1.0 + model.g_primitive(s).abs())
            );
        }
    }

    #[test]
    fn primitive_is_consistent_with_g_by_finite_differences() {
        // |G(s+h) - G(s) - h g(s)| = O(h^2), checked over a grid of s and h.
        let model = NonlinearityModel::new(1.0, 2.0);
        for i in 0..40 {
            let s = -4.0 + 0.2 * i as f64;
            for h in [1e-3, 1e-4, 1e-5] {
                let lhs = (model.g_primitive(s + h) - model.g_primitive(s) - h * model.g(s)).abs();
                // G'' = g' is bounded by ~10 on this grid; allow 10 h^2.
                assert!(lhs < 10.0 * h * h, "s={s}, h={h}: defect {lhs}");
            }
        }
    }

    #[test]
    fn validation_accepts_subcritical_models() {
        assert!(validate_hypotheses(&NonlinearityModel::new(1.0, 3.0), 3).accepted); // 2*-1 = 5
        assert!(validate_hypotheses(&NonlinearityModel::new(1.0, 1.5), 6).accepted);
        // 2*-1 = 2
    }

    #[test]
    fn validation_rejects_critical_exponent_with_named_diagnostic() {
        let report = validate_hypotheses(&NonlinearityModel::new(1.0, 5.0), 3);
        assert!(!report.accepted);
        assert!(!report.g3_subcritical);
        let msg = report.diagnostic.unwrap();
        assert!(msg.contains("critical"), "diagnostic: {msg}");
    }

    #[test]
    fn validation_rejects_bad_m_and_bad_p_distinctly() {
        let bad_m = validate_hypotheses(&NonlinearityModel::new(0.0, 3.0), 3);
        assert!(!bad_m.accepted);
        assert!(bad_m.diagnostic.as_deref().unwrap().contains("m > 0"));

        let bad_p = validate_hypotheses(&NonlinearityModel::new(1.0, 1.0), 3);
        assert!(!bad_p.accepted);
        assert!(bad_p.diagnostic.as_deref().unwrap().contains("p"));
        assert_ne!(bad_m.diagnostic, bad_p.diagnostic);
    }

    #[test]
    fn validated_gate_maps_to_hypothesis_error() {
        let err = NonlinearityModel::new(1.0, 5.0).validated(3).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
    }
}
