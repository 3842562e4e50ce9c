//! Bracketed bisection on monotone sign data.

/// Bisects f over [lo, hi], where f(lo) and f(hi) have opposite signs
/// (either may be zero). Shrinks the bracket until it is narrower than
/// rel_tol * |midpoint| or until no representable point lies strictly
/// between the ends, then returns the midpoint. Passing rel_tol = 0 runs
/// to ulp exhaustion, which bounds |f(t)-1| residuals by rounding alone.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    debug_assert!(lo < hi, "bisect needs lo < hi");
    let f_lo = f(lo);
    // Orient so the "lo side" carries the non-positive sign.
    let sign = if f_lo > 0.0 { -1.0 } else { 1.0 };
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if sign * f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= rel_tol * mid.abs() {
            return 0.5 * (lo + hi);
        }
    }
}
