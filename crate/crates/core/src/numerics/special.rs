//! Half-integer Gamma values and unit-sphere surface areas.
//!
//! Integrals over R^N of radial functions reduce to one-dimensional
//! integrals against omega_{N-1} r^{N-1} dr, where omega_{N-1} is the
//! surface area of the unit sphere, 2 pi^{N/2} / Gamma(N/2). Gaussian
//! trial integrals need Gamma at half-integer arguments as well, so a
//! two-seed recurrence covers every use in this crate exactly.

use std::f64::consts::PI;

/// Gamma(k/2) for integer k >= 1, by Gamma(x+1) = x Gamma(x) from the
/// seeds Gamma(1/2) = sqrt(pi) and Gamma(1) = 1.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1, "gamma_half needs k >= 1");
    let (mut x, mut j) = if k % 2 == 1 { (PI.sqrt(), 1) } else { (1.0, 2) };
    while j < k {
        x *= j as f64 / 2.0;
        j += 2;
    }
    x
}

/// Surface area omega_{N-1} of the unit sphere in R^N.
pub fn sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn gamma_half_matches_known_values() {
        assert!(rel(gamma_half(1), PI.sqrt()) < 1e-15);
        assert!(rel(gamma_half(2), 1.0) < 1e-15);
        assert!(rel(gamma_half(3), PI.sqrt() / 2.0) < 1e-15);
        assert!(rel(gamma_half(4), 1.0) < 1e-15);
        assert!(rel(gamma_half(5), 0.75 * PI.sqrt()) < 1e-15);
        assert!(rel(gamma_half(6), 2.0) < 1e-15);
        // Gamma(7/2) = 15/8 sqrt(pi)
        assert!(rel(gamma_half(7), 15.0 / 8.0 * PI.sqrt()) < 1e-15);
        assert!(rel(gamma_half(12), 120.0) < 1e-15);
    }

    #[test]
    fn sphere_areas_match_closed_forms() {
        assert!(rel(sphere_area(3), 4.0 * PI) < 1e-15);
        assert!(rel(sphere_area(4), 2.0 * PI * PI) < 1e-15);
        assert!(rel(sphere_area(5), 8.0 * PI * PI / 3.0) < 1e-15);
        assert!(rel(sphere_area(6), PI.powi(3)) < 1e-15);
    }
}
