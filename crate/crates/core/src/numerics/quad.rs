//! Composite Simpson quadrature on uniform grids.

/// Integrates samples f_0..f_n over n uniform intervals of width h.
///
/// Even n uses composite Simpson. Odd n >= 3 closes with one Simpson 3/8
/// block over the last three intervals, so the rule stays fourth order for
/// every interval count the library produces.
pub fn simpson_uniform(f: &[f64], h: f64) -> f64 {
    let n = f.len() - 1;
    assert!(
        n >= 2,
        "simpson_uniform needs at least 2 intervals, got {n}"
    );
    if n.is_multiple_of(2) {
        simpson_even(f, h)
    } else if n == 3 {
        simpson_38(f, h)
    } else {
        // n odd, n >= 5: even-count head plus a 3/8 tail block.
        simpson_even(&f[..n - 2], h) + simpson_38(&f[n - 3..], h)
    }
}

/// Composite Simpson over an even number of intervals.
fn simpson_even(f: &[f64], h: f64) -> f64 {
    let n = f.len() - 1;
    debug_assert!(n >= 2 && n.is_multiple_of(2));
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, &fi) in f.iter().enumerate().take(n).skip(1) {
        if i % 2 == 1 {
            odd += fi;
        } else {
            even += fi;
        }
    }
    h / 3.0 * (f[0] + f[n] + 4.0 * odd + 2.0 * even)
}

/// Simpson 3/8 rule over exactly three intervals.
fn simpson_38(f: &[f64], h: f64) -> f64 {
    debug_assert_eq!(f.len(), 4);
    3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> (Vec<f64>, f64) {
        let h = (b - a) / n as f64;
        ((0..=n).map(|i| f(a + i as f64 * h)).collect(), h)
    }

    #[test]
    fn exact_on_cubics_for_even_and_odd_interval_counts() {
        // int_0^2 (x^3 - 2x^2 + 5) dx = 4 - 16/3 + 10 = 26/3
        let exact = 26.0 / 3.0;
        for n in [4, 5, 7, 8, 64, 4095, 4096] {
            let (f, h) = sample(|x| x.powi(3) - 2.0 * x * x + 5.0, 0.0, 2.0, n);
            let got = simpson_uniform(&f, h);
            assert!(
                (got - exact).abs() < 1e-12 * exact,
                "n = {n}: got {got}, want {exact}"
            );
        }
    }

    #[test]
    fn three_interval_case_is_plain_38() {
        let (f, h) = sample(|x| x * x, 0.0, 3.0, 3);
        assert!((simpson_uniform(&f, h) - 9.0).abs() < 1e-13);
    }

    #[test]
    fn fourth_order_convergence_on_sine() {
        let exact = 2.0; // int_0^pi sin = 2
        let err = |n: usize| {
            let (f, h) = sample(f64::sin, 0.0, std::f64::consts::PI, n);
            (simpson_uniform(&f, h) - exact).abs()
        };
        let (e1, e2) = (err(64), err(128));
        let order = (e1 / e2).log2();
        assert!(
            (3.7..4.3).contains(&order),
            "observed order {order}, errors {e1:.3e} -> {e2:.3e}"
        );
    }

    #[test]
    fn odd_counts_converge_like_even_counts() {
        let exact = 1.0 - (-2.0f64).exp();
        let (f, h) = sample(|x| (-x).exp(), 0.0, 2.0, 501);
        assert!((simpson_uniform(&f, h) - exact).abs() < 1e-11);
    }
}
