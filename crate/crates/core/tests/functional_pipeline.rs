//! End-to-end pipeline checks: shoot a scalar-field profile, scale it
//! into a Kirchhoff solution, and hold every consistency gate at once.
//!
//! PDE-residual gates are frozen from measured values: ground states sit
//! at 3.4e-5 or below on the 4096-point grid, the one-node branch at
//! 4.0e-4 and the two-node branch at 1.9e-3 (fourth-derivative growth
//! with the oscillation count), all quartering under grid halving.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use kirchhoff_core::functional::{
    action_definition, action_from_scaling, build_kirchhoff_solution, fd_radial_residual,
    kirchhoff_pohozaev_residual, nonnegativity_sample, pde_residual, round_trip_scalar,
};
use kirchhoff_core::scaling::{
    compare_solutions, scaling_residual, solve_scaling, threshold_a_max, Regime,
};
use kirchhoff_core::shooting::{shoot_state, RadialProfile, ShootConfig};
use kirchhoff_core::{KirchhoffProblem, NonlinearityModel};

/// (m, p, N, nodes, pde residual gate at 4096 grid points)
const MATRIX: &[(f64, f64, u32, usize, f64)] = &[
    (1.0, 3.0, 3, 0, 1e-4),
    (1.0, 3.0, 3, 1, 1e-3),
    (1.0, 3.0, 3, 2, 5e-3),
    (1.0, 2.0, 3, 0, 1e-4),
    (2.0, 2.5, 3, 0, 1e-4),
    (1.0, 2.0, 4, 0, 1e-4),
    (2.0, 2.5, 4, 0, 1e-4),
    (1.0, 2.0, 5, 0, 1e-4),
    (1.0, 1.5, 6, 0, 1e-4),
];

type ProfileCache = Mutex<HashMap<(u64, u64, u32, usize), Arc<RadialProfile>>>;

fn profile(m: f64, p: f64, n: u32, nodes: usize) -> Arc<RadialProfile> {
    static CACHE: OnceLock<ProfileCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (m.to_bits(), p.to_bits(), n, nodes);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let model = NonlinearityModel::new(m, p);
    let built = Arc::new(shoot_state(&model, n, nodes, &ShootConfig::default()).unwrap());
    cache.lock().unwrap().insert(key, built.clone());
    built
}

/// Kirchhoff coefficients exercised per dimension: unit coefficients at
/// N = 3, a barrier-respecting b at N = 4, and 0.9 a_max (both branches)
/// at N >= 5.
fn problems_for(n: u32, k: f64) -> Vec<KirchhoffProblem> {
    match n {
        3 => vec![KirchhoffProblem::new(1.0, 1.0)],
        4 => vec![KirchhoffProblem::new(1.0, 0.5 / k)],
        _ => {
            let th = threshold_a_max(n, 1.0, k).unwrap();
            vec![KirchhoffProblem::new(0.9 * th.a_max, 1.0)]
        }
    }
}

#[test]
fn matrix_pipelines_hold_every_scalar_gate() {
    for &(m, p, n, nodes, pde_gate) in MATRIX {
        let base = profile(m, p, n, nodes);
        let k = base.k_grad;
        for problem in problems_for(n, k) {
            let roots = solve_scaling(n, &problem, k).unwrap();
            assert!(!roots.roots.is_empty(), "no roots for N={n}");
            for &t in &roots.roots {
                let case = format!("(m={m}, p={p}, N={n}, nodes={nodes}, t={t:.3e})");
                assert!(
                    scaling_residual(n, problem.a, problem.b, k, t).abs() < 1e-10,
                    "{case}: root residual"
                );
                let sp = build_kirchhoff_solution(&base, &problem, t).unwrap();
                assert!(
                    sp.scale_consistency() < 1e-8,
                    "{case}: quadrature vs closed scaling drift {}",
                    sp.scale_consistency()
                );
                let closed = action_from_scaling(n, &problem, k, t);
                let i_def = action_definition(&sp);
                assert!(
                    ((i_def - closed.i_func) / closed.i_func).abs() < 1e-5,
                    "{case}: action by definition {i_def} vs closed {}",
                    closed.i_func
                );
                assert!(
                    ((closed.i_func - closed.i_reduced) / closed.i_func).abs() < 1e-12,
                    "{case}: closed action forms disagree"
                );
                let kp = kirchhoff_pohozaev_residual(&sp);
                assert!(kp < 1e-5, "{case}: Kirchhoff Pohozaev {kp}");
                let pde = pde_residual(&sp).unwrap();
                assert!(
                    pde < pde_gate,
                    "{case}: pde residual {pde} vs gate {pde_gate}"
                );
                let rt = round_trip_scalar(&sp).unwrap();
                assert!(
                    rt.pohozaev_residual < 1e-4,
                    "{case}: round-trip Pohozaev {}",
                    rt.pohozaev_residual
                );
                assert!(
                    rt.pde_residual < pde_gate,
                    "{case}: round-trip pde {}",
                    rt.pde_residual
                );
                // Round trip rescales by h = sqrt(a + b K_u) = 1/t at a root.
                assert!(
                    ((rt.h * t) - 1.0).abs() < 1e-8,
                    "{case}: h*t = {}",
                    rt.h * t
                );
            }
        }
    }
}

#[test]
fn grid_halving_quarters_the_pde_residual() {
    // Cases: N = 3 unit coefficients, N = 4 at b K = 0.5, N = 5 both
    // branches at 0.9 a_max. Measured ratios are 0.250 across the board;
    // the band allows truncation-order wobble.
    let fine_cfg = ShootConfig {
        grid_points: 8191,
        ..ShootConfig::default()
    };
    for &(m, p, n, nodes) in &[(1.0, 3.0, 3u32, 0usize), (1.0, 2.0, 4, 0), (1.0, 2.0, 5, 0)] {
        let model = NonlinearityModel::new(m, p);
        let base = profile(m, p, n, nodes);
        let fine = shoot_state(&model, n, nodes, &fine_cfg).unwrap();
        let k = base.k_grad;
        for problem in problems_for(n, k) {
            for &t in &solve_scaling(n, &problem, k).unwrap().roots {
                let coarse_res =
                    pde_residual(&build_kirchhoff_solution(&base, &problem, t).unwrap()).unwrap();
                // The fine profile's own root differs imperceptibly; reuse
                // its own gradient mass to stay exactly on the relation.
                let t_fine = solve_scaling(n, &problem, fine.k_grad)
                    .unwrap()
                    .roots
                    .iter()
                    .copied()
                    .min_by(|x, y| (x - t).abs().partial_cmp(&(y - t).abs()).unwrap())
                    .unwrap();
                let fine_res =
                    pde_residual(&build_kirchhoff_solution(&fine, &problem, t_fine).unwrap())
                        .unwrap();
                let ratio = fine_res / coarse_res;
                let case = format!("(m={m}, p={p}, N={n}, t={t:.3e})");
                assert!(coarse_res < 1e-4, "{case}: coarse residual {coarse_res}");
                assert!(
                    (0.2..=0.3).contains(&ratio),
                    "{case}: halving ratio {ratio} (coarse {coarse_res}, fine {fine_res})"
                );
            }
        }
    }
}

#[test]
fn action_ordering_follows_gradient_mass() {
    // Real gradient masses at N = 3: the ground state and the one-node
    // branch of (m, p) = (1, 3).
    let k0 = profile(1.0, 3.0, 3, 0).k_grad;
    let k1 = profile(1.0, 3.0, 3, 1).k_grad;
    assert!(k0 < k1);
    let problem = KirchhoffProblem::new(1.0, 1.0);
    let cmp = compare_solutions(3, &problem, k0, k1).unwrap();
    assert!(
        cmp.t_second < cmp.t_first,
        "larger gradient mass must scale shorter: {} vs {}",
        cmp.t_second,
        cmp.t_first
    );
    assert!(
        cmp.action_first < cmp.action_second,
        "larger gradient mass must cost more action: {} vs {}",
        cmp.action_first,
        cmp.action_second
    );
    // The comparison must agree with the closed forms it is built from.
    let a0 = action_from_scaling(3, &problem, k0, cmp.t_first).i_func;
    let a1 = action_from_scaling(3, &problem, k1, cmp.t_second).i_func;
    assert!(((cmp.action_first - a0) / a0).abs() < 1e-14);
    assert!(((cmp.action_second - a1) / a1).abs() < 1e-14);

    // Synthetic masses at N = 4, both under the barrier b K < 1.
    let problem4 = KirchhoffProblem::new(1.0, 0.1);
    let cmp4 = compare_solutions(4, &problem4, 2.0, 5.0).unwrap();
    assert!(cmp4.t_second < cmp4.t_first);
    assert!(cmp4.action_first < cmp4.action_second);
}

#[test]
fn n5_branch_structure_across_the_threshold() {
    let base = profile(1.0, 2.0, 5, 0);
    let k = base.k_grad;
    let model = NonlinearityModel::new(1.0, 2.0);
    let a_max = threshold_a_max(5, 1.0, k).unwrap().a_max;

    // Below the threshold: two branches with distinct actions.
    let below = KirchhoffProblem::new(0.9 * a_max, 1.0);
    let roots = solve_scaling(5, &below, k).unwrap();
    assert_eq!(roots.regime, Regime::TwoRoots);
    let (t1, t2) = (roots.roots[0], roots.roots[1]);
    assert!(t1 < t2);
    let i1 = action_from_scaling(5, &below, k, t1).i_func;
    let i2 = action_from_scaling(5, &below, k, t2).i_func;
    assert!(
        ((i1 - i2) / i2).abs() > 1e-1,
        "branch actions must be distinct: {i1} vs {i2}"
    );
    for &t in &[t1, t2] {
        let sp = build_kirchhoff_solution(&base, &below, t).unwrap();
        assert!(kirchhoff_pohozaev_residual(&sp) < 1e-5);
        assert!(pde_residual(&sp).unwrap() < 1e-4);
    }

    // At the threshold: a single degenerate branch, still a solution.
    let at = KirchhoffProblem::new(a_max, 1.0);
    let roots_at = solve_scaling(5, &at, k).unwrap();
    assert_eq!(roots_at.regime, Regime::DoubleRoot);
    assert_eq!(roots_at.roots.len(), 1);
    let sp_star = build_kirchhoff_solution(&base, &at, roots_at.roots[0]).unwrap();
    assert!(kirchhoff_pohozaev_residual(&sp_star) < 1e-5);
    assert!(pde_residual(&sp_star).unwrap() < 1e-4);

    // Above the threshold: no scaling root exists, and the Kirchhoff
    // action stays nonnegative over the Gaussian trial family.
    let above = KirchhoffProblem::new(1.1 * a_max, 1.0);
    let roots_above = solve_scaling(5, &above, k).unwrap();
    assert_eq!(roots_above.regime, Regime::NoRoot);
    assert!(roots_above.roots.is_empty());
    let report = nonnegativity_sample(5, &above, &model, 500, 0).unwrap();
    assert!(
        report.pass && report.min_action >= -1e-10,
        "min trial action {} at alpha {} sigma {}",
        report.min_action,
        report.min_alpha,
        report.min_sigma
    );

    // Control: deep inside the existence regime the same family finds a
    // strictly negative trial, so the probe above has teeth.
    let deep = KirchhoffProblem::new(0.1 * a_max, 1.0);
    let control = nonnegativity_sample(5, &deep, &model, 500, 0).unwrap();
    assert!(
        control.min_action < -1e-20,
        "expected a negative trial deep below the threshold, got {}",
        control.min_action
    );
}

#[test]
fn an_off_coefficient_fails_the_scalar_residual() {
    let base = profile(1.0, 3.0, 3, 0);
    let problem = KirchhoffProblem::new(1.0, 1.0);
    let t = solve_scaling(3, &problem, base.k_grad).unwrap().roots[0];
    let sp = build_kirchhoff_solution(&base, &problem, t).unwrap();
    let model = NonlinearityModel::new(1.0, 3.0);
    let wrong = fd_radial_residual(&sp.grid, &sp.values, 2.0 * sp.coeff(), &model, 3).unwrap();
    assert!(
        wrong > 1e-2,
        "doubling the diffusion coefficient must break the residual, got {wrong}"
    );
}
