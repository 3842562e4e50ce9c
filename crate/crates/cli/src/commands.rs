//! The five subcommands. Each returns the process exit code; artifact
//! bytes are assembled in memory and written once so identical runs
//! produce identical files.

use std::fs;
use std::path::Path;

use kirchhoff_core::functional::{
    action_from_scaling, build_kirchhoff_solution, kirchhoff_pohozaev_residual, pde_residual,
    round_trip_scalar,
};
use kirchhoff_core::report::{
    action_report, enveloped, scaling_report, ActionReport, ProfileSidecar, ScalingReport,
};
use kirchhoff_core::scaling::{scaling_residual, solve_scaling, threshold_a_max};
use kirchhoff_core::shooting::{shoot_state, RadialProfile};
use kirchhoff_core::{
    Error, KirchhoffProblem, NonlinearityModel, Regime, ScalingRoots, VerifyTolerances,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::{
    Branch, CliError, GroundStateArgs, KirchhoffArgs, NumericOpts, RangeScale, SweepArgs,
    SweepLevel, ThresholdArgs,
};

type CmdResult = Result<i32, CliError>;

fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report types serialize");
    out.push('\n');
    out
}

fn write_artifact(path: &Path, bytes: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, bytes)?;
    Ok(())
}

fn profile_csv(profile: &RadialProfile) -> String {
    let mut out = String::from("r,v,dv\n");
    for ((r, v), dv) in profile
        .grid
        .iter()
        .zip(&profile.values)
        .zip(&profile.derivs)
    {
        out.push_str(&format!("{r},{v},{dv}\n"));
    }
    out
}

pub fn ground_state(numerics: &NumericOpts, args: &GroundStateArgs) -> CmdResult {
    let mut numerics = numerics.clone();
    if let Some(tol) = args.tol {
        numerics.shoot_tol = tol;
    }
    let model = NonlinearityModel::new(args.m, args.p);
    let profile = shoot_state(&model, args.n, args.nodes, &numerics.shoot_config())
        .map_err(CliError::Core)?;
    let json = to_json(&enveloped(
        numerics.echo(),
        ProfileSidecar::from_profile(&profile),
    ));
    write_artifact(&args.out_dir.join("ground_state.json"), &json)?;
    write_artifact(
        &args.out_dir.join("ground_state.csv"),
        &profile_csv(&profile),
    )?;
    print!("{json}");
    Ok(0)
}

/// One built and verified scaling branch.
#[derive(Serialize)]
struct BranchReport {
    branch: &'static str,
    #[serde(rename = "N")]
    n: u32,
    a: f64,
    b: f64,
    m: f64,
    p: f64,
    nodes: usize,
    xi: f64,
    #[serde(rename = "K")]
    k: f64,
    regime: Regime,
    #[serde(flatten)]
    actions: ActionReport,
    scale_consistency: f64,
    root_residual: f64,
    round_trip_pohozaev_residual: f64,
    round_trip_pde_residual: f64,
    gates_passed: bool,
}

#[derive(Serialize)]
struct KirchhoffRun {
    scaling: ScalingReport,
    solutions: Vec<BranchReport>,
    gates_passed: bool,
}

/// Roots to build, labeled for artifact names. Two-root regimes honor
/// --branch; single-root regimes always yield the one root as "unique".
fn selected_branches(roots: &ScalingRoots, branch: Branch) -> Vec<(&'static str, f64)> {
    match roots.roots.as_slice() {
        [t] => vec![("unique", *t)],
        [t1, t2] => match branch {
            Branch::Lower => vec![("lower", *t1)],
            Branch::Upper => vec![("upper", *t2)],
            Branch::All => vec![("lower", *t1), ("upper", *t2)],
        },
        _ => Vec::new(),
    }
}

pub fn kirchhoff(numerics: &NumericOpts, args: &KirchhoffArgs) -> CmdResult {
    let model = NonlinearityModel::new(args.m, args.p);
    let problem = KirchhoffProblem::new(args.a, args.b);
    problem.validated().map_err(CliError::Core)?;
    let base = shoot_state(&model, args.n, args.nodes, &numerics.shoot_config())
        .map_err(CliError::Core)?;
    let roots = solve_scaling(args.n, &problem, base.k_grad).map_err(CliError::Core)?;
    let scaling = scaling_report(args.n, &problem, base.k_grad, &roots);
    if roots.roots.is_empty() {
        // Nonexistence: print the regime report and signal it in the
        // exit code rather than failing.
        print!("{}", to_json(&enveloped(numerics.echo(), scaling)));
        return Ok(4);
    }

    let gates = VerifyTolerances::default();
    let mut solutions = Vec::new();
    let mut all_passed = true;
    for (label, t) in selected_branches(&roots, args.branch) {
        let sp = build_kirchhoff_solution(&base, &problem, t).map_err(CliError::Core)?;
        let actions = action_report(&sp).map_err(CliError::Core)?;
        let rt = round_trip_scalar(&sp).map_err(CliError::Core)?;
        let root_residual = scaling_residual(args.n, args.a, args.b, base.k_grad, t).abs();
        let def_vs_closed = ((actions.i_definition - actions.i_func) / actions.i_func).abs();
        let closed_forms = ((actions.i_func - actions.i_reduced) / actions.i_func).abs();
        let gates_passed = actions.pohozaev_residual < gates.pohozaev_kirchhoff
            && actions.pde_residual < gates.pde_residual
            && def_vs_closed < gates.action_def_vs_closed
            && closed_forms < gates.action_closed_forms
            && sp.scale_consistency() < gates.scaling_identity
            && root_residual < gates.root_residual
            && rt.pohozaev_residual < gates.pde_residual
            && rt.pde_residual < gates.pde_residual;
        all_passed &= gates_passed;
        let report = BranchReport {
            branch: label,
            n: args.n,
            a: args.a,
            b: args.b,
            m: args.m,
            p: args.p,
            nodes: args.nodes,
            xi: base.xi,
            k: base.k_grad,
            regime: roots.regime,
            actions,
            scale_consistency: sp.scale_consistency(),
            root_residual,
            round_trip_pohozaev_residual: rt.pohozaev_residual,
            round_trip_pde_residual: rt.pde_residual,
            gates_passed,
        };
        write_artifact(
            &args.out_dir.join(format!("kirchhoff_{label}.json")),
            &to_json(&enveloped(numerics.echo(), &report)),
        )?;
        solutions.push(report);
    }
    let run = KirchhoffRun {
        scaling,
        solutions,
        gates_passed: all_passed,
    };
    print!("{}", to_json(&enveloped(numerics.echo(), &run)));
    Ok(if all_passed { 0 } else { 5 })
}

#[derive(Serialize)]
struct ThresholdReport {
    #[serde(rename = "N")]
    n: u32,
    m: f64,
    p: f64,
    b: f64,
    xi: f64,
    #[serde(rename = "K")]
    k: f64,
    verdict: &'static str,
    #[serde(rename = "bK", skip_serializing_if = "Option::is_none")]
    bk: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exists: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_star: Option<f64>,
}

pub fn threshold(numerics: &NumericOpts, args: &ThresholdArgs) -> CmdResult {
    let model = NonlinearityModel::new(args.m, args.p);
    // Borrow the coefficient validation; a = 1 is a stand-in.
    KirchhoffProblem::new(1.0, args.b)
        .validated()
        .map_err(CliError::Core)?;
    let base = shoot_state(&model, args.n, 0, &numerics.shoot_config()).map_err(CliError::Core)?;
    let k = base.k_grad;
    let mut report = ThresholdReport {
        n: args.n,
        m: args.m,
        p: args.p,
        b: args.b,
        xi: base.xi,
        k,
        verdict: "",
        bk: None,
        exists: None,
        a_max: None,
        t_star: None,
    };
    match args.n {
        3 => report.verdict = "EXISTS_FOR_ALL_COEFFICIENTS",
        4 => {
            let bk = args.b * k;
            report.verdict = "EXISTS_IFF_BK_BELOW_ONE";
            report.bk = Some(bk);
            report.exists = Some(bk < 1.0);
        }
        _ => {
            let th = threshold_a_max(args.n, args.b, k).map_err(CliError::Core)?;
            report.verdict = "THRESHOLD_IN_A";
            report.a_max = Some(th.a_max);
            report.t_star = Some(th.t_star);
        }
    }
    print!("{}", to_json(&enveloped(numerics.echo(), report)));
    Ok(0)
}

fn range_grid(lo: f64, hi: f64, steps: usize, scale: RangeScale) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| {
            let s = i as f64 / (steps - 1) as f64;
            match scale {
                RangeScale::Linear => lo + (hi - lo) * s,
                RangeScale::Log => (lo.ln() + (hi.ln() - lo.ln()) * s).exp(),
            }
        })
        .collect()
}

fn validate_range(label: &str, lo: f64, hi: f64, steps: usize) -> Result<(), CliError> {
    if steps < 1 {
        return Err(Error::Hypothesis(format!("{label} range needs steps >= 1")).into());
    }
    if !(lo > 0.0 && hi > 0.0 && lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Hypothesis(format!(
            "{label} range must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
        ))
        .into());
    }
    Ok(())
}

struct SweepRow {
    regime: String,
    t1: Option<f64>,
    t2: Option<f64>,
    a_max: Option<f64>,
    action: Option<f64>,
    pohozaev_res: Option<f64>,
    pde_res: Option<f64>,
}

const EMPTY_ROW: SweepRow = SweepRow {
    regime: String::new(),
    t1: None,
    t2: None,
    a_max: None,
    action: None,
    pohozaev_res: None,
    pde_res: None,
};

fn sweep_row(
    n: u32,
    base: &RadialProfile,
    a: f64,
    b: f64,
    level: SweepLevel,
) -> Result<SweepRow, Error> {
    let problem = KirchhoffProblem::new(a, b);
    let roots = solve_scaling(n, &problem, base.k_grad)?;
    let mut row = SweepRow {
        regime: roots.regime.to_string(),
        t1: roots.roots.first().copied(),
        t2: roots.roots.get(1).copied(),
        a_max: roots.a_max,
        ..EMPTY_ROW
    };
    if level != SweepLevel::None {
        // Verification columns describe the first (lower) branch.
        if let Some(t) = row.t1 {
            let sp = build_kirchhoff_solution(base, &problem, t)?;
            row.action = Some(action_from_scaling(n, &problem, base.k_grad, t).i_func);
            row.pohozaev_res = Some(kirchhoff_pohozaev_residual(&sp));
            if level == SweepLevel::Full {
                row.pde_res = Some(pde_residual(&sp)?);
            }
        }
    }
    Ok(row)
}

fn cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct SweepSummary {
    rows: usize,
    failed_rows: usize,
    out: String,
}

pub fn sweep(numerics: &NumericOpts, args: &SweepArgs) -> CmdResult {
    validate_range("a", args.a_lo, args.a_hi, args.a_steps)?;
    validate_range("b", args.b_lo, args.b_hi, args.b_steps)?;
    let model = NonlinearityModel::new(args.m, args.p);
    // One profile seeds every row; only (a, b) vary.
    let base = shoot_state(&model, args.n, 0, &numerics.shoot_config()).map_err(CliError::Core)?;
    let a_grid = range_grid(args.a_lo, args.a_hi, args.a_steps, args.a_scale);
    let b_grid = range_grid(args.b_lo, args.b_hi, args.b_steps, args.b_scale);
    let points: Vec<(f64, f64)> = a_grid
        .iter()
        .flat_map(|&a| b_grid.iter().map(move |&b| (a, b)))
        .collect();

    let eval = |&(a, b): &(f64, f64)| -> String {
        let row = match sweep_row(args.n, &base, a, b, args.level) {
            Ok(row) => row,
            Err(_) => SweepRow {
                regime: "ERROR".into(),
                ..EMPTY_ROW
            },
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            args.n,
            a,
            b,
            base.k_grad,
            row.regime,
            cell(row.t1),
            cell(row.t2),
            cell(row.a_max),
            cell(row.action),
            cell(row.pohozaev_res),
            cell(row.pde_res),
        )
    };
    // Rows are evaluated concurrently but collected in grid order, so
    // the artifact does not depend on scheduling.
    let rows: Vec<String> = if numerics.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(numerics.jobs)
            .build()
            .expect("worker pool")
            .install(|| points.par_iter().map(eval).collect())
    } else {
        points.par_iter().map(eval).collect()
    };

    let mut csv = String::from("N,a,b,K,regime,t1,t2,a_max,I,pohozaev_res,pde_res\n");
    for row in &rows {
        csv.push_str(row);
        csv.push('\n');
    }
    write_artifact(&args.out, &csv)?;
    let failed_rows = rows.iter().filter(|row| row.contains(",ERROR,")).count();
    let summary = SweepSummary {
        rows: rows.len(),
        failed_rows,
        out: args.out.display().to_string(),
    };
    print!("{}", to_json(&enveloped(numerics.echo(), summary)));
    Ok(if !rows.is_empty() && failed_rows == rows.len() {
        2
    } else {
        0
    })
}

struct Battery {
    failures: usize,
}

impl Battery {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        if pass {
            println!("PASS {name}");
        } else {
            self.failures += 1;
            println!("FAIL {name}: {detail}");
        }
    }
}

/// Built-in gate battery: frozen reference values, worked closed-form
/// cases, and one full pipeline per representative dimension.
pub fn verify(numerics: &NumericOpts) -> CmdResult {
    let cfg = numerics.shoot_config();
    let gates = VerifyTolerances::default();
    let mut battery = Battery { failures: 0 };

    // Reference profile (m=1, p=3, N=3).
    let model = NonlinearityModel::new(1.0, 3.0);
    let base = shoot_state(&model, 3, 0, &cfg).map_err(CliError::Core)?;
    let xi_ref = 4.337387680157;
    battery.check(
        "ground_state_reference",
        ((base.xi - xi_ref) / xi_ref).abs() < 1e-6
            && base.pohozaev_residual() < gates.pohozaev_scalar,
        format!(
            "xi {} vs {xi_ref}, pohozaev {:.3e}",
            base.xi,
            base.pohozaev_residual()
        ),
    );

    let again = shoot_state(&model, 3, 0, &cfg).map_err(CliError::Core)?;
    battery.check(
        "shooting_determinism",
        again.xi.to_bits() == base.xi.to_bits() && again.k_grad.to_bits() == base.k_grad.to_bits(),
        format!(
            "xi {} vs {}, K {} vs {}",
            again.xi, base.xi, again.k_grad, base.k_grad
        ),
    );

    // Worked closed-form action at N = 3, a = b = K = 1: t is the
    // positive root of t^2 + t = 1.
    let unit = KirchhoffProblem::new(1.0, 1.0);
    let t_unit = (5f64.sqrt() - 1.0) / 2.0;
    let closed = action_from_scaling(3, &unit, 1.0, t_unit);
    let i_ref = 0.7575141619791229;
    battery.check(
        "worked_action_value",
        (closed.i_func - i_ref).abs() < 1e-6
            && ((closed.i_func - closed.i_reduced) / closed.i_func).abs()
                < gates.action_closed_forms,
        format!("I {} vs {i_ref}", closed.i_func),
    );

    // N = 4 closed form against direct evaluation.
    let mut n4_ok = true;
    let mut n4_detail = String::new();
    for &(a, bk) in &[(1.0, 0.5), (2.0, 0.03), (0.3, 0.97)] {
        let roots = solve_scaling(4, &KirchhoffProblem::new(a, bk), 1.0).map_err(CliError::Core)?;
        let expect = ((1.0 - bk) / a).sqrt();
        let got = roots.roots[0];
        if ((got - expect) / expect).abs() > 1e-14 {
            n4_ok = false;
            n4_detail = format!("a={a} bK={bk}: {got} vs {expect}");
        }
    }
    battery.check("n4_closed_form", n4_ok, n4_detail);

    // Worked thresholds: a_max(5,1,2) = 1/27 and a_max(6,1,1) = 1/4,
    // with the double root sitting at t_star.
    let th5 = threshold_a_max(5, 1.0, 2.0).map_err(CliError::Core)?;
    let th6 = threshold_a_max(6, 1.0, 1.0).map_err(CliError::Core)?;
    let at_th =
        solve_scaling(5, &KirchhoffProblem::new(th5.a_max, 1.0), 2.0).map_err(CliError::Core)?;
    battery.check(
        "worked_thresholds",
        (th5.a_max - 1.0 / 27.0).abs() < 1e-12 / 27.0
            && (th6.a_max - 0.25).abs() < 1e-12
            && at_th.regime == Regime::DoubleRoot
            && ((at_th.roots[0] - th5.t_star) / th5.t_star).abs() < 1e-9,
        format!(
            "a_max(5,1,2)={}, a_max(6,1,1)={}, regime {:?}",
            th5.a_max, th6.a_max, at_th.regime
        ),
    );

    // Full pipeline at N = 3, a = b = 1 on the reference profile.
    battery_pipeline(&mut battery, "pipeline_n3", 3, &base, &unit, &gates)?;

    // Both branches just below the N = 5 threshold.
    let model5 = NonlinearityModel::new(1.0, 2.0);
    let base5 = shoot_state(&model5, 5, 0, &cfg).map_err(CliError::Core)?;
    let a_max = threshold_a_max(5, 1.0, base5.k_grad)
        .map_err(CliError::Core)?
        .a_max;
    let below = KirchhoffProblem::new(0.9 * a_max, 1.0);
    let roots5 = solve_scaling(5, &below, base5.k_grad).map_err(CliError::Core)?;
    battery.check(
        "n5_two_branches",
        roots5.regime == Regime::TwoRoots && roots5.roots.len() == 2,
        format!("regime {:?}", roots5.regime),
    );
    battery_pipeline(&mut battery, "pipeline_n5", 5, &base5, &below, &gates)?;

    println!("verify: {} gates failed", battery.failures);
    Ok(if battery.failures == 0 { 0 } else { 5 })
}

fn battery_pipeline(
    battery: &mut Battery,
    name: &str,
    n: u32,
    base: &RadialProfile,
    problem: &KirchhoffProblem,
    gates: &VerifyTolerances,
) -> Result<(), CliError> {
    let roots = solve_scaling(n, problem, base.k_grad).map_err(CliError::Core)?;
    for &t in &roots.roots {
        let sp = build_kirchhoff_solution(base, problem, t).map_err(CliError::Core)?;
        let actions = action_report(&sp).map_err(CliError::Core)?;
        let rt = round_trip_scalar(&sp).map_err(CliError::Core)?;
        let root_res = scaling_residual(n, problem.a, problem.b, base.k_grad, t).abs();
        let def_vs_closed = ((actions.i_definition - actions.i_func) / actions.i_func).abs();
        let closed_forms = ((actions.i_func - actions.i_reduced) / actions.i_func).abs();
        let pass = actions.pohozaev_residual < gates.pohozaev_kirchhoff
            && actions.pde_residual < gates.pde_residual
            && def_vs_closed < gates.action_def_vs_closed
            && closed_forms < gates.action_closed_forms
            && sp.scale_consistency() < gates.scaling_identity
            && root_res < gates.root_residual
            && rt.pohozaev_residual < gates.pde_residual
            && rt.pde_residual < gates.pde_residual;
        battery.check(
            &format!("{name}_t_{t:.6e}"),
            pass,
            format!(
                "poho {:.3e}, pde {:.3e}, def-vs-closed {:.3e}, closed {:.3e}, root {:.3e}",
                actions.pohozaev_residual,
                actions.pde_residual,
                def_vs_closed,
                closed_forms,
                root_res
            ),
        );
    }
    Ok(())
}
