//! Command-line front end for the Kirchhoff scaling-construction
//! pipeline: profile shooting, solution building, existence thresholds,
//! coefficient sweeps, and a verification battery.
//!
//! Exit codes are contract: 0 success, 2 numerical failure (shooting,
//! bracketing, integration), 3 hypothesis rejection (invalid model or
//! coefficients), 4 nonexistence (the scaling equation has no root),
//! 5 verification-gate failure. Configuration precedence is flags over
//! KIRCHHOFF_* environment variables over built-in defaults, and the
//! effective configuration is echoed into every JSON report.

mod commands;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kirchhoff_core::{EffectiveConfig, Error, ShootConfig};

#[derive(Parser)]
#[command(
    name = "solve",
    version,
    about = "Constructs and verifies solutions of -(a + b |grad u|^2_2) Delta u = g(u) by scaling radial profiles of -Delta v = g(v)"
)]
struct Cli {
    #[command(flatten)]
    numerics: NumericOpts,
    #[command(subcommand)]
    command: Command,
}

/// Numeric knobs shared by every subcommand. Defaults mirror
/// ShootConfig::default so a bare invocation and the library agree.
#[derive(Args, Clone)]
struct NumericOpts {
    /// Relative tolerance of the adaptive profile integrator.
    #[arg(
        long,
        global = true,
        env = "KIRCHHOFF_ODE_RTOL",
        default_value_t = 1e-12
    )]
    ode_rtol: f64,
    /// Relative width at which the shooting bisection stops.
    #[arg(
        long,
        global = true,
        env = "KIRCHHOFF_SHOOT_TOL",
        default_value_t = 1e-15
    )]
    shoot_tol: f64,
    /// Points in the published profile grid.
    #[arg(
        long,
        global = true,
        env = "KIRCHHOFF_GRID_POINTS",
        default_value_t = 4096
    )]
    grid_points: usize,
    /// Integration range in units of the linear decay length 1/sqrt(m).
    #[arg(
        long,
        global = true,
        env = "KIRCHHOFF_R_MAX_FACTOR",
        default_value_t = 50.0
    )]
    r_max_factor: f64,
    /// Far-field cut: the profile is truncated where the phase-plane
    /// distance falls to this fraction of v(0).
    #[arg(
        long,
        global = true,
        env = "KIRCHHOFF_DECAY_REL",
        default_value_t = 1e-6
    )]
    decay_rel: f64,
    /// Seed for randomized checks.
    #[arg(long, global = true, env = "KIRCHHOFF_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads for sweeps (0 picks the rayon default).
    #[arg(long, global = true, env = "KIRCHHOFF_JOBS", default_value_t = 0)]
    jobs: usize,
}

impl NumericOpts {
    fn shoot_config(&self) -> ShootConfig {
        ShootConfig {
            ode_rtol: self.ode_rtol,
            shoot_tol_rel: self.shoot_tol,
            grid_points: self.grid_points,
            r_max_factor: self.r_max_factor,
            decay_rel: self.decay_rel,
            ..ShootConfig::default()
        }
    }

    fn echo(&self) -> EffectiveConfig {
        EffectiveConfig {
            seed: self.seed,
            jobs: self.jobs,
            ode_rtol: self.ode_rtol,
            shoot_tol_rel: self.shoot_tol,
            grid_points: self.grid_points,
            r_max_factor: self.r_max_factor,
            decay_rel: self.decay_rel,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Shoot a radial profile of the scalar-field equation -Delta v = g(v).
    GroundState(GroundStateArgs),
    /// Build Kirchhoff solutions u = v(t x) and verify every residual gate.
    Kirchhoff(KirchhoffArgs),
    /// Report the existence structure of the scaling equation for given b.
    Threshold(ThresholdArgs),
    /// Tabulate regimes, roots, and residuals over an (a, b) grid.
    Sweep(SweepArgs),
    /// Run the built-in verification battery.
    Verify,
}

#[derive(Args)]
struct GroundStateArgs {
    /// Space dimension (N >= 3).
    #[arg(long = "N")]
    n: u32,
    /// Linear decay coefficient in g(s) = -m s + |s|^{p-1} s.
    #[arg(long)]
    m: f64,
    /// Power of the superlinear term.
    #[arg(long)]
    p: f64,
    /// Sign changes of the requested profile (0 for the ground state).
    #[arg(long, default_value_t = 0)]
    nodes: usize,
    /// Override --shoot-tol for this run.
    #[arg(long)]
    tol: Option<f64>,
    /// Directory receiving ground_state.csv and ground_state.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Branch {
    /// The smaller scaling root t1.
    Lower,
    /// The larger scaling root t2.
    Upper,
    /// Every root the regime provides.
    All,
}

#[derive(Args)]
struct KirchhoffArgs {
    /// Space dimension (N >= 3).
    #[arg(long = "N")]
    n: u32,
    /// Linear decay coefficient in g(s) = -m s + |s|^{p-1} s.
    #[arg(long)]
    m: f64,
    /// Power of the superlinear term.
    #[arg(long)]
    p: f64,
    /// Constant part of the diffusion coefficient.
    #[arg(long)]
    a: f64,
    /// Gradient-energy weight of the diffusion coefficient.
    #[arg(long)]
    b: f64,
    /// Sign changes of the seeding profile.
    #[arg(long, default_value_t = 0)]
    nodes: usize,
    /// Which scaling branch to build when N >= 5 yields two roots.
    #[arg(long, value_enum, default_value_t = Branch::All)]
    branch: Branch,
    /// Directory receiving kirchhoff_{unique|lower|upper}.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Space dimension (N >= 3).
    #[arg(long = "N")]
    n: u32,
    /// Linear decay coefficient in g(s) = -m s + |s|^{p-1} s.
    #[arg(long)]
    m: f64,
    /// Power of the superlinear term.
    #[arg(long)]
    p: f64,
    /// Gradient-energy weight of the diffusion coefficient.
    #[arg(long)]
    b: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RangeScale {
    /// Equal spacing between the endpoints.
    Linear,
    /// Equal ratios between the endpoints (requires a positive lower end).
    Log,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SweepLevel {
    /// Regimes and roots only.
    None,
    /// Plus actions and the Kirchhoff Pohozaev residual.
    Pohozaev,
    /// Plus the finite-difference PDE residual.
    Full,
}

#[derive(Args)]
struct SweepArgs {
    /// Space dimension (N >= 3).
    #[arg(long = "N")]
    n: u32,
    /// Linear decay coefficient in g(s) = -m s + |s|^{p-1} s.
    #[arg(long)]
    m: f64,
    /// Power of the superlinear term.
    #[arg(long)]
    p: f64,
    /// Lower end of the a range.
    #[arg(long)]
    a_lo: f64,
    /// Upper end of the a range.
    #[arg(long)]
    a_hi: f64,
    /// Samples along a (>= 1).
    #[arg(long, default_value_t = 10)]
    a_steps: usize,
    /// Spacing of the a samples.
    #[arg(long, value_enum, default_value_t = RangeScale::Linear)]
    a_scale: RangeScale,
    /// Lower end of the b range.
    #[arg(long)]
    b_lo: f64,
    /// Upper end of the b range.
    #[arg(long)]
    b_hi: f64,
    /// Samples along b (>= 1).
    #[arg(long, default_value_t = 10)]
    b_steps: usize,
    /// Spacing of the b samples.
    #[arg(long, value_enum, default_value_t = RangeScale::Linear)]
    b_scale: RangeScale,
    /// How much verification to run per row.
    #[arg(long, value_enum, default_value_t = SweepLevel::Full)]
    level: SweepLevel,
    /// Output CSV path.
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
}

/// Anything a command can fail with: a library error (mapped onto the
/// exit-code contract) or an artifact I/O error (exit 1).
enum CliError {
    Core(Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(err) => err.fmt(f),
            CliError::Io(err) => write!(f, "artifact I/O failed: {err}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Core(err)
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}

fn exit_code(err: &CliError) -> i32 {
    match err {
        CliError::Core(Error::Hypothesis(_)) => 3,
        CliError::Core(Error::NotARoot { .. }) | CliError::Core(Error::Grid { .. }) => 5,
        CliError::Core(_) => 2,
        CliError::Io(_) => 1,
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::GroundState(args) => commands::ground_state(&cli.numerics, args),
        Command::Kirchhoff(args) => commands::kirchhoff(&cli.numerics, args),
        Command::Threshold(args) => commands::threshold(&cli.numerics, args),
        Command::Sweep(args) => commands::sweep(&cli.numerics, args),
        Command::Verify => commands::verify(&cli.numerics),
    };
    let code = match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    };
    std::process::exit(code);
}
