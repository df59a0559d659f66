//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage and input errors, 2 for numerical
//! failures (instability, singular approximation, non-convergence).

use std::path::PathBuf;
use std::process::ExitCode;

use bico::io::{read_profile, write_fields, write_map, write_profile, ProfileMeta};
use bico::kinks::KinkThresholdConfig;
use bico::model::{make_grid, CouplingProfile, Parity, SystemParams};
use bico::solver::{solve_ground_state, SeedKind, SolverConfig};
use bico::sweep::{run_sweep, run_sweep_with_workers, SweepSpec};
use bico::uniform::{
    uniform_asymmetric, uniform_brute_force, uniform_ground_state, uniform_symmetric,
};
use bico::{count_kinks, tf_pair, Error};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "bico",
    version,
    about = "Ground states of linearly coupled two-component condensates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relax to the ground state and write the profile.
    #[command(allow_negative_numbers = true)]
    Solve(SolveArgs),
    /// Uniform states of the untrapped system as JSON.
    #[command(allow_negative_numbers = true)]
    Uniform(UniformArgs),
    /// Sample the small-coupling perturbative pair.
    #[command(allow_negative_numbers = true)]
    Tf(TfArgs),
    /// Count kinks in a profile file.
    Kinks(KinksArgs),
    /// Run a kink-count sweep described by a JSON spec.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    g: f64,
    /// Coupling amplitude.
    #[arg(long = "A")]
    amplitude: f64,
    /// Modulation wavenumber.
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value = "odd")]
    parity: Parity,
    /// Trap frequency.
    #[arg(long, default_value_t = bico::model::DEFAULT_OMEGA)]
    omega: f64,
    /// Total norm of both components.
    #[arg(long, default_value_t = bico::model::DEFAULT_TOTAL_NORM)]
    norm: f64,
    #[arg(long, default_value_t = 25.0)]
    xmax: f64,
    #[arg(long, default_value_t = 1024)]
    points: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1e-3)]
    dtau: f64,
    #[arg(long, default_value_t = 500.0)]
    tau_max: f64,
    #[arg(long, default_value = "tf")]
    seed_kind: SeedKind,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Profile CSV; the JSON sidecar is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct UniformArgs {
    /// Total density `phi1^2 + phi2^2`.
    #[arg(long)]
    density: f64,
    #[arg(long)]
    g: f64,
    #[arg(long = "A")]
    amplitude: f64,
    /// Also run the brute-force minimizer.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 1_000_000)]
    resolution: usize,
}

#[derive(Args)]
struct TfArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Chemical potential fed to the approximation.
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct KinksArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Threshold as a fraction of max |phi1|.
    #[arg(long, conflicts_with = "abs_threshold")]
    rel_threshold: Option<f64>,
    /// Fixed threshold amplitude.
    #[arg(long)]
    abs_threshold: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides the seed in the spec.
    #[arg(long)]
    rng_seed: Option<u64>,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite { .. }
            | Error::ZeroNorm
            | Error::SingularDenominator { .. }
            | Error::Unstable { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

impl ModelArgs {
    fn build(&self) -> Result<(SystemParams, CouplingProfile, bico::Grid1D), Error> {
        let params = SystemParams::new(self.g, self.omega, self.norm)?;
        let coupling = CouplingProfile::new(self.amplitude, self.alpha, self.parity)?;
        let grid = make_grid(self.xmax, self.points)?;
        Ok((params, coupling, grid))
    }
}

fn print_json(value: &impl serde::Serialize) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn solve(args: SolveArgs) -> CliResult {
    let (params, coupling, grid) = args.model.build()?;
    let config = SolverConfig {
        dtau: args.dtau,
        tau_max: args.tau_max,
        seed_kind: args.seed_kind,
        rng_seed: args.rng_seed,
        ..SolverConfig::default()
    };
    let result = solve_ground_state(&params, &coupling, &grid, &config)?;
    write_profile(&result, &params, &coupling, &config, &args.out)?;
    print_json(&json!({
        "converged": result.converged,
        "tau": result.tau,
        "energy": result.energy,
        "mu": result.mu,
        "residual": result.residual,
        "kinks": result.kinks,
        "amplitude_ratio": result.amplitude_ratio(),
    }))?;
    if !result.converged {
        return Err(Failure::Numerical(format!(
            "no convergence by tau = {} (residual {:.3e})",
            result.tau, result.residual
        )));
    }
    Ok(())
}

fn uniform(args: UniformArgs) -> CliResult {
    if !(args.density.is_finite() && args.density > 0.0) {
        return Err(Failure::Usage(format!(
            "density must be positive, got {}",
            args.density
        )));
    }
    let (n, g, a) = (args.density, args.g, args.amplitude);
    let asymmetric = match uniform_asymmetric(n, g, a) {
        Ok(state) => json!(state),
        Err(reason) => json!({ "absent": reason }),
    };
    let mut report = json!({
        "density": n,
        "g": g,
        "A": a,
        "ground_state": uniform_ground_state(n, g, a),
        "symmetric": uniform_symmetric(n, g, a),
        "asymmetric": asymmetric,
    });
    if args.oracle {
        report["oracle"] = json!(uniform_brute_force(n, g, a, args.resolution));
    }
    print_json(&report)
}

fn tf(args: TfArgs) -> CliResult {
    let (params, coupling, grid) = args.model.build()?;
    let approx = tf_pair(&params, &coupling, args.mu, &grid)?;
    let meta = ProfileMeta {
        source: "tf".into(),
        params,
        coupling,
        x_max: grid.x_max(),
        n_points: grid.n_points(),
        mu: args.mu,
        mu_eff: Some(approx.mu_eff),
        energy: None,
        solver: None,
        convergence: None,
        kinks: None,
    };
    write_fields(&approx.fields, &coupling, &meta, &args.out)?;
    print_json(&json!({
        "mu_eff": approx.mu_eff,
        "support_radius": approx.support_radius,
    }))
}

fn kinks(args: KinksArgs) -> CliResult {
    let data = read_profile(&args.input)?;
    let cfg = match (args.rel_threshold, args.abs_threshold) {
        (_, Some(value)) => KinkThresholdConfig::absolute(value),
        (Some(fraction), None) => {
            if !(fraction > 0.0 && fraction < 1.0) {
                return Err(Failure::Usage(format!(
                    "relative threshold must lie in (0, 1), got {fraction}"
                )));
            }
            KinkThresholdConfig::relative(fraction)
        }
        (None, None) => KinkThresholdConfig::default(),
    };
    let mut report = count_kinks(&data.fields, &cfg);
    if let Some(meta) = &data.meta {
        report = report.with_parity(&meta.coupling);
    }
    print_json(&report)
}

fn sweep(args: SweepArgs) -> CliResult {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.config.display())))?;
    let mut spec: SweepSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.rng_seed {
        spec.rng_seed = seed;
    }
    let table = match args.workers {
        Some(workers) => run_sweep_with_workers(&spec, workers)?,
        None => run_sweep(&spec)?,
    };
    write_map(&table, &args.out)?;
    let converged = table.rows.iter().filter(|r| r.converged).count();
    print_json(&json!({
        "points": table.rows.len(),
        "converged": converged,
        "parity_failures": table.metadata.parity_failures,
    }))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BICO_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Uniform(args) => uniform(args),
        Command::Tf(args) => tf(args),
        Command::Kinks(args) => kinks(args),
        Command::Sweep(args) => sweep(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
