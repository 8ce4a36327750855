mod commands;
mod config;
mod output;

use alpha_exec::Error;
use clap::{Args, Parser, Subcommand};
use commands::{CommandOutput, Format};
use config::Config;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "alpha-exec",
    version,
    about = "Optimal execution with alpha signals, costs and impact"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the daily and intraday strategies on common paths.
    Simulate(RunArgs),
    /// Tabulate no-trade and limit-order boundaries over time and signal.
    Boundaries(RunArgs),
    /// Evaluate the closed-form residual checks against their tolerances.
    ExactCheck(RunArgs),
    /// Compare closed forms with the discrete and grid oracles.
    OracleCompare(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; omitted sections take their default values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the simulation and sampling seeds.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            kind: "invalid_input",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence(_) | Error::QuadratureFailure { .. } => Self {
                code: 1,
                kind: "numerical_failure",
                message: e.to_string(),
            },
            _ => Self::invalid(e.to_string()),
        }
    }
}

fn load(args: &RunArgs) -> Result<Config, Failure> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::invalid(format!("{}: {e}", p.display())))?;
            Config::from_json(&text).map_err(|e| Failure::invalid(format!("{}: {e}", p.display())))?
        }
        None => Config::default(),
    };
    if let Some(s) = args.seed {
        cfg.simulate.seed = s;
        cfg.exact_check.gain_pde.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

type Handler = fn(&Config, Format) -> alpha_exec::Result<CommandOutput>;

fn run(cli: Cli) -> Result<bool, Failure> {
    let (args, f): (&RunArgs, Handler) = match &cli.command {
        Command::Simulate(a) => (a, commands::simulate),
        Command::Boundaries(a) => (a, commands::boundaries),
        Command::ExactCheck(a) => (a, commands::exact_check),
        Command::OracleCompare(a) => (a, commands::oracle_compare),
    };
    let cfg = load(args)?;
    let res = f(&cfg, args.format)?;
    res.outputs
        .write_to(&args.out)
        .map_err(|e| Failure::invalid(format!("{}: {e}", args.out.display())))?;
    for name in res.outputs.names() {
        println!("{}", args.out.join(name).display());
    }
    Ok(res.within_tolerance)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": "tolerance_breach", "message": "see report"})
            );
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("{}", serde_json::json!({"error": f.kind, "message": f.message}));
            ExitCode::from(f.code)
        }
    }
}
