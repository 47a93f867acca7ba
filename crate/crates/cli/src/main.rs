use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use disc_lqg::{run_files, Mode, SimOverrides};

/// Optimal controller and observer gains for discounted-cost LQG problems.
#[derive(Debug, Parser)]
#[command(name = "disc-lqg", version)]
struct Cli {
    #[arg(value_enum)]
    mode: Mode,
    /// Problem file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Report file (JSON), written on failure too.
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Simulation step.
    #[arg(long)]
    dt: Option<f64>,
    /// Simulation horizon.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    trajectories: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let overrides = SimOverrides {
        seed: cli.seed,
        dt: cli.dt,
        horizon: cli.horizon,
        trajectories: cli.trajectories,
    };
    let outcome = run_files(cli.mode, &cli.input, &cli.output, overrides)
        .with_context(|| format!("writing report to {}", cli.output.display()))?;
    if let Some(err) = &outcome.report.error {
        eprintln!("error: {}", err.message);
    }
    Ok(u8::try_from(outcome.exit_code)?)
}
