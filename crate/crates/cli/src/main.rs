#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Failure, Run};
use config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "charshock", version, about = "Characteristics, shocks and shift sensitivities for controlled balance laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the solution: shocks, events, singular points and profiles.
    Simulate(Common),
    /// Blow-up time T(y) of every characteristic and the shock seeds.
    BlowupMap(Common),
    /// Scan for points where θ, θ_y and θ_yy vanish together.
    GenericityScan(Common),
    /// Shock shifts and the first variation of the cost along a direction.
    Sensitivity(Common),
    /// Projected-gradient descent on the control; the terminal-merge
    /// experiment for the prop11 preset.
    Optimize(Common),
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// JSON run config, or the manifest of an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// burgers-sine, constant-data or prop11.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    /// Number of fan characteristics.
    #[arg(long)]
    ygrid: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    intervals: Option<usize>,
    /// Run the acceptance checks of the preset; exit 4 if one fails.
    #[arg(long)]
    check: bool,
}

fn resolve(c: &Common) -> anyhow::Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(path) => config::load(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        preset: c.preset.clone(),
        out: c.out.clone(),
        dt: c.dt,
        ygrid: c.ygrid,
        horizon: c.horizon,
        delta: c.delta,
        intervals: c.intervals,
    });
    if c.config.is_none() && cfg.problem.preset.is_none() {
        anyhow::bail!("either --config or --preset is required");
    }
    if let Some(dt) = cfg.dt {
        if !(dt > 0.0) {
            anyhow::bail!("dt: must be positive, got {dt}");
        }
    }
    Ok(cfg)
}

fn execute(name: &'static str, c: &Common, body: fn(&mut Run<'_>) -> commands::Outcome) -> Result<(), Failure> {
    let cfg = resolve(c).map_err(Failure::Config)?;
    let mut run = Run::new(name, &cfg)?;
    body(&mut run)?;
    run.finish(c.check)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(c) => execute("simulate", c, commands::simulate),
        Command::BlowupMap(c) => execute("blowup-map", c, commands::blowup),
        Command::GenericityScan(c) => execute("genericity-scan", c, commands::genericity),
        Command::Sensitivity(c) => execute("sensitivity", c, commands::sensitivity),
        Command::Optimize(c) => execute("optimize", c, commands::optimize_cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("{e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Check(failed)) => {
            for f in failed {
                eprintln!("check failed: {f}");
            }
            ExitCode::from(4)
        }
    }
}
