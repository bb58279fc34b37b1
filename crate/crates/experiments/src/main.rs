use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rsw_experiments::{cmd_decay, cmd_lifespan, cmd_scatter, cmd_simulate, load_config, ExperimentError, RunOptions};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "rswlab", version, about = "Rotating shallow water experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate and record per-checkpoint diagnostics.
    Simulate(Common),
    /// Fit the sup-norm decay exponent of zero-relative-vorticity data.
    Decay(Common),
    /// Sweep the relative-vorticity size and measure lifespans.
    Lifespan(Common),
    /// Compare with the free Klein-Gordon flow matched at a finite time.
    Scatter(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment description.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Initial-data seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long)]
    workers: Option<usize>,
    /// Drop the quadratic terms from the dynamics.
    #[arg(long)]
    linear_only: bool,
}

fn print<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string(v).expect("summary serializes"));
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    let (Command::Simulate(c) | Command::Decay(c) | Command::Lifespan(c) | Command::Scatter(c)) = &cli.command;
    let mut cfg = load_config(&c.config)?;
    if let Some(out) = &c.out {
        cfg.output.directory = out.clone();
    }
    if let Some(seed) = c.seed {
        cfg.data.seed = seed;
    }
    if let Some(w) = c.workers {
        if w == 0 {
            return Err(ExperimentError::Config("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| ExperimentError::Config(format!("cannot start {w} workers: {e}")))?;
    }
    let opts = RunOptions {
        linear_only: c.linear_only,
    };
    match &cli.command {
        Command::Simulate(_) => print(&cmd_simulate(&cfg, opts)?),
        Command::Decay(_) => print(&cmd_decay(&cfg, opts)?),
        Command::Lifespan(_) => {
            let res = cmd_lifespan(&cfg, opts)?;
            for w in &res.warnings {
                eprintln!("warning: {w}");
            }
            print(&res);
        }
        Command::Scatter(_) => print(&cmd_scatter(&cfg, opts)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::from(2)
        }
    }
}
