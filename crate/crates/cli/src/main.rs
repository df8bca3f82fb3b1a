use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sbgd_cli::experiment::{default_oracle_resolution, ExperimentOutcome};
use sbgd_cli::output::fmt_f64;
use sbgd_cli::{run_experiment, run_sweep, CliError, ExperimentConfig, Result};
use sbgd_core::objective::objective_by_name;
use sbgd_core::{grid_oracle, Variant};

#[derive(Parser)]
#[command(
    name = "sbgd",
    version,
    about = "Swarm-based gradient descent experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded replicates of the configured variant.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Base seed; replicate k uses seed + k.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the configured (p, q, J) sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Grid-search the global minimum of a 1-D or 2-D objective.
    Oracle {
        #[arg(long)]
        objective: String,
        #[arg(long)]
        resolution: Option<f64>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Like `run`, with the communication-free baseline.
    Baseline {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::from_path(path)?;
    if let Some(s) = seed {
        config.params.seed = s;
    }
    if let Some(o) = out {
        config.output_dir = o;
    }
    Ok(config)
}

/// Console summary; a closed stdout is not an error.
fn report(outcome: &ExperimentOutcome) {
    let mut out = std::io::stdout().lock();
    for (r, dev) in outcome.results.iter().zip(&outcome.deviations) {
        let x: Vec<String> = r.solution.iter().map(|v| format!("{v:.10e}")).collect();
        let line = writeln!(
            out,
            "seed {:>4}  {:<14} iterations {:>5}  x = [{}]  F = {:.10e}  deviation = {:.3e}",
            r.seed,
            r.termination,
            r.iterations_used,
            x.join(", "),
            r.f_solution,
            dev
        );
        if line.is_err() {
            return;
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let config = load(&config, seed, out)?;
            report(&run_experiment(&config)?);
        }
        Command::Baseline { config, seed, out } => {
            let mut config = load(&config, seed, out)?;
            config.params.variant = Variant::Baseline;
            report(&run_experiment(&config)?);
        }
        Command::Sweep { config } => {
            let config = ExperimentConfig::from_path(&config)?;
            let report = run_sweep(&config)?;
            if let Some(o) = &report.oracle {
                println!("oracle argmin {:?}  F* = {}", o.argmin, fmt_f64(o.f_min));
            }
            println!(
                "{:>6} {:>5} {:>5} {:>14} {:>14} {:>10} {:>8}",
                "J", "p", "q", "mean_dev", "min_dev", "iters", "success"
            );
            for r in &report.rows {
                println!(
                    "{:>6} {:>5} {:>5} {:>14.3e} {:>14.3e} {:>10.2} {:>8.2}",
                    r.agents,
                    r.p,
                    r.q,
                    r.mean_deviation,
                    r.min_deviation,
                    r.iterations_mean,
                    r.success_rate
                );
            }
        }
        Command::Oracle {
            objective,
            resolution,
            dim,
        } => {
            let f = objective_by_name(&objective, dim)
                .map_err(|e| CliError::config("objective", e.to_string()))?;
            let o = grid_oracle(
                &f,
                resolution.unwrap_or_else(|| default_oracle_resolution(f.dim())),
            )?;
            let x: Vec<String> = o.argmin.iter().map(|&v| fmt_f64(v)).collect();
            println!("argmin {}", x.join(" "));
            println!("f_min {}", fmt_f64(o.f_min));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
