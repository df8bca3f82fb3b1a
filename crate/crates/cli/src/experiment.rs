//! Seeded replicate runs and (p, q, J) sweeps.

use std::fs;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use sbgd_core::{grid_oracle, run, Objective, OracleResult, RunResult, SbgdParams};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::output::{emit_trajectory_csv, fmt_f64, write_summary};

/// A run counts as a success when its deviation is at most this.
pub const SUCCESS_DEVIATION: f64 = 1e-2;

/// Default oracle grid spacing for 1-D and 2-D objectives.
pub fn default_oracle_resolution(dim: usize) -> f64 {
    if dim == 1 {
        1e-4
    } else {
        1e-2
    }
}

/// Grid oracle for 1-D and 2-D objectives; `None` in higher dimension.
pub fn oracle_for(objective: &Objective, resolution: Option<f64>) -> Result<Option<OracleResult>> {
    if objective.dim() > 2 {
        return Ok(None);
    }
    let r = resolution.unwrap_or_else(|| default_oracle_resolution(objective.dim()));
    Ok(Some(grid_oracle(objective, r)?))
}

/// Euclidean distance to the oracle argmin, NaN without an oracle.
pub fn deviation(solution: &[f64], oracle: Option<&OracleResult>) -> f64 {
    match oracle {
        Some(o) => solution
            .iter()
            .zip(&o.argmin)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt(),
        None => f64::NAN,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    /// Replicate order: `results[k]` used seed `base + k`.
    pub results: Vec<RunResult>,
    pub deviations: Vec<f64>,
    pub oracle: Option<OracleResult>,
    pub files: Vec<PathBuf>,
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::config("out", format!("cannot create {}: {e}", dir.display())))
}

pub fn trajectory_file_name(seed: u64) -> String {
    format!("trajectory_seed{seed}.csv")
}

fn replicates(
    params: &SbgdParams,
    objective: &Objective,
    repeats: usize,
) -> Result<Vec<RunResult>> {
    (0..repeats)
        .map(|k| {
            let p = SbgdParams {
                seed: params.seed.wrapping_add(k as u64),
                ..params.clone()
            };
            Ok(run(&p, objective)?)
        })
        .collect()
}

/// Runs `repeats` seeded replicates and writes one trajectory CSV per run
/// plus `summary.csv` into the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let (objective, params) = config.resolve()?;
    let oracle = oracle_for(&objective, config.oracle_resolution)?;
    let results = replicates(&params, &objective, config.repeats)?;
    let deviations: Vec<f64> = results
        .iter()
        .map(|r| deviation(&r.solution, oracle.as_ref()))
        .collect();

    ensure_dir(&config.output_dir)?;
    let mut files = Vec::with_capacity(results.len() + 1);
    for r in &results {
        let path = config.output_dir.join(trajectory_file_name(r.seed));
        emit_trajectory_csv(r, &path)?;
        files.push(path);
    }
    let summary = config.output_dir.join("summary.csv");
    write_summary(&results, &deviations, &summary)?;
    files.push(summary);
    Ok(ExperimentOutcome {
        results,
        deviations,
        oracle,
        files,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub agents: usize,
    pub p: f64,
    pub q: f64,
    pub mean_deviation: f64,
    pub min_deviation: f64,
    pub iterations_mean: f64,
    /// Fraction of replicates with deviation at most [`SUCCESS_DEVIATION`].
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// Sorted by (q, J, p).
    pub rows: Vec<SweepRow>,
    pub oracle: Option<OracleResult>,
}

impl SweepReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path)
            .map_err(|e| CliError::io(format!("creating {}", path.display()), e))?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record([
            "J",
            "p",
            "q",
            "mean_deviation",
            "min_deviation",
            "iterations_mean",
            "success_rate",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.agents.to_string(),
                fmt_f64(r.p),
                fmt_f64(r.q),
                fmt_f64(r.mean_deviation),
                fmt_f64(r.min_deviation),
                fmt_f64(r.iterations_mean),
                fmt_f64(r.success_rate),
            ])?;
        }
        w.flush()
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
        Ok(())
    }
}

fn summarize(agents: usize, p: f64, q: f64, results: &[RunResult], deviations: &[f64]) -> SweepRow {
    let n = results.len() as f64;
    SweepRow {
        agents,
        p,
        q,
        mean_deviation: deviations.iter().sum::<f64>() / n,
        min_deviation: deviations.iter().copied().fold(f64::INFINITY, f64::min),
        iterations_mean: results
            .iter()
            .map(|r| r.iterations_used as f64)
            .sum::<f64>()
            / n,
        success_rate: deviations
            .iter()
            .filter(|&&d| d <= SUCCESS_DEVIATION)
            .count() as f64
            / n,
    }
}

/// Runs the Cartesian product of the sweep lists, `repeats` replicates per
/// cell, and writes `sweep.csv` plus one summary per cell.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    config.validate()?;
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("sweep", "no sweep lists given"))?;
    let (objective, base) = config.resolve()?;
    let oracle = oracle_for(&objective, config.oracle_resolution)?;

    let mut cells = Vec::new();
    for &q in &sweep.q {
        for &agents in &sweep.agents {
            for &p in &sweep.p {
                cells.push(SbgdParams {
                    agents,
                    p,
                    q,
                    ..base.clone()
                });
            }
        }
    }
    cells.sort_by(|a, b| {
        a.q.total_cmp(&b.q)
            .then(a.agents.cmp(&b.agents))
            .then(a.p.total_cmp(&b.p))
    });

    let outputs = run_cells(&cells, &objective, config.repeats)?;

    ensure_dir(&config.output_dir)?;
    let mut rows = Vec::with_capacity(cells.len());
    for (cell, results) in cells.iter().zip(&outputs) {
        let deviations: Vec<f64> = results
            .iter()
            .map(|r| deviation(&r.solution, oracle.as_ref()))
            .collect();
        let name = format!("summary_q{}_J{}_p{}.csv", cell.q, cell.agents, cell.p);
        write_summary(results, &deviations, &config.output_dir.join(name))?;
        rows.push(summarize(cell.agents, cell.p, cell.q, results, &deviations));
    }
    let report = SweepReport { rows, oracle };
    report.write_csv(&config.output_dir.join("sweep.csv"))?;
    Ok(report)
}

/// Cells run on a small thread pool; results come back in cell order.
fn run_cells(
    cells: &[SbgdParams],
    objective: &Objective,
    repeats: usize,
) -> Result<Vec<Vec<RunResult>>> {
    let workers = thread::available_parallelism()
        .map_or(1, NonZeroUsize::get)
        .min(cells.len())
        .max(1);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<Vec<RunResult>>>>> =
        Mutex::new((0..cells.len()).map(|_| None).collect());
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let out = replicates(&cells[i], objective, repeats);
                slots.lock().expect("worker panicked")[i] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|slot| slot.expect("every cell ran"))
        .collect()
}
