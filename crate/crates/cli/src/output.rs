//! Trajectory and summary CSV files.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use sbgd_core::{AgentSnapshot, RunResult, TrajectoryRecord};

use crate::error::{CliError, Result};

/// 17 significant digits; parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(format!("creating {}", path.display()), e))
}

pub fn trajectory_header(dim: usize) -> Vec<String> {
    let mut h: Vec<String> = ["iteration", "agent_id", "active", "mass", "f_value"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend((0..dim).map(|k| format!("x_{k}")));
    h.push("is_minimizer".into());
    h.push("is_heaviest".into());
    h
}

/// Header plus one row per (iteration, agent), inactive agents included.
pub fn write_trajectory<W: Write>(result: &RunResult, out: W) -> Result<()> {
    let dim = result.solution.len();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trajectory_header(dim))?;
    let mut row = Vec::with_capacity(dim + 7);
    for rec in &result.trajectory {
        for a in &rec.agents {
            row.clear();
            row.push(rec.iteration.to_string());
            row.push(a.agent_id.to_string());
            row.push(flag(a.active).into());
            row.push(fmt_f64(a.mass));
            row.push(fmt_f64(a.f_value));
            row.extend(a.position.iter().map(|&x| fmt_f64(x)));
            row.push(flag(a.agent_id == rec.minimizer_index).into());
            row.push(flag(a.agent_id == rec.heaviest_index).into());
            w.write_record(&row)?;
        }
    }
    w.flush()
        .map_err(|e| CliError::io("writing trajectory", e))?;
    Ok(())
}

pub fn emit_trajectory_csv(result: &RunResult, path: &Path) -> Result<()> {
    write_trajectory(result, create(path)?)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::Csv(format!("row {line}, column {i}: bad value")))
}

/// Inverse of [`write_trajectory`].
pub fn read_trajectory<R: Read>(input: R) -> Result<Vec<TrajectoryRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let ncols = r.headers()?.len();
    if ncols < 8 {
        return Err(CliError::Csv(format!(
            "expected at least 8 columns, got {ncols}"
        )));
    }
    let dim = ncols - 7;
    let mut out: Vec<TrajectoryRecord> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let iteration: usize = field(&rec, 0, line)?;
        let agent_id: usize = field(&rec, 1, line)?;
        let active: u8 = field(&rec, 2, line)?;
        let snap = AgentSnapshot {
            agent_id,
            active: active == 1,
            mass: field(&rec, 3, line)?,
            f_value: field(&rec, 4, line)?,
            position: (0..dim)
                .map(|k| field(&rec, 5 + k, line))
                .collect::<Result<_>>()?,
        };
        let is_min: u8 = field(&rec, 5 + dim, line)?;
        let is_heavy: u8 = field(&rec, 6 + dim, line)?;
        if out.last().map_or(true, |t| t.iteration != iteration) {
            out.push(TrajectoryRecord {
                iteration,
                agents: Vec::new(),
                minimizer_index: usize::MAX,
                heaviest_index: usize::MAX,
                f_min: f64::INFINITY,
                f_max: f64::NEG_INFINITY,
            });
        }
        let t = out.last_mut().expect("pushed above");
        if is_min == 1 {
            t.minimizer_index = agent_id;
            t.f_min = snap.f_value;
        }
        if is_heavy == 1 {
            t.heaviest_index = agent_id;
        }
        if snap.active {
            t.f_max = t.f_max.max(snap.f_value);
        }
        t.agents.push(snap);
    }
    Ok(out)
}

pub fn summary_header(dim: usize) -> Vec<String> {
    let mut h = vec![
        "seed".to_string(),
        "termination".into(),
        "iterations_used".into(),
    ];
    h.extend((0..dim).map(|k| format!("x_{k}")));
    h.push("f_solution".into());
    h.push("deviation_from_oracle".into());
    h
}

/// One line per replicate. `deviations[i]` belongs to `results[i]`.
pub fn write_summary(results: &[RunResult], deviations: &[f64], path: &Path) -> Result<()> {
    let dim = results.first().map_or(0, |r| r.solution.len());
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(summary_header(dim))?;
    for (r, &dev) in results.iter().zip(deviations) {
        let mut row = vec![
            r.seed.to_string(),
            r.termination.to_string(),
            r.iterations_used.to_string(),
        ];
        row.extend(r.solution.iter().map(|&x| fmt_f64(x)));
        row.push(fmt_f64(r.f_solution));
        row.push(fmt_f64(dev));
        w.write_record(&row)?;
    }
    w.flush()
        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    Ok(())
}
