use crate::error::{Result, SbgdError};
use crate::objective::Objective;

const MAX_GRID_POINTS: f64 = 1e8;
const REFINE_TOL: f64 = 1e-10;
const REFINE_MAX_ROUNDS: usize = 100_000;

/// Ground-truth minimum from exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub argmin: Vec<f64>,
    pub f_min: f64,
    pub grid_resolution: f64,
}

/// Scans a regular grid over the objective's box (1-D or 2-D), then polishes
/// the best grid point with a shrinking compass search down to a step of 1e-10.
///
/// Ties on the grid resolve to the lexicographically smallest point.
pub fn grid_oracle(objective: &Objective, resolution: f64) -> Result<OracleResult> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(SbgdError::param(
            "resolution",
            format!("must be > 0, got {resolution}"),
        ));
    }
    let dim = objective.dim();
    if !(1..=2).contains(&dim) {
        return Err(SbgdError::param(
            "objective",
            format!("grid oracle supports d = 1 or 2, got {dim}"),
        ));
    }
    let domain = objective.domain();
    let axes: Vec<Vec<f64>> = domain
        .lower
        .iter()
        .zip(&domain.upper)
        .map(|(&lo, &hi)| axis(lo, hi, resolution))
        .collect::<Result<_>>()?;
    let total: f64 = axes.iter().map(|a| a.len() as f64).product();
    if total > MAX_GRID_POINTS {
        return Err(SbgdError::Resource(format!(
            "grid of {total:e} points exceeds limit of {MAX_GRID_POINTS:e}"
        )));
    }

    let mut best_x = vec![0.0; dim];
    let mut best_f = f64::INFINITY;
    let mut probe = vec![0.0; dim];
    let inner: &[f64] = if dim == 2 { &axes[1] } else { &[0.0] };
    for &x0 in &axes[0] {
        probe[0] = x0;
        for &x1 in inner {
            if dim == 2 {
                probe[1] = x1;
            }
            let f = objective.value(&probe);
            if f < best_f {
                best_f = f;
                best_x.copy_from_slice(&probe);
            }
        }
    }

    let (argmin, f_min) = refine(objective, best_x, best_f, resolution);
    Ok(OracleResult {
        argmin,
        f_min,
        grid_resolution: resolution,
    })
}

fn axis(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    let n = ((hi - lo) / step).floor();
    if n + 1.0 > MAX_GRID_POINTS {
        return Err(SbgdError::Resource(format!(
            "axis of {n:e} points exceeds limit"
        )));
    }
    let n = n as usize;
    let mut pts: Vec<f64> = (0..=n).map(|k| lo + k as f64 * step).collect();
    if pts.last().is_some_and(|&x| x < hi) {
        pts.push(hi);
    }
    Ok(pts)
}

fn refine(objective: &Objective, mut x: Vec<f64>, mut fx: f64, start: f64) -> (Vec<f64>, f64) {
    let domain = objective.domain();
    let dim = x.len();
    let offsets: Vec<Vec<f64>> = (0..3usize.pow(dim as u32))
        .map(|code| {
            (0..dim)
                .map(|k| ((code / 3usize.pow(k as u32)) % 3) as f64 - 1.0)
                .collect::<Vec<f64>>()
        })
        .filter(|o| o.iter().any(|v| *v != 0.0))
        .collect();

    let mut step = start;
    let mut candidate = vec![0.0; dim];
    for _ in 0..REFINE_MAX_ROUNDS {
        if step < REFINE_TOL {
            break;
        }
        let mut moved = false;
        for o in &offsets {
            for k in 0..dim {
                candidate[k] = x[k] + step * o[k];
            }
            domain.clamp(&mut candidate);
            let f = objective.value(&candidate);
            if f < fx {
                fx = f;
                x.copy_from_slice(&candidate);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (x, fx)
}
