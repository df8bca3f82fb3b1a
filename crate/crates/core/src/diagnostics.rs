//! Run diagnostics computed from trajectories: descent of the minimizer
//! sequence, the gradient summability series, the height-range bound and the
//! linear contraction factor for PL objectives.

use crate::objective::Objective;
use crate::trajectory::TrajectoryRecord;

/// `F(X_-^n)` for every recorded iteration.
pub fn minimizer_values(trajectory: &[TrajectoryRecord]) -> Vec<f64> {
    trajectory.iter().map(|r| r.f_min).collect()
}

/// Index `n` of the first pair with `values[n + 1] > values[n]`, if any.
pub fn first_increase(values: &[f64]) -> Option<usize> {
    values.windows(2).position(|w| w[1] > w[0])
}

/// Partial sums of `min{|g+|, |g-|, |g+| |g-|}^2`, where `g+` and `g-` are the
/// gradients at the heaviest agent and the minimizer of each record.
pub fn summability_partial_sums(
    trajectory: &[TrajectoryRecord],
    objective: &Objective,
) -> Vec<f64> {
    let norm = |x: &[f64]| {
        objective
            .gradient(x)
            .iter()
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt()
    };
    let mut total = 0.0;
    trajectory
        .iter()
        .map(|r| {
            let heavy = norm(&r.heaviest().position);
            let low = norm(&r.minimizer().position);
            let m = heavy.min(low).min(heavy * low);
            total += m * m;
            total
        })
        .collect()
}

/// Checks `max_j F(x_j^n) - F(x_i^n) <= M` for every record and active agent,
/// with `M = max_i F(x_i^0) - f_star`. Returns the first offending iteration.
pub fn range_bound_violation(trajectory: &[TrajectoryRecord], f_star: f64) -> Option<usize> {
    let first = trajectory.first()?;
    let m = first.f_max - f_star;
    trajectory
        .iter()
        .find(|r| {
            r.agents
                .iter()
                .filter(|a| a.active)
                .any(|a| r.f_max - a.f_value > m)
        })
        .map(|r| r.iteration)
}

/// `1 - 2 mu gamma lambda (1 - lambda) / L`: guaranteed per-iteration
/// contraction of `F - F*` for a PL objective with constant `mu`.
pub fn linear_rate_factor(mu: f64, gamma: f64, lambda: f64, lipschitz: f64) -> f64 {
    1.0 - 2.0 * mu * gamma * lambda * (1.0 - lambda) / lipschitz
}

/// Ratios `values[n + 1] / values[n]`.
pub fn successive_ratios(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] / w[0]).collect()
}
