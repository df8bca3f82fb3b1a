//! Backtracking line search along the negative gradient.
//!
//! The trial step starts at `h0 = (2/L)(1 - lambda_eff)` and shrinks by `gamma`
//! until the sufficient-decrease test
//! `F(x - h g) <= F(x) - lambda_eff * h * |g|^2` holds. When `L` bounds the
//! gradient's Lipschitz constant the accepted step never drops below
//! `gamma * h0`.
//!
//! A point whose required decrease at `h0` is below the resolution of `F(x)`
//! (so that `F(x) - lambda_eff * h0 * |g|^2` rounds to `F(x)`) is stationary to
//! working precision. It is treated like a zero gradient: `h0` is accepted and
//! the point stays where it is.

use crate::error::{Result, SbgdError};
use crate::objective::Objective;

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    /// Accepted step size `h = h0 * gamma^shrinks`.
    pub step: f64,
    pub shrinks: u32,
    /// `F(x - h g)` at the accepted step.
    pub armijo_lhs: f64,
    /// `F(x) - lambda_eff * h * |g|^2` at the accepted step.
    pub armijo_rhs: f64,
    /// The accepted point `x - h g`.
    pub position: Vec<f64>,
}

/// `h0 = (2/L)(1 - lambda_eff)`.
pub fn initial_step(lipschitz: f64, lambda_eff: f64) -> Result<f64> {
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return Err(SbgdError::param(
            "L",
            format!("must be > 0, got {lipschitz}"),
        ));
    }
    if !(0.0..1.0).contains(&lambda_eff) {
        return Err(SbgdError::param(
            "lambda_eff",
            format!("must lie in [0, 1), got {lambda_eff}"),
        ));
    }
    Ok(2.0 / lipschitz * (1.0 - lambda_eff))
}

/// Guaranteed minimum accepted step `gamma * h0` when `L` is a true bound.
pub fn step_lower_bound(lipschitz: f64, gamma: f64, lambda_eff: f64) -> Result<f64> {
    Ok(initial_step(lipschitz, lambda_eff)? * gamma)
}

/// Runs the search from `x`, evaluating `F(x)` and `grad F(x)` itself.
pub fn backtrack(
    objective: &Objective,
    x: &[f64],
    lambda_eff: f64,
    gamma: f64,
    lipschitz: f64,
    max_shrinks: u32,
) -> Result<LineSearchOutcome> {
    let fx = objective.value(x);
    let grad = objective.gradient(x);
    backtrack_from(
        objective,
        x,
        fx,
        &grad,
        lambda_eff,
        gamma,
        lipschitz,
        max_shrinks,
    )
}

/// As [`backtrack`], with `F(x)` and `grad F(x)` supplied by the caller.
#[allow(clippy::too_many_arguments)]
pub fn backtrack_from(
    objective: &Objective,
    x: &[f64],
    fx: f64,
    grad: &[f64],
    lambda_eff: f64,
    gamma: f64,
    lipschitz: f64,
    max_shrinks: u32,
) -> Result<LineSearchOutcome> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(SbgdError::param(
            "gamma",
            format!("must lie in (0, 1), got {gamma}"),
        ));
    }
    let mut step = initial_step(lipschitz, lambda_eff)?;
    let grad_sq: f64 = grad.iter().map(|g| g * g).sum();
    let rhs0 = fx - lambda_eff * step * grad_sq;
    if grad_sq == 0.0 || rhs0 == fx {
        return Ok(LineSearchOutcome {
            step,
            shrinks: 0,
            armijo_lhs: fx,
            armijo_rhs: rhs0,
            position: x.to_vec(),
        });
    }

    let mut trial = vec![0.0; x.len()];
    let mut shrinks = 0;
    loop {
        for ((t, xi), gi) in trial.iter_mut().zip(x).zip(grad) {
            *t = xi - step * gi;
        }
        let lhs = objective.value(&trial);
        let rhs = fx - lambda_eff * step * grad_sq;
        // NaN on the left keeps shrinking
        if lhs <= rhs {
            return Ok(LineSearchOutcome {
                step,
                shrinks,
                armijo_lhs: lhs,
                armijo_rhs: rhs,
                position: trial,
            });
        }
        if shrinks == max_shrinks {
            return Err(SbgdError::LineSearchFailure { shrinks, step });
        }
        step *= gamma;
        shrinks += 1;
    }
}
