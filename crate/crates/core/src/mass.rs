//! Elementary mass algebra: the step-scaling map `psi`, the mass-transition
//! map `phi`, and relative masses.

use crate::error::{Result, SbgdError};

/// Step-scaling weight `m̃^q` applied to the Armijo fraction.
///
/// Heavier agents (relative mass near 1) get a larger effective fraction and
/// hence a smaller initial step.
pub fn psi(q: f64, m_tilde: f64) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(SbgdError::param("q", format!("must be > 0, got {q}")));
    }
    unit_interval("m_tilde", m_tilde)?;
    Ok(m_tilde.powf(q))
}

/// Fraction `eta^p` of its mass an agent sheds at relative height `eta`.
///
/// `phi(p, 1) = 1`: the worst agent sheds everything.
pub fn phi(p: f64, eta: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(SbgdError::param("p", format!("must be > 0, got {p}")));
    }
    unit_interval("eta", eta)?;
    Ok(eta.powf(p))
}

/// `mass / m_plus`, where `m_plus` is the current maximum mass.
pub fn relative_mass(mass: f64, m_plus: f64) -> Result<f64> {
    if !(m_plus > 0.0) {
        return Err(SbgdError::InvalidSwarm(
            "maximum mass is zero; no active mass left".into(),
        ));
    }
    if mass < 0.0 || mass > m_plus {
        return Err(SbgdError::param(
            "mass",
            format!("must lie in [0, {m_plus}], got {mass}"),
        ));
    }
    Ok(mass / m_plus)
}

fn unit_interval(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(SbgdError::param(
            name,
            format!("must lie in [0, 1], got {v}"),
        ))
    }
}
