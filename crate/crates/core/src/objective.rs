//! Objective functions with hand-coded gradients, plus the validation and
//! ground-truth utilities that go with them.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SbgdError};

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Axis-aligned closed box. Bounds initialization and the grid oracle only;
/// objectives themselves are defined on all of R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(SbgdError::param(
                "domain",
                "bounds must be non-empty and of equal length",
            ));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u))
        {
            return Err(SbgdError::param(
                "domain",
                "bounds must be finite with lower <= upper",
            ));
        }
        Ok(BoxDomain { lower, upper })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l)
    }

    /// True when some coordinate range has zero width.
    pub fn is_degenerate(&self) -> bool {
        self.widths().any(|w| w <= 0.0)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| if l < u { rng.random_range(*l..=*u) } else { *l })
            .collect()
    }
}

/// A differentiable objective `F: R^d -> R` with a box of interest.
#[derive(Clone)]
pub struct Objective {
    name: String,
    domain: BoxDomain,
    lipschitz: Option<f64>,
    lipschitz_exact: bool,
    value: Arc<ValueFn>,
    gradient: Arc<GradFn>,
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("lipschitz", &self.lipschitz)
            .field("lipschitz_exact", &self.lipschitz_exact)
            .finish_non_exhaustive()
    }
}

impl Objective {
    pub fn new<V, G>(name: impl Into<String>, domain: BoxDomain, value: V, gradient: G) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Objective {
            name: name.into(),
            domain,
            lipschitz: None,
            lipschitz_exact: false,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }
    }

    /// Attaches a Lipschitz bound for the gradient. `exact` asserts that it
    /// really is a bound on all of R^d.
    pub fn with_lipschitz(mut self, l: f64, exact: bool) -> Self {
        self.lipschitz = Some(l);
        self.lipschitz_exact = exact;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn lipschitz_exact(&self) -> bool {
        self.lipschitz_exact
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
}

/// `F(x) = exp(sin(2x^2)) + (x - pi/2)^2 / 10` on `[-3, 3]`.
///
/// Many local minima; the global one sits near x = 1.5355, with a competing
/// local minimum near 2.34.
pub fn paper_objective() -> Objective {
    let domain = BoxDomain::new(vec![-3.0], vec![3.0]).expect("static domain");
    Objective::new(
        "paper-f",
        domain,
        |x| {
            let t = x[0];
            (2.0 * t * t).sin().exp() + 0.1 * (t - PI / 2.0).powi(2)
        },
        |x| {
            let t = x[0];
            let s = 2.0 * t * t;
            vec![4.0 * t * s.cos() * s.sin().exp() + 0.2 * (t - PI / 2.0)]
        },
    )
}

/// `S(t) = (1.5t - 2)^2 cos(30 pi + (3 pi t)^2)` on `[0, 2]`.
pub fn signal_objective() -> Objective {
    let domain = BoxDomain::new(vec![0.0], vec![2.0]).expect("static domain");
    Objective::new(
        "signal-s",
        domain,
        |x| {
            let t = x[0];
            let a = 1.5 * t - 2.0;
            a * a * (30.0 * PI + (3.0 * PI * t).powi(2)).cos()
        },
        |x| {
            let t = x[0];
            let a = 1.5 * t - 2.0;
            let theta = 30.0 * PI + (3.0 * PI * t).powi(2);
            let dtheta = 18.0 * PI * PI * t;
            vec![3.0 * a * theta.cos() - a * a * theta.sin() * dtheta]
        },
    )
}

/// `|x|^2` on `[-5, 5]^d`, gradient Lipschitz constant exactly 2.
pub fn quadratic_objective(dim: usize) -> Result<Objective> {
    let domain = BoxDomain::cube(dim, -5.0, 5.0)?;
    Ok(Objective::new(
        format!("quadratic-{dim}"),
        domain,
        |x| x.iter().map(|v| v * v).sum(),
        |x| x.iter().map(|v| 2.0 * v).collect(),
    )
    .with_lipschitz(2.0, true))
}

/// Standard Rastrigin, `10d + sum(x^2 - 10 cos(2 pi x))` on `[-5.12, 5.12]^d`,
/// evaluated as `sum(x^2 + 20 sin^2(pi x))` so values near the origin keep
/// full relative precision.
///
/// The Hessian is diagonal with entries `2 + 40 pi^2 cos(2 pi x_k)`, so
/// `2 + 40 pi^2` bounds the gradient's Lipschitz constant.
pub fn rastrigin_objective(dim: usize) -> Result<Objective> {
    let domain = BoxDomain::cube(dim, -5.12, 5.12)?;
    Ok(Objective::new(
        format!("rastrigin-{dim}"),
        domain,
        |x| {
            x.iter()
                .map(|v| {
                    let s = (PI * v).sin();
                    v * v + 20.0 * s * s
                })
                .sum::<f64>()
        },
        |x| {
            x.iter()
                .map(|v| 2.0 * v + 20.0 * PI * (2.0 * PI * v).sin())
                .collect()
        },
    )
    .with_lipschitz(2.0 + 40.0 * PI * PI, true))
}

/// Resolves a CLI objective name: `paper-f`, `signal-s`, `quadratic-<d>`,
/// `rastrigin-<d>`. The literal suffix `-d` takes the dimension from `dim`.
pub fn objective_by_name(name: &str, dim: usize) -> Result<Objective> {
    let parse_dim = |suffix: &str| -> Result<usize> {
        if suffix == "d" {
            return Ok(dim);
        }
        suffix
            .parse::<usize>()
            .ok()
            .filter(|d| *d >= 1)
            .ok_or_else(|| SbgdError::param("objective", format!("bad dimension in `{name}`")))
    };
    match name {
        "paper-f" => Ok(paper_objective()),
        "signal-s" => Ok(signal_objective()),
        _ => {
            if let Some(s) = name.strip_prefix("quadratic-") {
                quadratic_objective(parse_dim(s)?)
            } else if let Some(s) = name.strip_prefix("rastrigin-") {
                rastrigin_objective(parse_dim(s)?)
            } else {
                Err(SbgdError::param(
                    "objective",
                    format!("unknown objective `{name}`"),
                ))
            }
        }
    }
}

/// Central differences, one coordinate at a time.
pub fn finite_diff_gradient(objective: &Objective, x: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(SbgdError::param("h", format!("must be > 0, got {h}")));
    }
    let mut probe = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        probe[k] = x[k] + h;
        let fp = objective.value(&probe);
        probe[k] = x[k] - h;
        let fm = objective.value(&probe);
        probe[k] = x[k];
        out.push((fp - fm) / (2.0 * h));
    }
    Ok(out)
}

const LIPSCHITZ_SAFETY: f64 = 1.2;
const LIPSCHITZ_FLOOR: f64 = 1e-12;

/// Sampled estimate of the gradient's Lipschitz constant over the domain.
///
/// Each sample contributes two difference quotients: one against a nearby
/// point (resolves local curvature) and one against the previous sample.
/// The maximum is inflated by a safety factor of 1.2.
pub fn estimate_lipschitz(objective: &Objective, samples: usize, seed: u64) -> Result<f64> {
    if samples < 2 {
        return Err(SbgdError::param("samples", "need at least 2"));
    }
    let domain = objective.domain();
    if domain.is_degenerate() {
        return Err(SbgdError::param("domain", "zero-volume domain"));
    }
    let diam = domain.widths().map(|w| w * w).sum::<f64>().sqrt();
    let radius = 1e-4 * diam;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0_f64;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for _ in 0..samples {
        let x = domain.sample(&mut rng);
        let gx = objective.gradient(&x);

        let mut y: Vec<f64> = x
            .iter()
            .map(|v| v + radius * rng.random_range(-1.0..=1.0))
            .collect();
        domain.clamp(&mut y);
        best = best.max(quotient(&x, &gx, &y, &objective.gradient(&y)));

        if let Some((px, pg)) = &prev {
            best = best.max(quotient(&x, &gx, px, pg));
        }
        prev = Some((x, gx));
    }
    Ok((best * LIPSCHITZ_SAFETY).max(LIPSCHITZ_FLOOR))
}

fn quotient(x: &[f64], gx: &[f64], y: &[f64], gy: &[f64]) -> f64 {
    let dx = distance(x, y);
    if dx == 0.0 {
        return 0.0;
    }
    distance(gx, gy) / dx
}

/// Returns a copy of the objective carrying an estimated, non-exact bound.
pub fn with_estimated_lipschitz(
    objective: &Objective,
    samples: usize,
    seed: u64,
) -> Result<Objective> {
    let l = estimate_lipschitz(objective, samples, seed)?;
    Ok(objective.clone().with_lipschitz(l, false))
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
