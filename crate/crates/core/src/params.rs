use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SbgdError};

/// Which driver loop a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Eliminate the worst agent every iteration until one remains.
    Basic,
    /// Cull light agents, merge close ones, stop on a small minimizer residual.
    Tolerance,
    /// Independent backtracking descents, no mass exchange.
    Baseline,
}

/// Initial placement of agents inside the box domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitScheme {
    UniformRandom,
    Equidistant,
    /// Equidistant over the leftmost tenth of each coordinate range.
    LeftCluster,
}

macro_rules! name_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = SbgdError;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    other => Err(SbgdError::param(
                        stringify!($ty),
                        format!("unknown value `{other}`"),
                    )),
                }
            }
        }
    };
}

name_enum!(Variant { Basic => "basic", Tolerance => "tolerance", Baseline => "baseline" });
name_enum!(InitScheme {
    UniformRandom => "uniform-random",
    Equidistant => "equidistant",
    LeftCluster => "left-cluster",
});

/// All tunables of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SbgdParams {
    /// Initial number of agents `J`.
    pub agents: usize,
    /// Mass-transition exponent.
    pub p: f64,
    /// Step-scaling exponent.
    pub q: f64,
    /// Armijo fraction.
    pub lambda: f64,
    /// Backtracking shrink factor.
    pub gamma: f64,
    /// Lipschitz bound for the gradient; sets the initial step.
    pub lipschitz: f64,
    /// Whether `lipschitz` is a proven bound. Enables the step lower-bound check.
    pub lipschitz_exact: bool,
    /// Light-agent cull threshold (scaled by 1/N).
    pub tolm: f64,
    /// Distance below which two agents merge.
    pub tolmerge: f64,
    /// Stopping residual on the minimizer position.
    pub tolres: f64,
    /// `None` means `10 * agents`.
    pub max_iterations: Option<usize>,
    pub max_shrinks: u32,
    pub init: InitScheme,
    pub seed: u64,
    pub variant: Variant,
}

impl Default for SbgdParams {
    fn default() -> Self {
        SbgdParams {
            agents: 10,
            p: 1.0,
            q: 1.0,
            lambda: 0.2,
            gamma: 0.9,
            lipschitz: 1.0,
            lipschitz_exact: false,
            tolm: 1e-4,
            tolmerge: 1e-3,
            tolres: 1e-4,
            max_iterations: None,
            max_shrinks: 200,
            init: InitScheme::UniformRandom,
            seed: 0,
            variant: Variant::Basic,
        }
    }
}

impl SbgdParams {
    pub fn iteration_limit(&self) -> usize {
        self.max_iterations.unwrap_or(10 * self.agents)
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents == 0 {
            return Err(SbgdError::param("J", "must be >= 1"));
        }
        positive("p", self.p)?;
        positive("q", self.q)?;
        positive("L", self.lipschitz)?;
        open_unit("lambda", self.lambda)?;
        open_unit("gamma", self.gamma)?;
        positive("tolm", self.tolm)?;
        positive("tolmerge", self.tolmerge)?;
        positive("tolres", self.tolres)?;
        if self.iteration_limit() == 0 {
            return Err(SbgdError::param("max_iterations", "must be >= 1"));
        }
        if self.max_shrinks == 0 {
            return Err(SbgdError::param("max_shrinks", "must be >= 1"));
        }
        Ok(())
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && !v.is_nan() {
        Ok(())
    } else {
        Err(SbgdError::param(name, format!("must be > 0, got {v}")))
    }
}

fn open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(SbgdError::param(
            name,
            format!("must lie in (0, 1), got {v}"),
        ))
    }
}
