//! Shared setups for the benchmarks.

use sbgd_core::{InitScheme, SbgdParams, Variant};

/// Tolerance variant on equidistant agents, the fast-converging setup.
pub fn tolerance_params(agents: usize) -> SbgdParams {
    SbgdParams {
        agents,
        lipschitz: 25.0,
        init: InitScheme::Equidistant,
        variant: Variant::Tolerance,
        ..Default::default()
    }
}

/// Elimination variant from the left cluster.
pub fn basic_params(agents: usize) -> SbgdParams {
    SbgdParams {
        agents,
        lipschitz: 5.0,
        init: InitScheme::LeftCluster,
        variant: Variant::Basic,
        ..Default::default()
    }
}
