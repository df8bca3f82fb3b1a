//! Iteration drivers: a single communication-plus-descent step, the
//! elimination loop, the tolerance-factor loop and the communication-free
//! baseline.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::communication::{
    cull_light_agents, evaluate, find_active_extremes, merge_close_agents, redistribute_mass,
    relative_heights, HeightProfile,
};
use crate::error::{Result, SbgdError};
use crate::linesearch::{backtrack_from, step_lower_bound, LineSearchOutcome};
use crate::mass::{psi, relative_mass};
use crate::objective::{distance, Objective};
use crate::params::{InitScheme, SbgdParams, Variant};
use crate::swarm::Swarm;
use crate::trajectory::TrajectoryRecord;

const STALL_DISPLACEMENT: f64 = 1e-15;
const STALL_ROUNDS: usize = 2;
const LEFT_CLUSTER_FRACTION: f64 = 0.1;

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    SingleAgent,
    Residual,
    MaxIterations,
    Stalled,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::SingleAgent => "single-agent",
            Termination::Residual => "residual",
            Termination::MaxIterations => "max-iterations",
            Termination::Stalled => "stalled",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub solution: Vec<f64>,
    pub f_solution: f64,
    pub iterations_used: usize,
    pub termination: Termination,
    /// Initial state followed by one record per completed iteration.
    pub trajectory: Vec<TrajectoryRecord>,
    pub seed: u64,
}

/// One accepted line search, reported to a [`StepObserver`].
#[derive(Debug, Clone, Copy)]
pub struct AcceptedStep<'a> {
    /// Iteration the step belongs to (the swarm's counter before increment).
    pub iteration: usize,
    pub agent_id: usize,
    pub from: &'a [f64],
    pub f_from: f64,
    pub gradient: &'a [f64],
    pub lambda_eff: f64,
    pub outcome: &'a LineSearchOutcome,
}

/// Receives every accepted line search of a run, in agent-id order within
/// each iteration.
pub trait StepObserver {
    fn on_step(&mut self, step: &AcceptedStep<'_>);
}

impl<F: FnMut(&AcceptedStep<'_>)> StepObserver for F {
    fn on_step(&mut self, step: &AcceptedStep<'_>) {
        self(step)
    }
}

struct Quiet;

impl StepObserver for Quiet {
    fn on_step(&mut self, _: &AcceptedStep<'_>) {}
}

/// Places `params.agents` agents in the objective's box with mass `1/J` each.
pub fn init_swarm(params: &SbgdParams, objective: &Objective) -> Result<Swarm> {
    if params.agents == 0 {
        return Err(SbgdError::param("J", "must be >= 1"));
    }
    let domain = objective.domain();
    let j = params.agents;
    let positions: Vec<Vec<f64>> = match params.init {
        InitScheme::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            (0..j).map(|_| domain.sample(&mut rng)).collect()
        }
        InitScheme::Equidistant => diagonal(&domain.lower, &domain.upper, j),
        InitScheme::LeftCluster => {
            let upper: Vec<f64> = domain
                .lower
                .iter()
                .zip(domain.widths())
                .map(|(lo, w)| lo + LEFT_CLUSTER_FRACTION * w)
                .collect();
            diagonal(&domain.lower, &upper, j)
        }
    };
    Swarm::with_uniform_mass(positions)
}

/// `j` evenly spaced points from `lower` to `upper` inclusive; one point sits
/// at the midpoint.
fn diagonal(lower: &[f64], upper: &[f64], j: usize) -> Vec<Vec<f64>> {
    if j == 1 {
        return vec![lower
            .iter()
            .zip(upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()];
    }
    (0..j)
        .map(|k| {
            if k == j - 1 {
                return upper.to_vec();
            }
            let t = k as f64 / (j - 1) as f64;
            lower
                .iter()
                .zip(upper)
                .map(|(l, u)| l + t * (u - l))
                .collect()
        })
        .collect()
}

/// Outcome of [`step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// Heights computed at the start of the step.
    pub profile: HeightProfile,
    /// F at every agent's position after the step.
    pub values: Vec<f64>,
    /// Largest distance any agent moved.
    pub max_displacement: f64,
}

/// One full iteration: heights, mass transfer to the minimizer, mass-scaled
/// line search for every active agent, position update.
pub fn step(swarm: &mut Swarm, params: &SbgdParams, objective: &Objective) -> Result<StepReport> {
    params.validate()?;
    let mut values = evaluate(swarm, objective);
    let mut quiet = Quiet;
    let mut driver = Driver::new(params, objective, &mut quiet);
    let profile = relative_heights(swarm, &values)?;
    redistribute_mass(swarm, &profile, params.p)?;
    let max_displacement = driver.descend(swarm, &mut values, true)?;
    Ok(StepReport {
        profile,
        values,
        max_displacement,
    })
}

/// Runs the loop selected by `params.variant`.
pub fn run(params: &SbgdParams, objective: &Objective) -> Result<RunResult> {
    run_observed(params, objective, &mut Quiet)
}

pub fn run_observed(
    params: &SbgdParams,
    objective: &Objective,
    observer: &mut dyn StepObserver,
) -> Result<RunResult> {
    let mut driver = Driver::new(params, objective, observer);
    match params.variant {
        Variant::Basic => driver.basic(),
        Variant::Tolerance => driver.tolerance(),
        Variant::Baseline => driver.baseline(),
    }
}

/// Elimination loop: communicate, descend, drop the worst agent, until one
/// agent is left. Returns the heaviest agent.
pub fn run_basic(params: &SbgdParams, objective: &Objective) -> Result<RunResult> {
    run_with_variant(params, objective, Variant::Basic)
}

/// Tolerance-factor loop: cull agents lighter than `tolm / N`, communicate,
/// descend, merge agents closer than `tolmerge`, stop once the minimizer moves
/// less than `tolres`. Returns the minimizer.
pub fn run_tolerance(params: &SbgdParams, objective: &Objective) -> Result<RunResult> {
    run_with_variant(params, objective, Variant::Tolerance)
}

/// Independent backtracking descents with fixed equal masses and the plain
/// Armijo fraction. Stops when no agent moves by `tolres` or more. Returns the
/// lowest agent.
pub fn run_baseline(params: &SbgdParams, objective: &Objective) -> Result<RunResult> {
    run_with_variant(params, objective, Variant::Baseline)
}

fn run_with_variant(
    params: &SbgdParams,
    objective: &Objective,
    variant: Variant,
) -> Result<RunResult> {
    let params = SbgdParams {
        variant,
        ..params.clone()
    };
    run(&params, objective)
}

struct Driver<'a> {
    params: &'a SbgdParams,
    objective: &'a Objective,
    observer: &'a mut dyn StepObserver,
}

impl<'a> Driver<'a> {
    fn new(
        params: &'a SbgdParams,
        objective: &'a Objective,
        observer: &'a mut dyn StepObserver,
    ) -> Self {
        Driver {
            params,
            objective,
            observer,
        }
    }

    fn start(&self) -> Result<(Swarm, Vec<f64>, Vec<TrajectoryRecord>)> {
        self.params.validate()?;
        let swarm = init_swarm(self.params, self.objective)?;
        let values = evaluate(&swarm, self.objective);
        let record = TrajectoryRecord::capture(&swarm, &values);
        Ok((swarm, values, vec![record]))
    }

    /// Line search and position update for every active agent, then bumps
    /// the iteration counter. With `mass_scaled` the Armijo fraction is
    /// `lambda * psi_q(m / m_+)`, otherwise plain `lambda`.
    fn descend(&mut self, swarm: &mut Swarm, values: &mut [f64], mass_scaled: bool) -> Result<f64> {
        let p = self.params;
        let m_plus = swarm.max_mass();
        let mut max_displacement = 0.0_f64;
        let iteration = swarm.iteration;
        for (i, (agent, value)) in swarm.agents.iter_mut().zip(values.iter_mut()).enumerate() {
            if !agent.active {
                continue;
            }
            let lambda_eff = if mass_scaled {
                p.lambda * psi(p.q, relative_mass(agent.mass, m_plus)?)?
            } else {
                p.lambda
            };
            let x = &agent.position;
            let grad = self.objective.gradient(x);
            let outcome = backtrack_from(
                self.objective,
                x,
                *value,
                &grad,
                lambda_eff,
                p.gamma,
                p.lipschitz,
                p.max_shrinks,
            )?;
            if p.lipschitz_exact {
                let bound = step_lower_bound(p.lipschitz, p.gamma, lambda_eff)?;
                if outcome.step < bound {
                    return Err(SbgdError::StepBoundViolation {
                        step: outcome.step,
                        bound,
                    });
                }
            }
            self.observer.on_step(&AcceptedStep {
                iteration,
                agent_id: i,
                from: x,
                f_from: *value,
                gradient: &grad,
                lambda_eff,
                outcome: &outcome,
            });
            max_displacement = max_displacement.max(distance(x, &outcome.position));
            *value = outcome.armijo_lhs;
            agent.position = outcome.position;
        }
        swarm.iteration += 1;
        Ok(max_displacement)
    }

    fn basic(&mut self) -> Result<RunResult> {
        let (mut swarm, mut values, mut trajectory) = self.start()?;
        if swarm.active_count() == 1 {
            return self.independent_descent(swarm, values, trajectory);
        }
        let limit = self.params.iteration_limit();
        let mut stall = StallDetector::default();
        let mut termination = Termination::SingleAgent;
        while swarm.active_count() >= 2 {
            if swarm.iteration >= limit {
                termination = Termination::MaxIterations;
                break;
            }
            let profile = relative_heights(&swarm, &values)?;
            redistribute_mass(&mut swarm, &profile, self.params.p)?;
            // A flat swarm keeps its maximizer's mass; hand the highest-id
            // non-minimizer's share to the minimizer so one agent still drops.
            let loser = if profile.is_flat() {
                swarm
                    .active_ids()
                    .filter(|&i| i != profile.minimizer_index())
                    .last()
            } else {
                Some(profile.maximizer_index())
            };
            if let Some(loser) = loser {
                if swarm.agents[loser].active {
                    swarm.absorb(profile.minimizer_index(), loser);
                }
            }
            let moved = self.descend(&mut swarm, &mut values, true)?;
            trajectory.push(TrajectoryRecord::capture(&swarm, &values));
            if stall.observe(profile.is_flat(), moved) {
                termination = Termination::Stalled;
                break;
            }
        }
        let best = swarm.heaviest_index().expect("at least one active agent");
        Ok(self.finish(&swarm, &values, best, termination, trajectory))
    }

    fn tolerance(&mut self) -> Result<RunResult> {
        let (mut swarm, mut values, mut trajectory) = self.start()?;
        if swarm.active_count() == 1 {
            return self.independent_descent(swarm, values, trajectory);
        }
        let p = self.params;
        let limit = p.iteration_limit();
        let mut stall = StallDetector::default();
        let mut termination = Termination::SingleAgent;
        while swarm.active_count() >= 2 {
            if swarm.iteration >= limit {
                termination = Termination::MaxIterations;
                break;
            }
            let profile = relative_heights(&swarm, &values)?;
            let leader = profile.minimizer_index();
            let leader_before = swarm.agents[leader].position.clone();

            let n = swarm.active_count() as f64;
            cull_light_agents(&mut swarm, leader, p.tolm / n);
            redistribute_mass(&mut swarm, &profile, p.p)?;
            let moved = self.descend(&mut swarm, &mut values, true)?;
            merge_close_agents(&mut swarm, p.tolmerge, &values)?;

            trajectory.push(TrajectoryRecord::capture(&swarm, &values));
            let next = find_active_extremes(&swarm, &values)?.minimizer_index;
            let residual = distance(&swarm.agents[next].position, &leader_before);
            if residual < p.tolres {
                termination = Termination::Residual;
                break;
            }
            if stall.observe(profile.is_flat(), moved) {
                termination = Termination::Stalled;
                break;
            }
        }
        let best = find_active_extremes(&swarm, &values)?.minimizer_index;
        Ok(self.finish(&swarm, &values, best, termination, trajectory))
    }

    fn baseline(&mut self) -> Result<RunResult> {
        let (swarm, values, trajectory) = self.start()?;
        self.independent_descent(swarm, values, trajectory)
    }

    /// Plain backtracking descent of every agent with fixed masses. Shared by
    /// the baseline and by single-agent runs of the other loops, where no
    /// communication is possible.
    fn independent_descent(
        &mut self,
        mut swarm: Swarm,
        mut values: Vec<f64>,
        mut trajectory: Vec<TrajectoryRecord>,
    ) -> Result<RunResult> {
        let limit = self.params.iteration_limit();
        let termination = loop {
            if swarm.iteration >= limit {
                break Termination::MaxIterations;
            }
            let moved = self.descend(&mut swarm, &mut values, false)?;
            trajectory.push(TrajectoryRecord::capture(&swarm, &values));
            if moved < self.params.tolres {
                break Termination::Residual;
            }
        };
        let best = find_active_extremes(&swarm, &values)?.minimizer_index;
        Ok(self.finish(&swarm, &values, best, termination, trajectory))
    }

    fn finish(
        &self,
        swarm: &Swarm,
        values: &[f64],
        best: usize,
        termination: Termination,
        trajectory: Vec<TrajectoryRecord>,
    ) -> RunResult {
        RunResult {
            solution: swarm.agents[best].position.clone(),
            f_solution: values[best],
            iterations_used: swarm.iteration,
            termination,
            trajectory,
            seed: self.params.seed,
        }
    }
}

/// Flags a flat swarm that has stopped moving for consecutive iterations.
#[derive(Default)]
struct StallDetector {
    quiet_rounds: usize,
}

impl StallDetector {
    fn observe(&mut self, flat: bool, moved: f64) -> bool {
        if flat && moved <= STALL_DISPLACEMENT {
            self.quiet_rounds += 1;
        } else {
            self.quiet_rounds = 0;
        }
        self.quiet_rounds >= STALL_ROUNDS
    }
}
