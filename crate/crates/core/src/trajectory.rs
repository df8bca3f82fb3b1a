use crate::swarm::Swarm;

/// State of one agent at the end of an iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentSnapshot {
    pub agent_id: usize,
    pub position: Vec<f64>,
    pub mass: f64,
    pub f_value: f64,
    pub active: bool,
}

/// Snapshot of the whole swarm after an iteration (iteration 0 is the
/// initial state).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub iteration: usize,
    pub agents: Vec<AgentSnapshot>,
    /// Active agent with the lowest F.
    pub minimizer_index: usize,
    /// Active agent with the largest mass.
    pub heaviest_index: usize,
    pub f_min: f64,
    pub f_max: f64,
}

impl TrajectoryRecord {
    /// `values[i]` must be F at agent `i`'s current position. The swarm must
    /// have at least one active agent.
    pub(crate) fn capture(swarm: &Swarm, values: &[f64]) -> Self {
        let mut minimizer_index = usize::MAX;
        let mut f_min = f64::INFINITY;
        let mut f_max = f64::NEG_INFINITY;
        for i in swarm.active_ids() {
            if values[i] < f_min || minimizer_index == usize::MAX {
                f_min = values[i];
                minimizer_index = i;
            }
            f_max = f_max.max(values[i]);
        }
        TrajectoryRecord {
            iteration: swarm.iteration,
            agents: swarm
                .agents
                .iter()
                .enumerate()
                .map(|(agent_id, a)| AgentSnapshot {
                    agent_id,
                    position: a.position.clone(),
                    mass: a.mass,
                    f_value: values[agent_id],
                    active: a.active,
                })
                .collect(),
            minimizer_index,
            heaviest_index: swarm.heaviest_index().unwrap_or(usize::MAX),
            f_min,
            f_max,
        }
    }

    pub fn active_count(&self) -> usize {
        self.agents.iter().filter(|a| a.active).count()
    }

    pub fn total_mass(&self) -> f64 {
        self.agents
            .iter()
            .filter(|a| a.active)
            .map(|a| a.mass)
            .sum()
    }

    /// Position of the minimizer `X_-`.
    pub fn minimizer(&self) -> &AgentSnapshot {
        &self.agents[self.minimizer_index]
    }

    /// Position of the heaviest agent `X_+`.
    pub fn heaviest(&self) -> &AgentSnapshot {
        &self.agents[self.heaviest_index]
    }
}
