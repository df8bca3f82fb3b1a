use crate::error::{Result, SbgdError};

/// A single explorer: a point in the search space plus its share of the unit mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub position: Vec<f64>,
    pub mass: f64,
    pub active: bool,
}

impl Agent {
    pub fn new(position: Vec<f64>, mass: f64) -> Self {
        Agent {
            position,
            mass,
            active: mass > 0.0,
        }
    }

    /// Drops the agent from the iteration. Its mass must already have been
    /// handed to another agent.
    pub(crate) fn deactivate(&mut self) {
        self.mass = 0.0;
        self.active = false;
    }
}

/// The full population. Agents are never removed, only deactivated, so an
/// agent's index is a stable id for the whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct Swarm {
    pub agents: Vec<Agent>,
    pub iteration: usize,
    dim: usize,
}

impl Swarm {
    /// Builds a swarm with equal masses `1/J`.
    pub fn with_uniform_mass(positions: Vec<Vec<f64>>) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(SbgdError::param("J", "swarm needs at least one agent"));
        }
        let mass = 1.0 / n as f64;
        Self::from_agents(positions.into_iter().map(|x| Agent::new(x, mass)).collect())
    }

    pub fn from_agents(agents: Vec<Agent>) -> Result<Self> {
        let dim = agents
            .first()
            .map(|a| a.position.len())
            .ok_or_else(|| SbgdError::param("J", "swarm needs at least one agent"))?;
        if dim == 0 {
            return Err(SbgdError::param(
                "dim",
                "positions must have dimension >= 1",
            ));
        }
        if agents.iter().any(|a| a.position.len() != dim) {
            return Err(SbgdError::InvalidSwarm(
                "agent positions have mixed dimensions".into(),
            ));
        }
        for a in &agents {
            if !(0.0..=1.0).contains(&a.mass) || a.active != (a.mass > 0.0) {
                return Err(SbgdError::InvalidSwarm(format!(
                    "agent mass {} inconsistent with active={}",
                    a.mass, a.active
                )));
            }
        }
        Ok(Swarm {
            agents,
            iteration: 0,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Sum of masses over active agents.
    pub fn total_mass(&self) -> f64 {
        self.agents
            .iter()
            .filter(|a| a.active)
            .map(|a| a.mass)
            .sum()
    }

    pub fn active_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.agents
            .iter()
            .enumerate()
            .filter(|(_, a)| a.active)
            .map(|(i, _)| i)
    }

    pub fn active_count(&self) -> usize {
        self.agents.iter().filter(|a| a.active).count()
    }

    /// Largest mass among active agents (`m_+`), 0 for an empty swarm.
    pub fn max_mass(&self) -> f64 {
        self.agents
            .iter()
            .filter(|a| a.active)
            .map(|a| a.mass)
            .fold(0.0, f64::max)
    }

    /// Active agent with the largest mass, ties to the lowest id.
    pub fn heaviest_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for i in self.active_ids() {
            match best {
                Some(b) if self.agents[i].mass <= self.agents[b].mass => {}
                _ => best = Some(i),
            }
        }
        best
    }

    /// Moves the whole mass of `from` onto `to` and deactivates `from`.
    pub(crate) fn absorb(&mut self, to: usize, from: usize) {
        debug_assert_ne!(to, from);
        let m = self.agents[from].mass;
        self.agents[to].mass += m;
        self.agents[from].deactivate();
    }

    /// Deactivates every active agent left holding exactly zero mass.
    pub(crate) fn retire_massless(&mut self) {
        for a in &mut self.agents {
            if a.active && a.mass == 0.0 {
                a.deactivate();
            }
        }
    }
}
