//! Mass exchange between agents: relative heights, transfer toward the
//! current minimizer, and the merge/cull housekeeping of the tolerance loop.
//!
//! Functions here take the objective values of every agent (indexed by agent
//! id) rather than the objective itself, so one evaluation per iteration is
//! shared by all stages.

use crate::error::{Result, SbgdError};
use crate::mass::phi;
use crate::objective::{distance, Objective};
use crate::swarm::Swarm;

/// Argmin/argmax of F over active agents. Ties go to the lowest agent id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub minimizer_index: usize,
    pub maximizer_index: usize,
    pub f_min: f64,
    pub f_max: f64,
}

/// Relative height of every agent between the swarm's best (0) and worst (1).
#[derive(Debug, Clone, PartialEq)]
pub struct HeightProfile {
    /// Indexed by agent id; entries for inactive agents are 0 and unused.
    pub eta: Vec<f64>,
    pub extremes: Extremes,
}

impl HeightProfile {
    pub fn minimizer_index(&self) -> usize {
        self.extremes.minimizer_index
    }

    pub fn maximizer_index(&self) -> usize {
        self.extremes.maximizer_index
    }

    /// True when every active agent sits at the same height.
    pub fn is_flat(&self) -> bool {
        self.extremes.f_max == self.extremes.f_min
    }
}

/// F at every agent's position, active or not.
pub fn evaluate(swarm: &Swarm, objective: &Objective) -> Vec<f64> {
    swarm
        .agents
        .iter()
        .map(|a| objective.value(&a.position))
        .collect()
}

pub fn find_active_extremes(swarm: &Swarm, values: &[f64]) -> Result<Extremes> {
    check_len(swarm, values)?;
    let mut ids = swarm.active_ids();
    let first = ids
        .next()
        .ok_or_else(|| SbgdError::InvalidSwarm("no active agents".into()))?;
    let mut ext = Extremes {
        minimizer_index: first,
        maximizer_index: first,
        f_min: values[first],
        f_max: values[first],
    };
    for i in ids {
        let f = values[i];
        if f < ext.f_min {
            ext.f_min = f;
            ext.minimizer_index = i;
        }
        if f > ext.f_max {
            ext.f_max = f;
            ext.maximizer_index = i;
        }
    }
    Ok(ext)
}

/// `eta_i = (F_i - F_min) / (F_max - F_min)`; a flat swarm gets all zeros.
pub fn relative_heights(swarm: &Swarm, values: &[f64]) -> Result<HeightProfile> {
    if swarm.active_count() < 2 {
        return Err(SbgdError::InvalidSwarm(
            "relative heights need at least two active agents".into(),
        ));
    }
    let extremes = find_active_extremes(swarm, values)?;
    let span = extremes.f_max - extremes.f_min;
    let mut eta = vec![0.0; swarm.len()];
    if span > 0.0 {
        for i in swarm.active_ids() {
            eta[i] = ((values[i] - extremes.f_min) / span).clamp(0.0, 1.0);
        }
    }
    Ok(HeightProfile { eta, extremes })
}

/// Every active non-minimizer sheds `phi_p(eta_i) * m_i`; the minimizer
/// receives the total in a single addition. Agents left with zero mass (at
/// least the maximizer, unless the swarm is flat) are deactivated.
///
/// Returns the total mass moved.
pub fn redistribute_mass(swarm: &mut Swarm, profile: &HeightProfile, p: f64) -> Result<f64> {
    if profile.eta.len() != swarm.len() {
        return Err(SbgdError::InvalidSwarm(
            "height profile does not match swarm".into(),
        ));
    }
    let winner = profile.minimizer_index();
    if !swarm.agents[winner].active {
        return Err(SbgdError::InvalidSwarm("minimizer is not active".into()));
    }
    let mut shed_total = 0.0;
    for (i, agent) in swarm.agents.iter_mut().enumerate() {
        if i == winner || !agent.active {
            continue;
        }
        let shed = phi(p, profile.eta[i])? * agent.mass;
        agent.mass -= shed;
        shed_total += shed;
    }
    swarm.agents[winner].mass += shed_total;
    swarm.retire_massless();
    Ok(shed_total)
}

/// Deactivates every active agent other than `keep` whose mass is below
/// `threshold`, handing its mass to `keep`. Returns how many were culled.
pub fn cull_light_agents(swarm: &mut Swarm, keep: usize, threshold: f64) -> usize {
    let light: Vec<usize> = swarm
        .active_ids()
        .filter(|&i| i != keep && swarm.agents[i].mass < threshold)
        .collect();
    for &i in &light {
        swarm.absorb(keep, i);
    }
    light.len()
}

/// Collapses active agents closer than `tolmerge` (Euclidean). Pairs are
/// scanned in ascending id order; the member with the higher F (the higher id
/// on a tie) is absorbed by the other, which keeps its position. Repeats until
/// no active pair is within `tolmerge`. Returns the number of merges.
pub fn merge_close_agents(swarm: &mut Swarm, tolmerge: f64, values: &[f64]) -> Result<usize> {
    check_len(swarm, values)?;
    let mut merges = 0;
    loop {
        let before = merges;
        for a in 0..swarm.len() {
            for b in a + 1..swarm.len() {
                if !(swarm.agents[a].active && swarm.agents[b].active) {
                    continue;
                }
                if distance(&swarm.agents[a].position, &swarm.agents[b].position) < tolmerge {
                    let (keep, drop) = if values[b] < values[a] {
                        (b, a)
                    } else {
                        (a, b)
                    };
                    swarm.absorb(keep, drop);
                    merges += 1;
                }
            }
        }
        if merges == before {
            return Ok(merges);
        }
    }
}

fn check_len(swarm: &Swarm, values: &[f64]) -> Result<()> {
    if values.len() == swarm.len() {
        Ok(())
    } else {
        Err(SbgdError::InvalidSwarm(format!(
            "{} values for {} agents",
            values.len(),
            swarm.len()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swarm::Agent;
    use proptest::prelude::*;

    fn line_swarm(xs: &[f64], masses: &[f64]) -> Swarm {
        Swarm::from_agents(
            xs.iter()
                .zip(masses)
                .map(|(&x, &m)| Agent::new(vec![x], m))
                .collect(),
        )
        .unwrap()
    }

    fn thirds() -> Swarm {
        Swarm::with_uniform_mass(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap()
    }

    #[test]
    fn extremes_examples() {
        let s = thirds();
        let e = find_active_extremes(&s, &[5.0, 2.0, 3.0]).unwrap();
        assert_eq!((e.minimizer_index, e.maximizer_index), (1, 0));
        let e = find_active_extremes(&s, &[2.0, 2.0, 3.0]).unwrap();
        assert_eq!(e.minimizer_index, 0);
        let single = Swarm::with_uniform_mass(vec![vec![0.0]]).unwrap();
        let e = find_active_extremes(&single, &[7.0]).unwrap();
        assert_eq!(e.minimizer_index, e.maximizer_index);
    }

    #[test]
    fn extremes_skip_inactive_and_fail_when_empty() {
        let mut s = thirds();
        s.absorb(1, 0);
        let e = find_active_extremes(&s, &[-100.0, 2.0, 3.0]).unwrap();
        assert_eq!(e.minimizer_index, 1);
        s.absorb(1, 2);
        s.agents[1].deactivate();
        assert!(matches!(
            find_active_extremes(&s, &[0.0; 3]),
            Err(SbgdError::InvalidSwarm(_))
        ));
    }

    #[test]
    fn heights_examples() {
        let h = relative_heights(&thirds(), &[2.0, 3.0, 5.0]).unwrap();
        assert_eq!(h.eta, vec![0.0, 1.0 / 3.0, 1.0]);
        let h = relative_heights(&thirds(), &[4.0, 4.0, 4.0]).unwrap();
        assert_eq!(h.eta, vec![0.0; 3]);
        assert!(h.is_flat());
        let two = Swarm::with_uniform_mass(vec![vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(
            relative_heights(&two, &[0.0, 1.0]).unwrap().eta,
            vec![0.0, 1.0]
        );
        let one = Swarm::with_uniform_mass(vec![vec![0.0]]).unwrap();
        assert!(relative_heights(&one, &[0.0]).is_err());
    }

    #[test]
    fn redistribution_example() {
        let mut s = thirds();
        let h = relative_heights(&s, &[2.0, 3.0, 5.0]).unwrap();
        redistribute_mass(&mut s, &h, 1.0).unwrap();
        // agent 1 sheds 1/9, agent 2 sheds 1/3
        let m: Vec<f64> = s.agents.iter().map(|a| a.mass).collect();
        assert!((m[0] - 7.0 / 9.0).abs() < 1e-15);
        assert!((m[1] - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(m[2], 0.0);
        assert!(!s.agents[2].active);
        assert!((s.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn redistribution_two_agents_and_flat() {
        let mut s = Swarm::with_uniform_mass(vec![vec![0.0], vec![1.0]]).unwrap();
        let h = relative_heights(&s, &[0.0, 1.0]).unwrap();
        redistribute_mass(&mut s, &h, 1.0).unwrap();
        assert_eq!((s.agents[0].mass, s.agents[1].mass), (1.0, 0.0));

        let mut s = thirds();
        let before = s.clone();
        let h = relative_heights(&s, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(redistribute_mass(&mut s, &h, 2.0).unwrap(), 0.0);
        assert_eq!(s, before);
    }

    #[test]
    fn merge_example() {
        let f = |x: f64| x * x;
        let mut s = line_swarm(&[1.0, 1.0005], &[0.3, 0.2]);
        let vals = [f(1.0), f(1.0005)];
        assert_eq!(merge_close_agents(&mut s, 1e-3, &vals).unwrap(), 1);
        assert!(s.agents[0].active && !s.agents[1].active);
        assert_eq!(s.agents[0].position, vec![1.0]);
        assert!((s.agents[0].mass - 0.5).abs() < 1e-15);
    }

    #[test]
    fn merge_noop_when_spread() {
        let mut s = thirds();
        let before = s.clone();
        assert_eq!(
            merge_close_agents(&mut s, 1e-3, &[0.0, 1.0, 2.0]).unwrap(),
            0
        );
        assert_eq!(s, before);
    }

    #[test]
    fn merge_cascade_of_three() {
        let mut s = line_swarm(&[0.0, 4e-4, 8e-4], &[0.2, 0.3, 0.5]);
        // lowest value in the middle; all pairwise distances < 1e-3
        let vals = [1.0, 0.5, 0.7];
        merge_close_agents(&mut s, 1e-3, &vals).unwrap();
        assert_eq!(s.active_count(), 1);
        assert!(s.agents[1].active);
        assert!((s.agents[1].mass - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cull_moves_mass_to_keeper() {
        let mut s = line_swarm(&[0.0, 1.0, 2.0, 3.0], &[0.5, 1e-6, 0.49, 0.009999]);
        let n = cull_light_agents(&mut s, 0, 1e-5);
        assert_eq!(n, 1);
        assert!(!s.agents[1].active);
        assert!((s.total_mass() - 1.0).abs() < 1e-12);
    }

    /// Brute-force pairwise check: no two active agents within `tol`.
    fn no_close_pairs(s: &Swarm, tol: f64) -> bool {
        let ids: Vec<usize> = s.active_ids().collect();
        ids.iter().all(|&a| {
            ids.iter()
                .all(|&b| a == b || distance(&s.agents[a].position, &s.agents[b].position) >= tol)
        })
    }

    proptest! {
        #[test]
        fn communication_conserves_mass(
            vals in prop::collection::vec(-10.0f64..10.0, 2..30),
            p in 0.2f64..4.0,
        ) {
            let n = vals.len();
            let mut s = Swarm::with_uniform_mass((0..n).map(|i| vec![i as f64]).collect()).unwrap();
            let h = relative_heights(&s, &vals).unwrap();
            let winner = h.minimizer_index();
            let m0 = s.agents[winner].mass;
            redistribute_mass(&mut s, &h, p).unwrap();
            prop_assert!((s.total_mass() - 1.0).abs() < 1e-12);
            if !h.is_flat() {
                prop_assert_eq!(s.agents[h.maximizer_index()].mass, 0.0);
                prop_assert!(!s.agents[h.maximizer_index()].active);
                prop_assert!(s.agents[winner].mass > m0);
            }
            for a in &s.agents {
                prop_assert_eq!(a.active, a.mass > 0.0);
            }
        }

        #[test]
        fn heights_are_affine_invariant(
            vals in prop::collection::vec(-10.0f64..10.0, 2..20),
        ) {
            let n = vals.len();
            let s = Swarm::with_uniform_mass((0..n).map(|i| vec![i as f64]).collect()).unwrap();
            let scaled: Vec<f64> = vals.iter().map(|v| 2.0 * v + 3.0).collect();
            let a = relative_heights(&s, &vals).unwrap();
            let b = relative_heights(&s, &scaled).unwrap();
            prop_assert_eq!(a.minimizer_index(), b.minimizer_index());
            prop_assert_eq!(a.maximizer_index(), b.maximizer_index());
            for (x, y) in a.eta.iter().zip(&b.eta) {
                prop_assert!((x - y).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(x));
            }
        }

        #[test]
        fn merge_reaches_fixed_point(
            xs in prop::collection::vec(0.0f64..0.01, 2..25),
            tol in 1e-4f64..3e-3,
        ) {
            let mut s = Swarm::with_uniform_mass(xs.iter().map(|&x| vec![x]).collect()).unwrap();
            let vals: Vec<f64> = xs.iter().map(|x| (x * 1e3).sin()).collect();
            merge_close_agents(&mut s, tol, &vals).unwrap();
            prop_assert!(no_close_pairs(&s, tol));
            prop_assert!((s.total_mass() - 1.0).abs() < 1e-12);
            let again = s.clone();
            prop_assert_eq!(merge_close_agents(&mut s, tol, &vals).unwrap(), 0);
            prop_assert_eq!(s, again);
        }
    }
}
