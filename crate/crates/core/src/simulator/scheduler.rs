use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DirectedEdge, NetworkState};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchedulerPolicy {
    /// Uniform over channels that currently hold a pulse.
    SeededRandom(u64),
    /// Cycles through channels in slot order, skipping empty ones.
    RoundRobin,
    /// Follows the script, skipping entries whose channel is empty, then
    /// continues round-robin.
    AdversaryScript(Vec<DirectedEdge>),
}

/// Picks the next pulse to deliver.
#[derive(Debug, Clone)]
pub struct Scheduler {
    policy: SchedulerPolicy,
    rng: Option<ChaCha8Rng>,
    script_pos: usize,
    rr_next: usize,
}

impl Scheduler {
    pub fn new(policy: SchedulerPolicy) -> Self {
        let rng = match policy {
            SchedulerPolicy::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Self {
            policy,
            rng,
            script_pos: 0,
            rr_next: 0,
        }
    }

    pub fn seeded(seed: u64) -> Self {
        Self::new(SchedulerPolicy::SeededRandom(seed))
    }

    pub fn round_robin() -> Self {
        Self::new(SchedulerPolicy::RoundRobin)
    }

    pub fn scripted(script: Vec<DirectedEdge>) -> Self {
        Self::new(SchedulerPolicy::AdversaryScript(script))
    }

    pub fn policy(&self) -> &SchedulerPolicy {
        &self.policy
    }

    pub fn seed(&self) -> Option<u64> {
        match self.policy {
            SchedulerPolicy::SeededRandom(seed) => Some(seed),
            _ => None,
        }
    }

    /// Number of script entries consumed so far, skipped ones included.
    pub fn script_position(&self) -> usize {
        self.script_pos
    }

    /// `None` exactly when nothing is in flight.
    pub fn pick(&mut self, state: &NetworkState) -> Option<DirectedEdge> {
        match &self.policy {
            SchedulerPolicy::SeededRandom(_) => {
                let enabled = state.enabled_edges();
                if enabled.is_empty() {
                    return None;
                }
                let rng = self.rng.as_mut().expect("seeded policy owns an rng");
                Some(enabled[rng.gen_range(0..enabled.len())])
            }
            SchedulerPolicy::RoundRobin => self.next_round_robin(state),
            SchedulerPolicy::AdversaryScript(script) => {
                while let Some(&edge) = script.get(self.script_pos) {
                    self.script_pos += 1;
                    if state.in_flight(edge) > 0 {
                        return Some(edge);
                    }
                }
                self.next_round_robin(state)
            }
        }
    }

    fn next_round_robin(&mut self, state: &NetworkState) -> Option<DirectedEdge> {
        let slots = state.slot_count();
        (0..slots)
            .map(|i| (self.rr_next + i) % slots)
            .find(|&slot| state.slot_load(slot) > 0)
            .map(|slot| {
                self.rr_next = (slot + 1) % slots;
                state.slot_edge(slot)
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::Algorithm;
    use crate::topology::parse_edge_list;

    fn p3() -> NetworkState {
        NetworkState::new(
            parse_edge_list("0 1\n1 2").unwrap(),
            Algorithm::EvenDiameter,
            None,
        )
        .unwrap()
    }

    #[test]
    fn seeded_picks_repeat() {
        let s = p3();
        let picks = |seed| {
            let mut sch = Scheduler::seeded(seed);
            (0..16).map(|_| sch.pick(&s).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(picks(7), picks(7));
        assert!(picks(7).iter().all(|e| s.in_flight(*e) > 0));
    }

    #[test]
    fn round_robin_alternates() {
        let s = p3();
        let mut sch = Scheduler::round_robin();
        let a = sch.pick(&s).unwrap();
        let b = sch.pick(&s).unwrap();
        assert_ne!(a, b);
        assert_eq!(sch.pick(&s).unwrap(), a);
    }

    #[test]
    fn script_skips_empty_channels() {
        let s = p3();
        let mut sch = Scheduler::scripted(vec![DirectedEdge::new(1, 0), DirectedEdge::new(2, 1)]);
        assert_eq!(sch.pick(&s), Some(DirectedEdge::new(2, 1)));
        assert_eq!(sch.script_position(), 2);
        assert!(sch.pick(&s).is_some());
    }

    #[test]
    fn nothing_in_flight() {
        let s = NetworkState::new(
            parse_edge_list("").unwrap(),
            Algorithm::Stabilizing,
            Some(vec![4]),
        )
        .unwrap();
        assert_eq!(Scheduler::seeded(1).pick(&s), None);
        assert_eq!(Scheduler::round_robin().pick(&s), None);
    }
}
