use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::{Algorithm, NetworkState, SimError};
use crate::protocol::Output;
use crate::topology::{layer_decomposition, Layering, TreeTopology, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreCaps {
    pub max_states: usize,
}

impl Default for ExploreCaps {
    fn default() -> Self {
        Self {
            max_states: 2_000_000,
        }
    }
}

/// What a final configuration looks like, up to the order that produced it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TerminalClass {
    pub leaders: Vec<Vertex>,
    pub leader_declarations: u32,
    pub all_halted: bool,
    pub total_pulses: u64,
    /// Per directed edge in slot order.
    pub per_edge_sent: Vec<u32>,
    pub deliveries_to_halted: u64,
    pub in_flight_at_leader: Option<u64>,
    pub election_entrants: Vec<Vertex>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ExploreReport {
    pub states: usize,
    pub transitions: usize,
    pub terminal_states: usize,
    /// Distinct terminal classes with the number of terminal states in each.
    pub classes: Vec<(TerminalClass, usize)>,
    /// Deliveries before the first Leader declaration that do not go from a
    /// vertex to its parent.
    pub direction_violations: usize,
    pub port_star_rewrites: usize,
    /// A decided output changed, or a halted node changed at all.
    pub output_flips: usize,
    /// A node sent more up its Port* than the largest quota for its degree.
    pub quota_overruns: usize,
}

impl ExploreReport {
    /// Every schedule ends in the same class.
    pub fn confluent(&self) -> bool {
        self.classes.len() == 1
    }

    pub fn max_in_flight_at_leader(&self) -> Option<u64> {
        self.classes
            .iter()
            .filter_map(|(c, _)| c.in_flight_at_leader)
            .max()
    }

    pub fn violation_count(&self) -> usize {
        self.direction_violations
            + self.port_star_rewrites
            + self.output_flips
            + self.quota_overruns
    }
}

pub fn explore_all_schedules(
    topology: TreeTopology,
    algorithm: Algorithm,
    ids: Option<Vec<u32>>,
    caps: ExploreCaps,
) -> Result<ExploreReport, SimError> {
    explore_from(NetworkState::new(topology, algorithm, ids)?, caps)
}

fn classify(state: &NetworkState) -> TerminalClass {
    let t = state.topology();
    let per_edge_sent = (0..t.directed_edge_count())
        .map(|slot| {
            let (v, p) = t.slot_endpoints(slot);
            state.node(v).sent[p]
        })
        .collect();
    TerminalClass {
        leaders: state.leaders(),
        leader_declarations: state.metrics().leader_declarations,
        all_halted: state.all_halted(),
        total_pulses: state.total_sent(),
        per_edge_sent,
        deliveries_to_halted: state.metrics().deliveries_to_halted,
        in_flight_at_leader: state.metrics().in_flight_at_leader,
        election_entrants: state.election_entrants(),
    }
}

/// Depth-first search over every delivery order from `initial`, merging
/// identical configurations. A configuration is terminal once nothing is in
/// flight.
pub fn explore_from(initial: NetworkState, caps: ExploreCaps) -> Result<ExploreReport, SimError> {
    let layering: Option<Layering> = (initial.algorithm() != Algorithm::Stabilizing)
        .then(|| layer_decomposition(initial.topology()));
    let mut report = ExploreReport::default();
    let mut classes: BTreeMap<TerminalClass, usize> = BTreeMap::new();
    let mut visited = HashSet::new();
    visited.insert(initial.key());
    let mut stack = vec![initial];

    while let Some(state) = stack.pop() {
        let enabled = state.enabled_edges();
        if enabled.is_empty() {
            report.terminal_states += 1;
            *classes.entry(classify(&state)).or_default() += 1;
            continue;
        }
        for edge in enabled {
            let mut next = state.clone();
            let before = state.node(edge.to);
            let no_leader_yet = state.metrics().leader_declarations == 0;
            next.step(edge).expect("enabled edge has a pulse");
            report.transitions += 1;
            let after = next.node(edge.to);

            if let Some(layering) = &layering {
                if no_leader_yet && layering.parent_of(edge.from) != Some(edge.to) {
                    report.direction_violations += 1;
                }
                let rules = next.protocol().rules().expect("rule-based algorithm");
                if let Some(p) = after.port_star {
                    if after.sent[p] > rules.max_quota(after.degree()) {
                        report.quota_overruns += 1;
                    }
                }
            }
            if before.port_star.is_some() && after.port_star != before.port_star {
                report.port_star_rewrites += 1;
            }
            let undecided = if layering.is_some() {
                Output::Undecided
            } else {
                Output::NonLeader
            };
            let flipped = (before.halted && after != before)
                || (before.output != undecided && after.output != before.output);
            if flipped {
                report.output_flips += 1;
            }

            if visited.insert(next.key()) {
                if visited.len() > caps.max_states {
                    return Err(SimError::StateCapExceeded {
                        cap: caps.max_states,
                    });
                }
                stack.push(next);
            }
        }
    }
    report.states = visited.len();
    report.classes = classes.into_iter().collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::parse_edge_list;

    #[test]
    fn p3_even_has_one_class() {
        let r = explore_all_schedules(
            parse_edge_list("0 1\n1 2").unwrap(),
            Algorithm::EvenDiameter,
            None,
            ExploreCaps::default(),
        )
        .unwrap();
        assert!(r.confluent());
        let (class, _) = &r.classes[0];
        assert_eq!(class.leaders, vec![1]);
        assert_eq!(class.total_pulses, 4);
        assert!(class.all_halted);
        assert_eq!(r.violation_count(), 0);
    }

    #[test]
    fn caterpillar_general_is_quiescent_everywhere() {
        let r = explore_all_schedules(
            parse_edge_list("1 2\n2 3\n3 4\n2 0").unwrap(),
            Algorithm::GeneralTree,
            None,
            ExploreCaps::default(),
        )
        .unwrap();
        assert!(r.confluent());
        let (class, _) = &r.classes[0];
        assert_eq!(class.leaders, vec![2]);
        assert_eq!(class.total_pulses, 11);
        assert_eq!(class.deliveries_to_halted, 0);
        assert_eq!(class.in_flight_at_leader, Some(0));
        assert_eq!(r.violation_count(), 0);
    }

    #[test]
    fn p2_stabilizing_elects_smaller_id() {
        let r = explore_all_schedules(
            parse_edge_list("0 1").unwrap(),
            Algorithm::Stabilizing,
            Some(vec![3, 5]),
            ExploreCaps::default(),
        )
        .unwrap();
        for (class, _) in &r.classes {
            assert_eq!(class.leaders, vec![0]);
            assert_eq!(class.leader_declarations, 1);
            assert_eq!(class.total_pulses, 10);
        }
        assert_eq!(r.output_flips, 0);
    }

    #[test]
    fn p3_stabilizing_leader_depends_on_schedule() {
        let r = explore_all_schedules(
            parse_edge_list("0 1\n1 2").unwrap(),
            Algorithm::Stabilizing,
            Some(vec![1, 2, 3]),
            ExploreCaps::default(),
        )
        .unwrap();
        let mut winners: Vec<Vertex> = r
            .classes
            .iter()
            .flat_map(|(c, _)| c.leaders.clone())
            .collect();
        winners.sort();
        winners.dedup();
        assert_eq!(winners, vec![0, 1]);
        for (class, _) in &r.classes {
            assert_eq!(class.leaders.len(), 1);
            assert_eq!(class.leader_declarations, 1);
            assert!(class.total_pulses <= 8);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = explore_all_schedules(
            parse_edge_list("0 1\n0 2\n1 3\n1 4\n2 5\n2 6").unwrap(),
            Algorithm::EvenDiameter,
            None,
            ExploreCaps { max_states: 5 },
        )
        .unwrap_err();
        assert_eq!(err, SimError::StateCapExceeded { cap: 5 });
    }
}
