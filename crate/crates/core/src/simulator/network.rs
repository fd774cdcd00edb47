use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Algorithm, SimError};
use crate::protocol::{
    compile_even_rules, compile_general_rules, Action, ElectionPhase, NodeState, Output, Protocol,
    ProtocolError, PulseKind,
};
use crate::topology::{TreeTopology, Vertex};

/// A pulse channel `from -> to` along a tree edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirectedEdge {
    pub from: Vertex,
    pub to: Vertex,
}

impl DirectedEdge {
    pub fn new(from: Vertex, to: Vertex) -> Self {
        Self { from, to }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PulseCounts {
    pub upstream: u64,
    pub leader_downstream: u64,
    pub stabilizing_init: u64,
    pub election: u64,
}

impl PulseCounts {
    pub fn total(&self) -> u64 {
        self.upstream + self.leader_downstream + self.stabilizing_init + self.election
    }

    fn add(&mut self, kind: PulseKind, count: u64) {
        match kind {
            PulseKind::Upstream => self.upstream += count,
            PulseKind::LeaderDownstream => self.leader_downstream += count,
            PulseKind::StabilizingInit => self.stabilizing_init += count,
            PulseKind::Election => self.election += count,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub pulses_by_category: PulseCounts,
    pub deliveries: u64,
    pub deliveries_to_halted: u64,
    /// First pulse absorbed by a halted node, as (receiver, step).
    pub first_halted_delivery: Option<(Vertex, u64)>,
    pub leader_declarations: u32,
    /// Step of the first Leader declaration; 0 means during start-up.
    pub leader_declared_at: Option<u64>,
    /// Pulses in transit when the first Leader declaration happened, not
    /// counting the leader's own broadcast.
    pub in_flight_at_leader: Option<u64>,
}

/// One executed delivery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    pub step: u64,
    pub edge: DirectedEdge,
    pub receiver_was_halted: bool,
    pub actions: Vec<Action>,
}

/// Everything the model checker needs to tell two configurations apart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateKey {
    nodes: Vec<NodeState>,
    in_flight: Vec<u32>,
    deliveries_to_halted: u64,
    leader_declarations: u32,
    in_flight_at_leader: Option<u64>,
}

/// All node automata plus one pulse counter per directed edge. Pulses carry
/// nothing but their arrival port, so a counter describes a channel fully.
#[derive(Debug, Clone)]
pub struct NetworkState {
    topology: Arc<TreeTopology>,
    protocol: Arc<Protocol>,
    algorithm: Algorithm,
    ids: Option<Arc<Vec<u32>>>,
    nodes: Vec<NodeState>,
    in_flight: Vec<u32>,
    metrics: Metrics,
}

impl NetworkState {
    /// Compiles the algorithm's rules for `topology`, initializes every node
    /// and puts the start-up pulses in flight.
    pub fn new(
        topology: TreeTopology,
        algorithm: Algorithm,
        ids: Option<Vec<u32>>,
    ) -> Result<Self, SimError> {
        let protocol = match algorithm {
            Algorithm::EvenDiameter => {
                let diameter = topology.diameter();
                Protocol::Rules(
                    compile_even_rules(diameter)
                        .map_err(|_| SimError::OddDiameterForEvenAlgorithm { diameter })?,
                )
            }
            Algorithm::GeneralTree => {
                Protocol::Rules(compile_general_rules(&topology).map_err(|e| match e {
                    ProtocolError::SymmetricTree { witness } => SimError::SymmetricTree { witness },
                    other => SimError::Protocol(other),
                })?)
            }
            Algorithm::Stabilizing => Protocol::Stabilizing,
        };
        Self::with_protocol(topology, protocol, algorithm, ids)
    }

    /// Like [`new`](Self::new) but with a caller-supplied protocol, e.g. a
    /// rule set switched to exact matching.
    pub fn with_protocol(
        topology: TreeTopology,
        protocol: Protocol,
        algorithm: Algorithm,
        ids: Option<Vec<u32>>,
    ) -> Result<Self, SimError> {
        let n = topology.len();
        let ids = match (algorithm, ids) {
            (Algorithm::Stabilizing, None) => return Err(SimError::MissingIds),
            (Algorithm::Stabilizing, Some(ids)) => {
                if ids.len() != n {
                    return Err(SimError::IdCountMismatch {
                        expected: n,
                        got: ids.len(),
                    });
                }
                if let Some(v) = ids.iter().position(|&id| id == 0) {
                    return Err(SimError::NonPositiveId { vertex: v });
                }
                let mut sorted = ids.clone();
                sorted.sort_unstable();
                if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                    return Err(SimError::DuplicateIds { id: w[0] });
                }
                Some(Arc::new(ids))
            }
            (_, Some(_)) => return Err(SimError::UnexpectedIds),
            (_, None) => None,
        };

        let mut state = Self {
            in_flight: vec![0; topology.directed_edge_count()],
            nodes: Vec::with_capacity(n),
            topology: Arc::new(topology),
            protocol: Arc::new(protocol),
            algorithm,
            ids,
            metrics: Metrics::default(),
        };
        for v in 0..n {
            let id = state.ids.as_ref().map(|ids| ids[v]);
            let (node, actions) = state.protocol.init(state.topology.degree(v), id);
            state.nodes.push(node);
            state.apply(v, &actions);
        }
        Ok(state)
    }

    fn apply(&mut self, v: Vertex, actions: &[Action]) {
        let before = self.in_flight_total();
        for action in actions {
            match *action {
                Action::Send { port, count, kind } => {
                    let slot = self.topology.slot(v, port);
                    self.in_flight[slot] += count;
                    self.metrics.pulses_by_category.add(kind, count as u64);
                }
                Action::Declare(Output::Leader) => {
                    self.metrics.leader_declarations += 1;
                    if self.metrics.leader_declared_at.is_none() {
                        self.metrics.leader_declared_at = Some(self.metrics.deliveries);
                        self.metrics.in_flight_at_leader = Some(before);
                    }
                }
                Action::Declare(_) | Action::Halt => {}
            }
        }
    }

    /// Delivers one pulse along `edge`. A halted receiver absorbs it
    /// unchanged and the delivery is counted against quiescence.
    pub fn step(&mut self, edge: DirectedEdge) -> Result<Delivery, SimError> {
        let port = self
            .topology
            .port_towards(edge.from, edge.to)
            .ok_or(SimError::NotAnEdge { edge })?;
        let slot = self.topology.slot(edge.from, port);
        if self.in_flight[slot] == 0 {
            return Err(SimError::NoPulseInFlight { edge });
        }
        self.in_flight[slot] -= 1;
        self.metrics.deliveries += 1;
        let step = self.metrics.deliveries;
        let receiver_port = self.topology.back_port(edge.from, port);
        let receiver = &mut self.nodes[edge.to];
        if receiver.halted {
            self.metrics.deliveries_to_halted += 1;
            self.metrics
                .first_halted_delivery
                .get_or_insert((edge.to, step));
            return Ok(Delivery {
                step,
                edge,
                receiver_was_halted: true,
                actions: Vec::new(),
            });
        }
        let actions = self.protocol.deliver(receiver, receiver_port);
        self.apply(edge.to, &actions);
        Ok(Delivery {
            step,
            edge,
            receiver_was_halted: false,
            actions,
        })
    }

    pub fn topology(&self) -> &TreeTopology {
        &self.topology
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn ids(&self) -> Option<&[u32]> {
        self.ids.as_deref().map(Vec::as_slice)
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn node(&self, v: Vertex) -> &NodeState {
        &self.nodes[v]
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn in_flight(&self, edge: DirectedEdge) -> u32 {
        self.topology
            .port_towards(edge.from, edge.to)
            .map_or(0, |p| self.in_flight[self.topology.slot(edge.from, p)])
    }

    pub fn in_flight_total(&self) -> u64 {
        self.in_flight.iter().map(|&c| c as u64).sum()
    }

    pub fn total_sent(&self) -> u64 {
        self.metrics.pulses_by_category.total()
    }

    /// Channels holding at least one pulse, in slot order.
    pub fn enabled_edges(&self) -> Vec<DirectedEdge> {
        self.in_flight
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(slot, _)| self.slot_edge(slot))
            .collect()
    }

    pub(crate) fn slot_edge(&self, slot: usize) -> DirectedEdge {
        let (v, p) = self.topology.slot_endpoints(slot);
        DirectedEdge::new(v, self.topology.neighbor(v, p))
    }

    pub(crate) fn slot_count(&self) -> usize {
        self.in_flight.len()
    }

    pub(crate) fn slot_load(&self, slot: usize) -> u32 {
        self.in_flight[slot]
    }

    pub fn all_halted(&self) -> bool {
        self.nodes.iter().all(|n| n.halted)
    }

    pub fn outputs(&self) -> Vec<Output> {
        self.nodes.iter().map(|n| n.output).collect()
    }

    pub fn leaders(&self) -> Vec<Vertex> {
        (0..self.nodes.len())
            .filter(|&v| self.nodes[v].output == Output::Leader)
            .collect()
    }

    /// Stabilizing nodes that reached the edge-election phase.
    pub fn election_entrants(&self) -> Vec<Vertex> {
        (0..self.nodes.len())
            .filter(|&v| {
                self.nodes[v]
                    .stabilizing
                    .as_ref()
                    .is_some_and(|s| matches!(s.phase, ElectionPhase::Electing { .. }))
            })
            .collect()
    }

    /// True once a leader exists and delivering every pulse still in
    /// transit would make no node act: each live receiver, fed all of its
    /// pending pulses, emits nothing.
    pub fn is_frozen(&self) -> bool {
        if self.metrics.leader_declarations == 0 {
            return false;
        }
        let mut pending: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for slot in 0..self.in_flight.len() {
            let count = self.in_flight[slot];
            if count == 0 {
                continue;
            }
            let (v, p) = self.topology.slot_endpoints(slot);
            let to = self.topology.neighbor(v, p);
            let port = self.topology.back_port(v, p);
            pending[to].extend(std::iter::repeat_n(port, count as usize));
        }
        pending.iter().enumerate().all(|(v, ports)| {
            if ports.is_empty() || self.nodes[v].halted {
                return true;
            }
            let mut probe = self.nodes[v].clone();
            ports
                .iter()
                .all(|&port| self.protocol.deliver(&mut probe, port).is_empty())
        })
    }

    pub fn key(&self) -> StateKey {
        StateKey {
            nodes: self.nodes.clone(),
            in_flight: self.in_flight.clone(),
            deliveries_to_halted: self.metrics.deliveries_to_halted,
            leader_declarations: self.metrics.leader_declarations,
            in_flight_at_leader: self.metrics.in_flight_at_leader,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::parse_edge_list;

    fn p3() -> TreeTopology {
        parse_edge_list("0 1\n1 2").unwrap()
    }

    fn caterpillar() -> TreeTopology {
        parse_edge_list("1 2\n2 3\n3 4\n2 0").unwrap()
    }

    fn conserved(s: &NetworkState) -> bool {
        s.total_sent() == s.metrics().deliveries + s.in_flight_total()
    }

    #[test]
    fn even_start_up_pulses() {
        let s = NetworkState::new(p3(), Algorithm::EvenDiameter, None).unwrap();
        assert_eq!(s.in_flight(DirectedEdge::new(0, 1)), 1);
        assert_eq!(s.in_flight(DirectedEdge::new(2, 1)), 1);
        assert_eq!(s.in_flight_total(), 2);
    }

    #[test]
    fn construction_errors() {
        let p4 = parse_edge_list("0 1\n1 2\n2 3").unwrap();
        assert_eq!(
            NetworkState::new(p4.clone(), Algorithm::GeneralTree, None).unwrap_err(),
            SimError::SymmetricTree { witness: (1, 2) }
        );
        assert_eq!(
            NetworkState::new(p4, Algorithm::EvenDiameter, None).unwrap_err(),
            SimError::OddDiameterForEvenAlgorithm { diameter: 3 }
        );
        assert_eq!(
            NetworkState::new(p3(), Algorithm::Stabilizing, None).unwrap_err(),
            SimError::MissingIds
        );
        assert_eq!(
            NetworkState::new(p3(), Algorithm::Stabilizing, Some(vec![2, 4, 2])).unwrap_err(),
            SimError::DuplicateIds { id: 2 }
        );
        assert_eq!(
            NetworkState::new(p3(), Algorithm::EvenDiameter, Some(vec![1, 2, 3])).unwrap_err(),
            SimError::UnexpectedIds
        );
    }

    #[test]
    fn stabilizing_start_up_pulses() {
        let s = NetworkState::new(p3(), Algorithm::Stabilizing, Some(vec![7, 1, 9])).unwrap();
        assert_eq!(s.in_flight(DirectedEdge::new(0, 1)), 1);
        assert_eq!(s.in_flight(DirectedEdge::new(2, 1)), 1);
        assert_eq!(s.in_flight(DirectedEdge::new(1, 0)), 0);
    }

    #[test]
    fn empty_channel_is_an_error() {
        let mut s = NetworkState::new(p3(), Algorithm::EvenDiameter, None).unwrap();
        assert_eq!(
            s.step(DirectedEdge::new(1, 0)).unwrap_err(),
            SimError::NoPulseInFlight {
                edge: DirectedEdge::new(1, 0)
            }
        );
        assert!(matches!(
            s.step(DirectedEdge::new(0, 2)),
            Err(SimError::NotAnEdge { .. })
        ));
    }

    #[test]
    fn conservation_holds_across_steps() {
        let mut s = NetworkState::new(caterpillar(), Algorithm::GeneralTree, None).unwrap();
        assert!(conserved(&s));
        while let Some(&e) = s.enabled_edges().first() {
            s.step(e).unwrap();
            assert!(conserved(&s));
        }
        assert!(s.all_halted());
        assert_eq!(s.total_sent(), 11);
    }

    #[test]
    fn caterpillar_leader_broadcast_step() {
        let mut s = NetworkState::new(caterpillar(), Algorithm::GeneralTree, None).unwrap();
        for _ in 0..2 {
            s.step(DirectedEdge::new(1, 2)).unwrap();
            s.step(DirectedEdge::new(0, 2)).unwrap();
            s.step(DirectedEdge::new(4, 3)).unwrap();
        }
        assert_eq!(s.in_flight(DirectedEdge::new(3, 2)), 1);
        let before = s.in_flight_total();
        assert_eq!(before, 1);
        let d = s.step(DirectedEdge::new(3, 2)).unwrap();
        assert_eq!(s.in_flight_total(), 3);
        assert!(d.actions.contains(&Action::Declare(Output::Leader)));
        assert_eq!(s.metrics().in_flight_at_leader, Some(0));
    }

    #[test]
    fn halted_receiver_absorbs_pulse() {
        // Star with three leaves and one extra leaf two hops out: D = 3 is odd,
        // so use a radius-2 spider where the center fires before a slow leaf.
        let t = parse_edge_list("0 1\n1 2\n0 3\n3 4\n0 5").unwrap();
        let mut s = NetworkState::new(t, Algorithm::EvenDiameter, None).unwrap();
        // leaf 5 sits in V_0 directly under the center and sends r = 2 pulses;
        // the center needs only one of them.
        let script = [(2, 1), (2, 1), (1, 0), (4, 3), (4, 3), (3, 0), (5, 0)];
        for (a, b) in script {
            s.step(DirectedEdge::new(a, b)).unwrap();
        }
        assert_eq!(s.node(0).output, Output::Leader);
        let frozen = s.node(0).clone();
        s.step(DirectedEdge::new(5, 0)).unwrap();
        assert_eq!(s.node(0), &frozen);
        assert_eq!(s.metrics().deliveries_to_halted, 1);
        assert!(conserved(&s));
    }
}
