//! Node automata. Rule sets are compiled from the advice (the diameter, or
//! the full unlabeled topology) and then interpreted by every node against
//! its per-port pulse counters.

mod matching;
mod node;
mod rules;

pub use matching::{match_all_ports, match_trigger, MatchMode};
pub use node::{
    Action, ElectionPhase, NodeState, Output, PulseKind, StabilizingEvent, StabilizingState,
};
pub use rules::{
    compile_even_rules, compile_general_rules, LeaderRule, LeaderVariant, RuleSet, RuleSetKind,
    Trigger, UpstreamRule,
};

use thiserror::Error;

use crate::topology::{Port, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("diameter {diameter} is odd; the diameter-only rules need an even diameter")]
    OddDiameter { diameter: usize },
    #[error("tree is symmetric about edge {{{}, {}}}; no terminating election exists", witness.0, witness.1)]
    SymmetricTree { witness: (Vertex, Vertex) },
    #[error(
        "upstream rules from subtrees {first} and {second} are ordered by trigger but not by quota"
    )]
    IllDefinedRules { first: usize, second: usize },
}

/// What every node runs: a compiled rule set, or the ID-based stabilizing
/// automaton.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Protocol {
    Rules(RuleSet),
    Stabilizing,
}

impl Protocol {
    /// Initial state and start-up actions of a node with `degree` ports.
    /// `id` is required by the stabilizing automaton and ignored otherwise.
    pub fn init(&self, degree: usize, id: Option<u32>) -> (NodeState, Vec<Action>) {
        match self {
            Protocol::Rules(rules) => NodeState::init(degree, rules),
            Protocol::Stabilizing => {
                NodeState::init_stabilizing(degree, id.expect("stabilizing nodes carry an ID"))
            }
        }
    }

    pub fn deliver(&self, state: &mut NodeState, port: Port) -> Vec<Action> {
        match self {
            Protocol::Rules(rules) => state.on_deliver(rules, port),
            Protocol::Stabilizing => state.stabilizing_step(StabilizingEvent::Delivered(port)),
        }
    }

    pub fn rules(&self) -> Option<&RuleSet> {
        match self {
            Protocol::Rules(r) => Some(r),
            Protocol::Stabilizing => None,
        }
    }
}
