//! Pulse-level asynchronous network: per-edge pulse counters, schedulers
//! that pick which pulse arrives next, a run loop with traces, and an
//! exhaustive explorer over every delivery order.

mod explore;
mod network;
mod run;
mod scheduler;

pub use explore::{explore_all_schedules, explore_from, ExploreCaps, ExploreReport, TerminalClass};
pub use network::{Delivery, DirectedEdge, Metrics, NetworkState, PulseCounts, StateKey};
pub use run::{run, write_trace, Outcome, RunConfig, Status, TraceRecord};
pub use scheduler::{Scheduler, SchedulerPolicy};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::ProtocolError;
use crate::topology::Vertex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Rules from the diameter alone; the tree must have even diameter.
    EvenDiameter,
    /// Rules from the whole unlabeled tree; the tree must be asymmetric.
    GeneralTree,
    /// ID-based, stabilizing rather than terminating.
    Stabilizing,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::EvenDiameter,
        Algorithm::GeneralTree,
        Algorithm::Stabilizing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::EvenDiameter => "even",
            Algorithm::GeneralTree => "general",
            Algorithm::Stabilizing => "stabilizing",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" | "even-diameter" => Ok(Algorithm::EvenDiameter),
            "general" | "general-tree" => Ok(Algorithm::GeneralTree),
            "stabilizing" | "stab" => Ok(Algorithm::Stabilizing),
            other => Err(format!(
                "unknown algorithm `{other}` (expected even, general or stabilizing)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("tree is symmetric about edge {{{}, {}}}", witness.0, witness.1)]
    SymmetricTree { witness: (Vertex, Vertex) },
    #[error("diameter {diameter} is odd; the even-diameter algorithm does not apply")]
    OddDiameterForEvenAlgorithm { diameter: usize },
    #[error(transparent)]
    Protocol(ProtocolError),
    #[error("the stabilizing algorithm needs one ID per vertex")]
    MissingIds,
    #[error("IDs are only used by the stabilizing algorithm")]
    UnexpectedIds,
    #[error("expected {expected} IDs, got {got}")]
    IdCountMismatch { expected: usize, got: usize },
    #[error("vertex {vertex} has ID 0; IDs must be positive")]
    NonPositiveId { vertex: Vertex },
    #[error("ID {id} is used twice")]
    DuplicateIds { id: u32 },
    #[error("{} -> {} is not an edge", edge.from, edge.to)]
    NotAnEdge { edge: DirectedEdge },
    #[error("no pulse in flight on {} -> {}", edge.from, edge.to)]
    NoPulseInFlight { edge: DirectedEdge },
    #[error("state space exceeds the cap of {cap} states")]
    StateCapExceeded { cap: usize },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("bogus".parse::<Algorithm>().is_err());
    }
}
