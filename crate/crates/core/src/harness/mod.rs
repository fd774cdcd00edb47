//! Tree generators, ground-truth oracles, outcome verification and batch
//! experiments.

mod generators;
mod oracle;
mod sweep;
mod verify;

pub use generators::{generate, GeneratorSpec};
pub use oracle::{centers, oracle_expected_leader};
pub use sweep::{
    seeded_ids, sweep, ExperimentReport, Family, SweepConfig, SweepRow, CSV_HEADER_COMMENT,
};
pub use verify::{
    direction_violations, expected_total, pulse_bound, verify_exploration, verify_outcome, Check,
    VerifyReport,
};

use thiserror::Error;

use crate::simulator::SimError;
use crate::topology::{TopologyError, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("invalid generator: {0}")]
    InvalidSpec(String),
    #[error("no asymmetric tree on {n} vertices after {retries} retries")]
    RetriesExhausted { n: usize, retries: u32 },
    #[error("tree is symmetric about edge {{{}, {}}}; no leader is determined", witness.0, witness.1)]
    SymmetricTree { witness: (Vertex, Vertex) },
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Simulation(#[from] SimError),
}
