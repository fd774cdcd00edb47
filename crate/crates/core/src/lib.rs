//! Leader election on trees where nodes exchange content-free pulses.
//!
//! ```
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! use pulseforge::harness::verify_outcome;
//! use pulseforge::simulator::{run, Algorithm, NetworkState, RunConfig, Scheduler};
//! use pulseforge::topology::parse_edge_list;
//!
//! let tree = parse_edge_list("1 2\n2 3\n3 4\n2 0")?;
//! let state = NetworkState::new(tree.clone(), Algorithm::GeneralTree, None)?;
//! let outcome = run(state, &mut Scheduler::seeded(7), RunConfig::default());
//! assert_eq!(outcome.leader, Some(2));
//! assert_eq!(outcome.total_pulses(), 11);
//! assert!(verify_outcome(&outcome, &tree).passed());
//! # Ok(())
//! # }
//! ```

pub mod harness;
pub mod protocol;
pub mod simulator;
pub mod topology;
