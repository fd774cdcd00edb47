use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::{Algorithm, DirectedEdge, Metrics, NetworkState, Scheduler};
use crate::protocol::{Action, NodeState, Output};
use crate::topology::Vertex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Status {
    /// Every node halted, nothing in flight, exactly one leader.
    Terminated,
    /// A leader exists and no pending pulse can change any node.
    Stabilized,
    BudgetExhausted,
    /// The run ended cleanly except that a halted node was sent a pulse.
    QuiescenceViolated {
        node: Vertex,
        step: u64,
    },
    /// Nothing in flight but the run did not reach a valid final state.
    Deadlocked,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Terminated => "terminated",
            Status::Stabilized => "stabilized",
            Status::BudgetExhausted => "budget_exhausted",
            Status::QuiescenceViolated { .. } => "quiescence_violated",
            Status::Deadlocked => "deadlocked",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    /// Maximum number of deliveries.
    pub budget: u64,
    pub record_trace: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            budget: 1_000_000,
            record_trace: false,
        }
    }
}

/// One delivery as written to a trace file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u64,
    pub edge: [Vertex; 2],
    pub receiver_state_digest: String,
    pub actions: Vec<Action>,
    pub in_flight_total: u64,
}

fn digest(node: &NodeState) -> String {
    let bytes = serde_json::to_vec(node).expect("node state serializes");
    let hash = Sha256::digest(&bytes);
    hash[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub algorithm: Algorithm,
    pub status: Status,
    /// The unique vertex whose output is Leader, if there is exactly one.
    pub leader: Option<Vertex>,
    pub leaders: Vec<Vertex>,
    pub outputs: Vec<Output>,
    pub metrics: Metrics,
    pub seed: Option<u64>,
    pub trace: Vec<TraceRecord>,
    pub final_state: NetworkState,
}

impl Outcome {
    pub fn total_pulses(&self) -> u64 {
        self.metrics.pulses_by_category.total()
    }

    /// Pulses sent from `from` towards `to` over the whole run.
    pub fn sent_on(&self, edge: DirectedEdge) -> u32 {
        let t = self.final_state.topology();
        t.port_towards(edge.from, edge.to)
            .map_or(0, |p| self.final_state.node(edge.from).sent[p])
    }

    pub fn to_json(&self) -> Value {
        json!({
            "status": self.status.as_str(),
            "leader": self.leader,
            "outputs": self.outputs,
            "pulses_by_category": self.metrics.pulses_by_category,
            "deliveries": self.metrics.deliveries,
            "deliveries_to_halted": self.metrics.deliveries_to_halted,
            "seed": self.seed,
        })
    }
}

/// Writes one JSON object per line.
pub fn write_trace<W: Write>(mut out: W, trace: &[TraceRecord]) -> io::Result<()> {
    for record in trace {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn final_status(state: &NetworkState) -> Status {
    let leaders = state.leaders().len();
    if state.algorithm() == Algorithm::Stabilizing {
        return if leaders == 1 {
            Status::Stabilized
        } else {
            Status::Deadlocked
        };
    }
    if !state.all_halted() || leaders != 1 {
        return Status::Deadlocked;
    }
    match state.metrics().first_halted_delivery {
        Some((node, step)) if state.algorithm() == Algorithm::GeneralTree => {
            Status::QuiescenceViolated { node, step }
        }
        _ => Status::Terminated,
    }
}

/// Delivers pulses chosen by `scheduler` until the run terminates,
/// stabilizes, deadlocks or exhausts the budget.
pub fn run(mut state: NetworkState, scheduler: &mut Scheduler, config: RunConfig) -> Outcome {
    let mut trace = Vec::new();
    let mut steps = 0u64;
    let status = loop {
        if state.algorithm() == Algorithm::Stabilizing && state.is_frozen() {
            break Status::Stabilized;
        }
        let Some(edge) = scheduler.pick(&state) else {
            break final_status(&state);
        };
        if steps >= config.budget {
            break Status::BudgetExhausted;
        }
        let delivery = state.step(edge).expect("scheduler picks a loaded channel");
        steps += 1;
        if config.record_trace {
            trace.push(TraceRecord {
                step: delivery.step,
                edge: [edge.from, edge.to],
                receiver_state_digest: digest(state.node(edge.to)),
                actions: delivery.actions,
                in_flight_total: state.in_flight_total(),
            });
        }
    };
    let leaders = state.leaders();
    Outcome {
        algorithm: state.algorithm(),
        status,
        leader: (leaders.len() == 1).then(|| leaders[0]),
        leaders,
        outputs: state.outputs(),
        metrics: state.metrics().clone(),
        seed: scheduler.seed(),
        trace,
        final_state: state,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::parse_edge_list;

    fn go(edges: &str, alg: Algorithm, ids: Option<Vec<u32>>, seed: u64) -> Outcome {
        let s = NetworkState::new(parse_edge_list(edges).unwrap(), alg, ids).unwrap();
        run(
            s,
            &mut Scheduler::seeded(seed),
            RunConfig {
                budget: 10_000,
                record_trace: true,
            },
        )
    }

    #[test]
    fn p3_even_terminates_at_center() {
        for seed in 0..20 {
            let o = go("0 1\n1 2", Algorithm::EvenDiameter, None, seed);
            assert_eq!(o.status, Status::Terminated);
            assert_eq!(o.leader, Some(1));
            assert_eq!(o.total_pulses(), 4);
        }
    }

    #[test]
    fn caterpillar_general_terminates_quietly() {
        for seed in 0..50 {
            let o = go("1 2\n2 3\n3 4\n2 0", Algorithm::GeneralTree, None, seed);
            assert_eq!(o.status, Status::Terminated);
            assert_eq!(o.leader, Some(2));
            assert_eq!(o.total_pulses(), 11);
            assert_eq!(o.metrics.deliveries_to_halted, 0);
        }
    }

    #[test]
    fn binary_radius_two_even() {
        for seed in 0..20 {
            let o = go(
                "0 1\n0 2\n1 3\n1 4\n2 5\n2 6",
                Algorithm::EvenDiameter,
                None,
                seed,
            );
            assert_eq!(o.status, Status::Terminated);
            assert_eq!(o.leader, Some(0));
            assert_eq!(o.total_pulses(), 16);
        }
    }

    #[test]
    fn p2_stabilizing() {
        for seed in 0..20 {
            let o = go("0 1", Algorithm::Stabilizing, Some(vec![3, 5]), seed);
            assert_eq!(o.status, Status::Stabilized);
            assert_eq!(o.total_pulses(), 10);
            assert_eq!(o.leader, Some(0));
        }
    }

    #[test]
    fn single_vertex_stabilizing() {
        let o = go("", Algorithm::Stabilizing, Some(vec![1]), 0);
        assert_eq!(o.status, Status::Stabilized);
        assert_eq!(o.leader, Some(0));
        assert_eq!(o.total_pulses(), 0);
    }

    #[test]
    fn budget_stops_the_run() {
        let s = NetworkState::new(
            parse_edge_list("0 1\n1 2").unwrap(),
            Algorithm::EvenDiameter,
            None,
        )
        .unwrap();
        let o = run(
            s,
            &mut Scheduler::round_robin(),
            RunConfig {
                budget: 1,
                record_trace: false,
            },
        );
        assert_eq!(o.status, Status::BudgetExhausted);
        assert_eq!(o.metrics.deliveries, 1);
    }

    #[test]
    fn trace_and_json_shape() {
        let o = go("0 1\n1 2", Algorithm::EvenDiameter, None, 3);
        assert_eq!(o.trace.len() as u64, o.metrics.deliveries);
        assert_eq!(o.trace.last().unwrap().in_flight_total, 0);
        assert_eq!(o.trace[0].receiver_state_digest.len(), 16);
        let mut buf = Vec::new();
        write_trace(&mut buf, &o.trace).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first: TraceRecord = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first, o.trace[0]);

        let v = o.to_json();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "deliveries",
                "deliveries_to_halted",
                "leader",
                "outputs",
                "pulses_by_category",
                "seed",
                "status"
            ]
        );
        assert_eq!(v["status"], "terminated");
        assert_eq!(v["seed"], 3);
    }
}
