use serde::Serialize;

use super::oracle_expected_leader;
use crate::protocol::{Action, Output};
use crate::simulator::{Algorithm, ExploreReport, Outcome, Status, TraceRecord};
use crate::topology::{enumerate_subtrees, layer_decomposition, Layering, TreeTopology, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub expected: String,
    pub observed: String,
}

impl Check {
    fn new(
        name: &'static str,
        expected: impl ToString,
        observed: impl ToString,
        passed: bool,
    ) -> Self {
        Self {
            name,
            passed,
            expected: expected.to_string(),
            observed: observed.to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Closed-form pulse total for a completed run. For the stabilizing
/// algorithm `entrants` are the two nodes that reached the final election.
pub fn expected_total(
    tree: &TreeTopology,
    algorithm: Algorithm,
    ids: Option<&[u32]>,
    entrants: &[Vertex],
) -> Option<u64> {
    let n = tree.len() as u64;
    match algorithm {
        Algorithm::EvenDiameter => {
            let layering = layer_decomposition(tree);
            let r = layering.radius() as u64;
            let up: u64 = tree
                .vertices()
                .filter(|&v| v != layering.root())
                .map(|v| r - layering.layer_of(v) as u64)
                .sum();
            Some(up + n - 1)
        }
        Algorithm::GeneralTree => {
            let layering = layer_decomposition(tree);
            let index = enumerate_subtrees(tree, &layering);
            let up: u64 = tree
                .vertices()
                .filter(|&v| v != layering.root())
                .map(|v| index.lambda_tau(v) as u64)
                .sum();
            Some(up + n - 1)
        }
        Algorithm::Stabilizing => match (n, entrants, ids) {
            (1, _, _) => Some(0),
            (_, &[s, t], Some(ids)) => Some(n + ids[s] as u64 + ids[t] as u64),
            _ => None,
        },
    }
}

/// Worst-case pulse count for any run of `algorithm` on `tree`.
pub fn pulse_bound(tree: &TreeTopology, algorithm: Algorithm, ids: Option<&[u32]>) -> u64 {
    let n = tree.len() as u64;
    match algorithm {
        Algorithm::EvenDiameter => {
            let r = tree.diameter().div_ceil(2) as u64;
            (n - 1) * (r + 1)
        }
        Algorithm::GeneralTree => (n - 1) * (n - 1) + (n - 1),
        Algorithm::Stabilizing if n == 1 => 0,
        Algorithm::Stabilizing => {
            let id_max = ids.and_then(|ids| ids.iter().max().copied()).unwrap_or(0) as u64;
            n + 2 * id_max - 1
        }
    }
}

/// Deliveries up to and including the Leader declaration that do not go
/// from a vertex to its parent.
pub fn direction_violations(trace: &[TraceRecord], layering: &Layering) -> usize {
    let mut bad = 0;
    for record in trace {
        let [from, to] = record.edge;
        if layering.parent_of(from) != Some(to) {
            bad += 1;
        }
        if record.actions.contains(&Action::Declare(Output::Leader)) {
            break;
        }
    }
    bad
}

/// Checks a finished run against the oracles and closed forms that apply
/// to its algorithm. Failures are report rows, never errors.
pub fn verify_outcome(outcome: &Outcome, tree: &TreeTopology) -> VerifyReport {
    let algorithm = outcome.algorithm;
    let state = &outcome.final_state;
    let ids = state.ids();
    let terminating = algorithm != Algorithm::Stabilizing;
    let mut checks = Vec::new();

    let want = if terminating {
        Status::Terminated
    } else {
        Status::Stabilized
    };
    checks.push(Check::new(
        "status",
        want.as_str(),
        outcome.status.as_str(),
        outcome.status == want,
    ));

    let declarations = outcome.metrics.leader_declarations;
    checks.push(Check::new(
        "unique_leader",
        "1 leader, 1 declaration",
        format!(
            "{} leaders, {declarations} declarations",
            outcome.leaders.len()
        ),
        outcome.leaders.len() == 1 && declarations == 1,
    ));

    if terminating {
        let (expected, ok) = match oracle_expected_leader(tree) {
            Ok(l) => (l.to_string(), outcome.leader == Some(l)),
            Err(e) => (e.to_string(), false),
        };
        let observed = outcome.leader.map_or("none".to_string(), |l| l.to_string());
        checks.push(Check::new("oracle_leader", expected, observed, ok));
    }

    let total = outcome.total_pulses();
    let entrants = state.election_entrants();
    match expected_total(tree, algorithm, ids, &entrants) {
        Some(e) => checks.push(Check::new("exact_total", e, total, e == total)),
        None => checks.push(Check::new(
            "exact_total",
            "two election entrants",
            format!("{entrants:?}"),
            false,
        )),
    }

    let bound = pulse_bound(tree, algorithm, ids);
    checks.push(Check::new(
        "bound",
        format!("<= {bound}"),
        total,
        total <= bound,
    ));

    let in_flight = state.in_flight_total();
    checks.push(Check::new(
        "conservation",
        total,
        format!(
            "{} delivered + {in_flight} in flight",
            outcome.metrics.deliveries
        ),
        total == outcome.metrics.deliveries + in_flight,
    ));

    if algorithm == Algorithm::GeneralTree {
        let dth = outcome.metrics.deliveries_to_halted;
        let at_leader = outcome.metrics.in_flight_at_leader;
        checks.push(Check::new(
            "quiescence",
            "0 to halted, 0 in flight at declaration",
            format!("{dth} to halted, {at_leader:?} in flight at declaration"),
            dth == 0 && at_leader == Some(0),
        ));
    }

    if terminating && !outcome.trace.is_empty() {
        let bad = direction_violations(&outcome.trace, &layer_decomposition(tree));
        checks.push(Check::new("direction", 0, bad, bad == 0));
    }

    VerifyReport { checks }
}

/// Checks an exhaustive exploration: terminating algorithms must be
/// confluent on the oracle's leader with the closed-form total and no
/// safety violations; the stabilizing algorithm must elect exactly once in
/// every final class, within its bound.
pub fn verify_exploration(
    report: &ExploreReport,
    tree: &TreeTopology,
    algorithm: Algorithm,
    ids: Option<&[u32]>,
) -> VerifyReport {
    let mut checks = Vec::new();
    checks.push(Check::new(
        "safety",
        0,
        report.violation_count(),
        report.violation_count() == 0,
    ));
    let bound = pulse_bound(tree, algorithm, ids);
    if algorithm == Algorithm::Stabilizing {
        let bad_leader = report
            .classes
            .iter()
            .filter(|(c, _)| c.leaders.len() != 1 || c.leader_declarations != 1)
            .count();
        checks.push(Check::new("unique_leader", 0, bad_leader, bad_leader == 0));
        let bad_total = report
            .classes
            .iter()
            .filter(|(c, _)| {
                expected_total(tree, algorithm, ids, &c.election_entrants) != Some(c.total_pulses)
            })
            .count();
        checks.push(Check::new("exact_total", 0, bad_total, bad_total == 0));
        let worst = report
            .classes
            .iter()
            .map(|(c, _)| c.total_pulses)
            .max()
            .unwrap_or(0);
        checks.push(Check::new(
            "bound",
            format!("<= {bound}"),
            worst,
            worst <= bound,
        ));
        return VerifyReport { checks };
    }

    checks.push(Check::new(
        "confluent",
        1,
        report.classes.len(),
        report.confluent(),
    ));
    let Some((class, _)) = report.classes.first() else {
        return VerifyReport { checks };
    };
    checks.push(Check::new(
        "all_halted",
        true,
        class.all_halted,
        class.all_halted,
    ));
    let (expected, ok) = match oracle_expected_leader(tree) {
        Ok(l) => (format!("[{l}]"), class.leaders == [l]),
        Err(e) => (e.to_string(), false),
    };
    checks.push(Check::new(
        "oracle_leader",
        expected,
        format!("{:?}", class.leaders),
        ok,
    ));
    let want = expected_total(tree, algorithm, ids, &[]);
    checks.push(Check::new(
        "exact_total",
        want.map_or("n/a".into(), |w| w.to_string()),
        class.total_pulses,
        want == Some(class.total_pulses),
    ));
    checks.push(Check::new(
        "bound",
        format!("<= {bound}"),
        class.total_pulses,
        class.total_pulses <= bound,
    ));
    if algorithm == Algorithm::GeneralTree {
        let quiet = report
            .classes
            .iter()
            .all(|(c, _)| c.deliveries_to_halted == 0 && c.in_flight_at_leader == Some(0));
        checks.push(Check::new("quiescence", true, quiet, quiet));
    }
    VerifyReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{run, NetworkState, RunConfig, Scheduler};
    use crate::topology::parse_edge_list;

    fn outcome(edges: &str, alg: Algorithm, ids: Option<Vec<u32>>) -> (Outcome, TreeTopology) {
        let t = parse_edge_list(edges).unwrap();
        let s = NetworkState::new(t.clone(), alg, ids).unwrap();
        let o = run(
            s,
            &mut Scheduler::seeded(11),
            RunConfig {
                budget: 10_000,
                record_trace: true,
            },
        );
        (o, t)
    }

    #[test]
    fn binary_even_passes() {
        let (o, t) = outcome(
            "0 1\n0 2\n1 3\n1 4\n2 5\n2 6",
            Algorithm::EvenDiameter,
            None,
        );
        assert_eq!(o.total_pulses(), 16);
        let r = verify_outcome(&o, &t);
        assert!(r.passed(), "{r:?}");
        assert!(r.get("direction").is_some());
    }

    #[test]
    fn tampered_total_fails_exact_check() {
        let (mut o, t) = outcome("1 2\n2 3\n3 4\n2 0", Algorithm::GeneralTree, None);
        assert!(verify_outcome(&o, &t).passed());
        o.metrics.pulses_by_category.upstream += 1;
        let r = verify_outcome(&o, &t);
        let exact = r.get("exact_total").unwrap();
        assert!(!exact.passed);
        assert_eq!(exact.expected, "11");
        assert_eq!(exact.observed, "12");
    }

    #[test]
    fn stabilizing_pair_passes_with_bound() {
        let (o, t) = outcome("0 1", Algorithm::Stabilizing, Some(vec![3, 5]));
        let r = verify_outcome(&o, &t);
        assert!(r.passed(), "{r:?}");
        assert_eq!(pulse_bound(&t, Algorithm::Stabilizing, Some(&[3, 5])), 11);
        assert_eq!(r.get("exact_total").unwrap().observed, "10");
    }

    #[test]
    fn exploration_of_p3_passes() {
        use crate::simulator::{explore_all_schedules, ExploreCaps};
        let t = parse_edge_list("0 1\n1 2").unwrap();
        for (alg, ids) in [
            (Algorithm::EvenDiameter, None),
            (Algorithm::Stabilizing, Some(vec![1, 2, 3])),
        ] {
            let r =
                explore_all_schedules(t.clone(), alg, ids.clone(), ExploreCaps::default()).unwrap();
            let v = verify_exploration(&r, &t, alg, ids.as_deref());
            assert!(v.passed(), "{alg}: {v:?}");
        }
    }

    #[test]
    fn bounds_for_small_trees() {
        let p3 = parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(pulse_bound(&p3, Algorithm::EvenDiameter, None), 4);
        assert_eq!(
            expected_total(&p3, Algorithm::EvenDiameter, None, &[]),
            Some(4)
        );
    }
}
