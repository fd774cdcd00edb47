use std::fmt;

use serde::Serialize;

use super::matching::MatchMode;
use super::ProtocolError;
use crate::topology::{enumerate_subtrees, is_edge_symmetric, layer_decomposition, TreeTopology};

/// Condition on the `d - 1` non-remaining ports.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    /// Every one of the other ports has at least this many pulses, for any `d`.
    Uniform(u32),
    /// Per-port requirements, sorted descending; length `d - 1`.
    Counts(Vec<u32>),
}

/// "When `d - 1` ports satisfy the trigger and the remaining port is silent,
/// fix the remaining port as Port* and top up sends through it to `quota`."
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct UpstreamRule {
    /// Port count the rule applies to; `None` means every degree.
    pub degree: Option<usize>,
    pub trigger: Trigger,
    pub quota: u32,
    /// Layer-height index for diameter rules, enumeration index otherwise.
    pub source_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LeaderVariant {
    /// Every port has at least one pulse.
    EvenDiameterSimple,
    /// All `d` ports match the trigger.
    EvenAllPorts,
    /// `d - 1` ports match the trigger and the remaining port has exactly one pulse.
    OddRemainingOne,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LeaderRule {
    pub degree: Option<usize>,
    /// Sorted descending; empty for [`LeaderVariant::EvenDiameterSimple`].
    pub trigger: Vec<u32>,
    pub variant: LeaderVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RuleSetKind {
    EvenDiameter { radius: usize },
    GeneralTree { k: usize, diameter: usize },
}

/// Compiled Upstream and Leader rules for one algorithm instance. The
/// Downstream rule is fixed and lives in the node automaton.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RuleSet {
    pub kind: RuleSetKind,
    /// Sorted by (degree, source index).
    pub upstream: Vec<UpstreamRule>,
    pub leader: LeaderRule,
    /// Applies to `Counts` triggers; `Uniform` triggers are always at-least.
    pub mode: MatchMode,
}

impl RuleSet {
    pub fn upstream_for(&self, degree: usize) -> impl Iterator<Item = &UpstreamRule> {
        self.upstream
            .iter()
            .filter(move |r| r.degree.is_none_or(|d| d == degree))
    }

    /// Largest quota any rule can demand of a node with `degree` ports.
    pub fn max_quota(&self, degree: usize) -> u32 {
        self.upstream_for(degree)
            .map(|r| r.quota)
            .max()
            .unwrap_or(0)
    }

    pub fn with_mode(mut self, mode: MatchMode) -> Self {
        self.mode = mode;
        self
    }

    /// Same-degree rules whose triggers are ordered by componentwise
    /// dominance must have strictly ordered quotas, so a node that fires a
    /// weaker rule first never overshoots the rule it fires later.
    pub fn check_well_defined(&self) -> Result<(), ProtocolError> {
        for (i, a) in self.upstream.iter().enumerate() {
            for b in &self.upstream[i + 1..] {
                if a.degree != b.degree {
                    continue;
                }
                let ordered = match (&a.trigger, &b.trigger) {
                    (Trigger::Counts(ta), Trigger::Counts(tb)) => {
                        let a_dom = ta.iter().zip(tb).all(|(x, y)| x >= y);
                        let b_dom = ta.iter().zip(tb).all(|(x, y)| x <= y);
                        (!a_dom || a.quota > b.quota) && (!b_dom || b.quota > a.quota)
                    }
                    (Trigger::Uniform(xa), Trigger::Uniform(xb)) => {
                        xa.cmp(xb) == a.quota.cmp(&b.quota)
                    }
                    _ => true,
                };
                if !ordered {
                    return Err(ProtocolError::IllDefinedRules {
                        first: a.source_index,
                        second: b.source_index,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Rules for the algorithm that only knows the diameter `D = 2r`: for each
/// `i` in `1..=r`, "`d - 1` ports with at least `i + 1`, remaining port
/// silent" sends up to `i` pulses. A degree-1 node matches every copy at
/// start-up and so sends `r` immediately.
pub fn compile_even_rules(diameter: usize) -> Result<RuleSet, ProtocolError> {
    if !diameter.is_multiple_of(2) {
        return Err(ProtocolError::OddDiameter { diameter });
    }
    let radius = diameter / 2;
    let upstream = (1..=radius)
        .map(|i| UpstreamRule {
            degree: None,
            trigger: Trigger::Uniform(i as u32 + 1),
            quota: i as u32,
            source_index: i,
        })
        .collect();
    Ok(RuleSet {
        kind: RuleSetKind::EvenDiameter { radius },
        upstream,
        leader: LeaderRule {
            degree: None,
            trigger: Vec::new(),
            variant: LeaderVariant::EvenDiameterSimple,
        },
        mode: MatchMode::AtLeast,
    })
}

/// Rules for the algorithm that knows the whole (asymmetric) topology: one
/// upstream rule per enumerated subtree `T_i`, `i < k`, triggered by the
/// `lambda∘tau` values of its root's children and sending `lambda(i)`; the
/// leader rule is read off `T_k`.
pub fn compile_general_rules(tree: &TreeTopology) -> Result<RuleSet, ProtocolError> {
    let symmetry = is_edge_symmetric(tree);
    if let Some(witness) = symmetry.witness_edge {
        return Err(ProtocolError::SymmetricTree { witness });
    }
    let layering = layer_decomposition(tree);
    let index = enumerate_subtrees(tree, &layering);
    let k = index.k();
    let child_quotas = |v| -> Vec<u32> {
        let mut q: Vec<u32> = layering
            .subtree_children(v)
            .map(|c| index.lambda_tau(c))
            .collect();
        q.sort_unstable_by(|a, b| b.cmp(a));
        q
    };

    let mut upstream: Vec<UpstreamRule> = (1..k)
        .map(|i| {
            let trigger = child_quotas(index.representative(i));
            UpstreamRule {
                degree: Some(trigger.len() + 1),
                trigger: Trigger::Counts(trigger),
                quota: index.lambda(i),
                source_index: i,
            }
        })
        .collect();
    upstream.sort_by_key(|r| (r.degree, r.source_index));

    let root = layering.root();
    debug_assert_eq!(index.tau(root), k);
    let trigger = child_quotas(root);
    let leader = if layering.is_odd() {
        LeaderRule {
            degree: Some(trigger.len() + 1),
            trigger,
            variant: LeaderVariant::OddRemainingOne,
        }
    } else {
        LeaderRule {
            degree: Some(trigger.len()),
            trigger,
            variant: LeaderVariant::EvenAllPorts,
        }
    };

    let rules = RuleSet {
        kind: RuleSetKind::GeneralTree {
            k,
            diameter: layering.diameter(),
        },
        upstream,
        leader,
        mode: MatchMode::AtLeast,
    };
    rules.check_well_defined()?;
    Ok(rules)
}

fn list(values: &[u32]) -> String {
    let parts: Vec<String> = values.iter().map(u32::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn degree_str(d: Option<usize>) -> String {
    d.map_or_else(|| "*".to_string(), |d| d.to_string())
}

/// One line per rule, stable order.
impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RuleSetKind::EvenDiameter { radius } => {
                writeln!(f, "algorithm even diameter={} radius={radius}", 2 * radius)?
            }
            RuleSetKind::GeneralTree { k, diameter } => writeln!(
                f,
                "algorithm general diameter={diameter} k={k} match={}",
                self.mode.as_str()
            )?,
        }
        for rule in &self.upstream {
            let trigger = match &rule.trigger {
                Trigger::Uniform(x) => format!("[>={x} each]"),
                Trigger::Counts(t) => list(t),
            };
            writeln!(
                f,
                "upstream degree={} trigger={trigger} quota={} source={}",
                degree_str(rule.degree),
                rule.quota,
                rule.source_index
            )?;
        }
        let l = &self.leader;
        match l.variant {
            LeaderVariant::EvenDiameterSimple => {
                writeln!(f, "leader degree=* trigger=[>=1 each] remaining=none")
            }
            LeaderVariant::EvenAllPorts => writeln!(
                f,
                "leader degree={} trigger={} remaining=none",
                degree_str(l.degree),
                list(&l.trigger)
            ),
            LeaderVariant::OddRemainingOne => writeln!(
                f,
                "leader degree={} trigger={} remaining=1",
                degree_str(l.degree),
                list(&l.trigger)
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::parse_edge_list;

    #[test]
    fn diameter_two() {
        let rules = compile_even_rules(2).unwrap();
        assert_eq!(rules.upstream.len(), 1);
        assert_eq!(rules.upstream[0].trigger, Trigger::Uniform(2));
        assert_eq!(rules.upstream[0].quota, 1);
        assert_eq!(rules.max_quota(1), 1);
    }

    #[test]
    fn diameter_zero_has_only_leader_rule() {
        let rules = compile_even_rules(0).unwrap();
        assert!(rules.upstream.is_empty());
        assert_eq!(rules.leader.variant, LeaderVariant::EvenDiameterSimple);
    }

    #[test]
    fn diameter_four() {
        let rules = compile_even_rules(4).unwrap();
        assert_eq!(rules.max_quota(1), 2);
        assert_eq!(rules.upstream[1].trigger, Trigger::Uniform(3));
        assert_eq!(rules.upstream[1].quota, 2);
    }

    #[test]
    fn odd_diameter_rejected() {
        assert_eq!(
            compile_even_rules(3).unwrap_err(),
            ProtocolError::OddDiameter { diameter: 3 }
        );
    }

    #[test]
    fn caterpillar_rules() {
        let t = parse_edge_list("1 2\n2 3\n3 4\n2 0").unwrap();
        let rules = compile_general_rules(&t).unwrap();
        assert_eq!(rules.kind, RuleSetKind::GeneralTree { k: 3, diameter: 3 });
        assert_eq!(
            rules.upstream,
            vec![
                UpstreamRule {
                    degree: Some(1),
                    trigger: Trigger::Counts(vec![]),
                    quota: 2,
                    source_index: 1
                },
                UpstreamRule {
                    degree: Some(2),
                    trigger: Trigger::Counts(vec![2]),
                    quota: 1,
                    source_index: 2
                },
            ]
        );
        assert_eq!(
            rules.leader,
            LeaderRule {
                degree: Some(3),
                trigger: vec![2, 2],
                variant: LeaderVariant::OddRemainingOne
            }
        );
        assert_eq!(
            rules.to_string(),
            "algorithm general diameter=3 k=3 match=at-least\n\
             upstream degree=1 trigger=[] quota=2 source=1\n\
             upstream degree=2 trigger=[2] quota=1 source=2\n\
             leader degree=3 trigger=[2,2] remaining=1\n"
        );
    }

    #[test]
    fn four_path_is_rejected_with_witness() {
        let t = parse_edge_list("0 1\n1 2\n2 3").unwrap();
        assert_eq!(
            compile_general_rules(&t).unwrap_err(),
            ProtocolError::SymmetricTree { witness: (1, 2) }
        );
    }

    #[test]
    fn three_path_general_rules() {
        let t = parse_edge_list("0 1\n1 2").unwrap();
        let rules = compile_general_rules(&t).unwrap();
        assert_eq!(rules.upstream.len(), 1);
        assert_eq!(rules.upstream[0].quota, 1);
        assert_eq!(rules.leader.trigger, vec![1, 1]);
        assert_eq!(rules.leader.variant, LeaderVariant::EvenAllPorts);
    }

    #[test]
    fn single_vertex_general_rules() {
        let rules = compile_general_rules(&TreeTopology::single()).unwrap();
        assert!(rules.upstream.is_empty());
        assert_eq!(rules.leader.degree, Some(0));
    }

    #[test]
    fn even_listing() {
        assert_eq!(
            compile_even_rules(4).unwrap().to_string(),
            "algorithm even diameter=4 radius=2\n\
             upstream degree=* trigger=[>=2 each] quota=1 source=1\n\
             upstream degree=* trigger=[>=3 each] quota=2 source=2\n\
             leader degree=* trigger=[>=1 each] remaining=none\n"
        );
    }
}
