use serde::{Deserialize, Serialize};

use super::matching::{match_all_ports, match_trigger, MatchMode};
use super::rules::{LeaderVariant, RuleSet, Trigger};
use crate::topology::Port;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Undecided,
    Leader,
    NonLeader,
}

/// Which rule produced a pulse; only used for accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    Upstream,
    LeaderDownstream,
    StabilizingInit,
    Election,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Send {
        port: Port,
        count: u32,
        kind: PulseKind,
    },
    Declare(Output),
    Halt,
}

/// Leaf-trimming and edge-election state of the ID-based stabilizing automaton.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StabilizingState {
    pub id: u32,
    pub is_leaf: bool,
    /// Per-port: neighbor not yet trimmed away.
    pub live: Vec<bool>,
    pub phase: ElectionPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElectionPhase {
    Trimming,
    /// Sent `needed` pulses; waiting to receive as many back.
    Electing {
        needed: u32,
        got: u32,
    },
}

/// Local state of one node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeState {
    pub received: Vec<u32>,
    pub sent: Vec<u32>,
    pub port_star: Option<Port>,
    pub downstream_active: bool,
    pub leader_rule_active: bool,
    pub output: Output,
    pub halted: bool,
    pub stabilizing: Option<StabilizingState>,
}

impl NodeState {
    fn blank(degree: usize, output: Output) -> Self {
        Self {
            received: vec![0; degree],
            sent: vec![0; degree],
            port_star: None,
            downstream_active: false,
            leader_rule_active: true,
            output,
            halted: false,
            stabilizing: None,
        }
    }

    pub fn degree(&self) -> usize {
        self.received.len()
    }

    fn send(&mut self, port: Port, count: u32, kind: PulseKind, out: &mut Vec<Action>) {
        self.sent[port] += count;
        out.push(Action::Send { port, count, kind });
    }

    fn finish(&mut self, output: Output, out: &mut Vec<Action>) {
        self.output = output;
        self.halted = true;
        out.push(Action::Declare(output));
        out.push(Action::Halt);
    }

    // ---- rule-driven automaton --------------------------------------------

    /// Fresh automaton for a node with `degree` ports. Degree-1 nodes fire
    /// their start-up upstream send here; a degree-0 node elects itself.
    pub fn init(degree: usize, rules: &RuleSet) -> (Self, Vec<Action>) {
        let mut state = Self::blank(degree, Output::Undecided);
        let actions = state.evaluate(rules);
        (state, actions)
    }

    /// One pulse arrives on `port`.
    pub fn on_deliver(&mut self, rules: &RuleSet, port: Port) -> Vec<Action> {
        self.received[port] += 1;
        if self.halted {
            return Vec::new();
        }
        if self.downstream_active && self.port_star == Some(port) {
            let mut out = Vec::with_capacity(self.degree() + 1);
            for q in (0..self.degree()).filter(|&q| q != port) {
                self.send(q, 1, PulseKind::LeaderDownstream, &mut out);
            }
            self.finish(Output::NonLeader, &mut out);
            return out;
        }
        self.evaluate(rules)
    }

    fn leader_matches(&self, rules: &RuleSet) -> bool {
        let rule = &rules.leader;
        if rule.degree.is_some_and(|d| d != self.degree()) {
            return false;
        }
        match rule.variant {
            LeaderVariant::EvenDiameterSimple => self.received.iter().all(|&c| c >= 1),
            LeaderVariant::EvenAllPorts => {
                match_all_ports(&self.received, &rule.trigger, rules.mode)
            }
            LeaderVariant::OddRemainingOne => {
                match_trigger(&self.received, &rule.trigger, 1, rules.mode).is_some()
            }
        }
    }

    /// Best upstream match as (quota, remaining port): highest quota, then
    /// lowest port.
    fn best_upstream(&self, rules: &RuleSet) -> Option<(u32, Port)> {
        let d = self.degree();
        let mut best: Option<(u32, Port)> = None;
        for rule in rules.upstream_for(d) {
            let hit = match &rule.trigger {
                Trigger::Uniform(x) => {
                    let trigger = vec![*x; d.saturating_sub(1)];
                    match_trigger(&self.received, &trigger, 0, MatchMode::AtLeast)
                }
                Trigger::Counts(t) => match_trigger(&self.received, t, 0, rules.mode),
            };
            let Some(port) = hit else { continue };
            if self.port_star.is_some_and(|ps| ps != port) {
                continue;
            }
            let better = match best {
                None => true,
                Some((q, p)) => rule.quota > q || (rule.quota == q && port < p),
            };
            if better {
                best = Some((rule.quota, port));
            }
        }
        best
    }

    fn evaluate(&mut self, rules: &RuleSet) -> Vec<Action> {
        let mut out = Vec::new();
        if self.leader_rule_active && self.leader_matches(rules) {
            for p in 0..self.degree() {
                self.send(p, 1, PulseKind::LeaderDownstream, &mut out);
            }
            self.finish(Output::Leader, &mut out);
            return out;
        }
        if let Some((quota, port)) = self.best_upstream(rules) {
            let port = *self.port_star.get_or_insert(port);
            self.leader_rule_active = false;
            self.downstream_active = true;
            if quota > self.sent[port] {
                let top_up = quota - self.sent[port];
                self.send(port, top_up, PulseKind::Upstream, &mut out);
            }
        }
        out
    }

    // ---- stabilizing automaton --------------------------------------------

    /// Fresh stabilizing automaton with identifier `id`. Output starts at
    /// `NonLeader`; a node that starts as a leaf announces itself at once.
    pub fn init_stabilizing(degree: usize, id: u32) -> (Self, Vec<Action>) {
        let mut state = Self::blank(degree, Output::NonLeader);
        state.leader_rule_active = false;
        state.stabilizing = Some(StabilizingState {
            id,
            is_leaf: false,
            live: vec![true; degree],
            phase: ElectionPhase::Trimming,
        });
        let actions = state.stabilizing_step(StabilizingEvent::Init);
        (state, actions)
    }

    pub fn stabilizing_step(&mut self, event: StabilizingEvent) -> Vec<Action> {
        let mut out = Vec::new();
        if let StabilizingEvent::Delivered(port) = event {
            self.received[port] += 1;
        }
        if self.halted {
            return out;
        }
        let mut st = self.stabilizing.take().expect("stabilizing automaton");
        match event {
            StabilizingEvent::Init => {
                if self.degree() == 0 {
                    self.finish(Output::Leader, &mut out);
                }
            }
            StabilizingEvent::Delivered(port) => match st.phase {
                ElectionPhase::Electing { needed, got } => {
                    let got = got + 1;
                    st.phase = ElectionPhase::Electing { needed, got };
                    if got >= needed {
                        self.finish(Output::Leader, &mut out);
                    }
                }
                ElectionPhase::Trimming if st.is_leaf => {
                    let target = live_port(&st);
                    st.phase = ElectionPhase::Electing {
                        needed: st.id,
                        got: 0,
                    };
                    self.send(target, st.id, PulseKind::Election, &mut out);
                }
                ElectionPhase::Trimming => st.live[port] = false,
            },
        }
        if !self.halted && !st.is_leaf && st.live.iter().filter(|&&l| l).count() == 1 {
            st.is_leaf = true;
            self.send(live_port(&st), 1, PulseKind::StabilizingInit, &mut out);
        }
        self.stabilizing = Some(st);
        out
    }
}

fn live_port(st: &StabilizingState) -> Port {
    st.live
        .iter()
        .position(|&l| l)
        .expect("a leaf keeps one live neighbor")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilizingEvent {
    Init,
    Delivered(Port),
}
