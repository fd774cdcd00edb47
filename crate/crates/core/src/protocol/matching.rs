use serde::{Deserialize, Serialize};

use crate::topology::Port;

/// How received counts are compared with a trigger's entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchMode {
    /// Each assigned port has received at least its entry.
    #[default]
    AtLeast,
    /// The assigned ports' counts equal the trigger as a multiset.
    Exact,
}

impl MatchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchMode::AtLeast => "at-least",
            MatchMode::Exact => "exact",
        }
    }
}

fn sorted_desc(values: impl IntoIterator<Item = u32>) -> Vec<u32> {
    let mut v: Vec<u32> = values.into_iter().collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

fn covers(counts_desc: &[u32], trigger_desc: &[u32], mode: MatchMode) -> bool {
    match mode {
        // Sorted-against-sorted dominance is exactly the condition for some
        // assignment of ports to entries to succeed.
        MatchMode::AtLeast => counts_desc.iter().zip(trigger_desc).all(|(c, t)| c >= t),
        MatchMode::Exact => counts_desc == trigger_desc,
    }
}

/// Finds the "remaining" port: one whose count is exactly
/// `remaining_required` while the other `d - 1` ports can be assigned to the
/// trigger's entries. Ties go to the lowest port index.
pub fn match_trigger(
    received: &[u32],
    trigger: &[u32],
    remaining_required: u32,
    mode: MatchMode,
) -> Option<Port> {
    if trigger.len() + 1 != received.len() {
        return None;
    }
    let trigger = sorted_desc(trigger.iter().copied());
    (0..received.len()).find(|&p| {
        received[p] == remaining_required
            && covers(
                &sorted_desc(
                    received
                        .iter()
                        .enumerate()
                        .filter(|&(q, _)| q != p)
                        .map(|(_, &c)| c),
                ),
                &trigger,
                mode,
            )
    })
}

/// All ports against a trigger of full length `d`.
pub fn match_all_ports(received: &[u32], trigger: &[u32], mode: MatchMode) -> bool {
    trigger.len() == received.len()
        && covers(
            &sorted_desc(received.iter().copied()),
            &sorted_desc(trigger.iter().copied()),
            mode,
        )
}
