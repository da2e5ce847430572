use std::collections::BTreeSet;

use serde::Serialize;

use super::{Program, SemanticsError};
use crate::count::Count;
use crate::model::{Configuration, Next, VirusMachine};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplorationBounds {
    /// Transitions explored along every branch; at least 1.
    pub max_steps: usize,
    /// Branches whose summed host counts exceed this are cut.
    pub max_total_viruses: Option<u64>,
    /// Distinct configurations kept per level; the excess is cut.
    pub max_frontier: Option<usize>,
}

impl ExplorationBounds {
    pub fn steps(max_steps: usize) -> Self {
        Self {
            max_steps: max_steps.max(1),
            max_total_viruses: None,
            max_frontier: None,
        }
    }
}

/// Outcome of a bounded exploration of the computation tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratedSetReport<C> {
    pub numbers: BTreeSet<C>,
    /// True iff no branch was cut by any bound.
    pub exact: bool,
    pub observed_nvh: C,
    /// Leaves reached: halting plus truncated.
    pub branch_count: usize,
    pub truncated_branch_count: usize,
}

impl<C: Count> GeneratedSetReport<C> {
    /// `{2, 4} (exact)` / `{1, 2} (truncated)`.
    pub fn summary(&self) -> String {
        let items: Vec<String> = self.numbers.iter().map(|n| n.to_string()).collect();
        format!(
            "{{{}}} ({})",
            items.join(", "),
            if self.exact { "exact" } else { "truncated" }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct State<C> {
    hosts: Vec<C>,
    next: Next,
    env: C,
}

/// Level-synchronous breadth-first exploration of every nondeterministic
/// branch. Identical configurations on the same level are merged, and all
/// sets are ordered, so the report does not depend on evaluation order.
pub fn enumerate_generated_set<C: Count>(
    m: &VirusMachine<C>,
    bounds: &ExplorationBounds,
) -> Result<GeneratedSetReport<C>, SemanticsError> {
    let program = Program::new(m)?;
    let init = program.initial();
    let virus_cap = bounds.max_total_viruses.map(C::of);

    let mut nvh = init.max_host();
    let mut numbers = BTreeSet::new();
    let mut halted = 0usize;
    let mut truncated = 0usize;

    let mut frontier = BTreeSet::new();
    frontier.insert(State {
        hosts: init.hosts,
        next: init.next,
        env: init.env,
    });

    for depth in 0..bounds.max_steps.max(1) {
        if frontier.is_empty() {
            break;
        }
        let mut next_level = BTreeSet::new();
        let mut halting = BTreeSet::new();
        for state in std::mem::take(&mut frontier) {
            let cfg = Configuration::new(state.hosts, state.next, state.env, depth);
            if let Some(cap) = &virus_cap {
                let total = cfg.total_viruses().ok_or(SemanticsError::Overflow { step: depth })?;
                if &total > cap {
                    truncated += 1;
                    continue;
                }
            }
            for succ in program.successors(&cfg)? {
                let top = succ.max_host();
                if top > nvh {
                    nvh = top;
                }
                let s = State {
                    hosts: succ.hosts,
                    next: succ.next,
                    env: succ.env,
                };
                if s.next == Next::Halt {
                    halting.insert(s);
                } else {
                    next_level.insert(s);
                }
            }
        }
        halted += halting.len();
        numbers.extend(halting.into_iter().map(|s| s.env));
        if let Some(cap) = bounds.max_frontier {
            while next_level.len() > cap {
                next_level.pop_last();
                truncated += 1;
            }
        }
        frontier = next_level;
    }
    truncated += frontier.len();

    Ok(GeneratedSetReport {
        numbers,
        exact: truncated == 0,
        observed_nvh: nvh,
        branch_count: halted + truncated,
        truncated_branch_count: truncated,
    })
}
