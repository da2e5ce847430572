//! Exhaustive choice-sequence enumeration, kept independent of [`super::Program`].
//!
//! Every tie is expanded into its own subtree with no merging of equal
//! configurations, and the step rule is re-derived from the raw machine lists.
//! Used only to cross-check [`super::enumerate_generated_set`] at desk scale.

use std::collections::BTreeSet;

use super::{GeneratedSetReport, SemanticsError};
use crate::count::Count;
use crate::model::{validate_machine, Endpoint, InstructionId, VirusMachine};

pub const DEFAULT_ORACLE_NODE_CAP: usize = 4_000_000;

struct Walk<'m, C> {
    m: &'m VirusMachine<C>,
    max_steps: usize,
    cap: usize,
    nodes: usize,
    numbers: BTreeSet<C>,
    nvh: C,
    halted: usize,
    truncated: usize,
}

impl<C: Count> Walk<'_, C> {
    fn host_pos(&self, id: &str) -> usize {
        self.m.hosts.iter().position(|h| h.id.as_str() == id).expect("validated host")
    }

    fn visit(&mut self, hosts: Vec<C>, current: Option<&InstructionId>, env: C, depth: usize) -> Result<(), SemanticsError> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(SemanticsError::OracleCapExceeded { cap: self.cap });
        }
        for h in &hosts {
            if h > &self.nvh {
                self.nvh = h.clone();
            }
        }
        let Some(instr) = current else {
            self.halted += 1;
            self.numbers.insert(env);
            return Ok(());
        };
        if depth == self.max_steps {
            self.truncated += 1;
            return Ok(());
        }

        let mut hosts = hosts;
        let mut env = env;
        let mut moved = false;
        let attachment = self.m.attachments.iter().find(|a| &a.instruction == instr);
        if let Some(a) = attachment {
            let ch = self
                .m
                .channels
                .iter()
                .find(|c| c.source == a.channel.source && c.target == a.channel.target)
                .expect("validated channel");
            let src = self.host_pos(ch.source.as_str());
            if hosts[src] > C::zero() {
                let overflow = SemanticsError::Overflow { step: depth + 1 };
                hosts[src] = hosts[src].checked_sub(&C::one()).ok_or(overflow.clone())?;
                match &ch.target {
                    Endpoint::Environment => env = env.checked_add(&ch.weight).ok_or(overflow)?,
                    Endpoint::Host(t) => {
                        let dst = self.host_pos(t.as_str());
                        hosts[dst] = hosts[dst].checked_add(&ch.weight).ok_or(overflow)?;
                    }
                }
                moved = true;
            }
        }

        let outgoing: Vec<_> = self.m.instruction_edges.iter().filter(|e| &e.source == instr).collect();
        let wanted = if moved {
            outgoing.iter().map(|e| e.weight).max()
        } else {
            outgoing.iter().map(|e| e.weight).min()
        };
        // canonical order = declaration order of instructions
        let targets: Vec<&InstructionId> = self
            .m
            .instructions
            .iter()
            .filter(|i| outgoing.iter().any(|e| &e.target == *i && Some(e.weight) == wanted))
            .collect();
        if targets.is_empty() {
            return self.visit(hosts, None, env, depth + 1);
        }
        for t in targets {
            self.visit(hosts.clone(), Some(t), env.clone(), depth + 1)?;
        }
        Ok(())
    }
}

/// Enumerates every choice sequence up to `max_steps` transitions.
pub fn brute_force_oracle<C: Count>(m: &VirusMachine<C>, max_steps: usize) -> Result<GeneratedSetReport<C>, SemanticsError> {
    brute_force_oracle_with_cap(m, max_steps, DEFAULT_ORACLE_NODE_CAP)
}

/// As [`brute_force_oracle`], refusing once more than `cap` tree nodes are visited.
pub fn brute_force_oracle_with_cap<C: Count>(
    m: &VirusMachine<C>,
    max_steps: usize,
    cap: usize,
) -> Result<GeneratedSetReport<C>, SemanticsError> {
    let report = validate_machine(m);
    if !report.is_valid() {
        return Err(SemanticsError::InvalidMachine(report));
    }
    let mut walk = Walk {
        m,
        max_steps: max_steps.max(1),
        cap,
        nodes: 0,
        numbers: BTreeSet::new(),
        nvh: C::zero(),
        halted: 0,
        truncated: 0,
    };
    let hosts: Vec<C> = m.hosts.iter().map(|h| h.viruses.clone()).collect();
    walk.visit(hosts, Some(&m.initial_instruction), C::zero(), 0)?;
    Ok(GeneratedSetReport {
        numbers: walk.numbers,
        exact: walk.truncated == 0,
        observed_nvh: walk.nvh,
        branch_count: walk.halted + walk.truncated,
        truncated_branch_count: walk.truncated,
    })
}
