//! Transition relation, traces and bounded enumeration of generated sets.
//!
//! One transition activates the pending instruction. If its channel's source
//! host is nonempty, one virus is consumed and `w` copies land at the target
//! (the environment when the target is `h0`) and the next instruction is drawn
//! from the maximal-weight outgoing edges. Otherwise nothing moves and the
//! minimal-weight edges apply. Unattached instructions never transmit. An empty
//! candidate set yields a single halting successor carrying `#`.

mod explore;
mod oracle;
mod trace;

pub use explore::{enumerate_generated_set, ExplorationBounds, GeneratedSetReport};
pub use oracle::{brute_force_oracle, brute_force_oracle_with_cap, DEFAULT_ORACLE_NODE_CAP};
pub use trace::{
    assert_trace, run_trace, CheckReport, ChoicePoint, ChoicePolicy, ComputationTrace, Mismatch,
};

use thiserror::Error;

use crate::count::Count;
use crate::model::{initial_configuration, Configuration, Endpoint, ModelError, Next, ValidationReport, VirusMachine};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("invalid machine: {0}")]
    InvalidMachine(ValidationReport),
    #[error("configuration references unknown instruction index {0}")]
    UnknownInstruction(usize),
    #[error("configuration has {found} host counts, machine has {expected} hosts")]
    HostArity { expected: usize, found: usize },
    #[error("count overflow at step {step}")]
    Overflow { step: usize },
    #[error("choice script exhausted at step {step} (tie of {ties} candidates)")]
    ScriptExhausted { step: usize, ties: usize },
    #[error("choice index {index} out of range at step {step} (tie of {ties} candidates)")]
    ChoiceOutOfRange { step: usize, index: usize, ties: usize },
    #[error("oracle refused: more than {cap} computation-tree nodes")]
    OracleCapExceeded { cap: usize },
}

impl From<ModelError> for SemanticsError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Invalid(r) => SemanticsError::InvalidMachine(r),
        }
    }
}

#[derive(Clone, Debug)]
struct Transfer<C> {
    source: usize,
    /// `None` is the environment.
    target: Option<usize>,
    weight: C,
}

#[derive(Clone, Debug)]
struct Op<C> {
    transfer: Option<Transfer<C>>,
    /// Targets of maximal-weight outgoing edges, canonical order.
    on_transmit: Vec<usize>,
    /// Targets of minimal-weight outgoing edges, canonical order.
    on_idle: Vec<usize>,
}

/// Index-resolved view of a validated machine used by the step function.
#[derive(Clone, Debug)]
pub struct Program<'m, C> {
    machine: &'m VirusMachine<C>,
    ops: Vec<Op<C>>,
}

/// Result of activating one instruction, before the next one is chosen.
#[derive(Clone, Debug)]
pub(crate) struct Fired<'p, C> {
    pub hosts: Vec<C>,
    pub env: C,
    pub candidates: &'p [usize],
}

impl<'m, C: Count> Program<'m, C> {
    pub fn new(machine: &'m VirusMachine<C>) -> Result<Self, SemanticsError> {
        // validation rejects anything the lookups below would trip over
        initial_configuration(machine)?;
        let ops = machine
            .instructions
            .iter()
            .enumerate()
            .map(|(idx, id)| {
                let transfer = machine.attachment_of(id).map(|key| {
                    let ch = machine.channel(key).expect("validated attachment");
                    Transfer {
                        source: machine.host_index(ch.source.as_str()).expect("validated source"),
                        target: match &ch.target {
                            Endpoint::Environment => None,
                            Endpoint::Host(h) => Some(machine.host_index(h.as_str()).expect("validated target")),
                        },
                        weight: ch.weight.clone(),
                    }
                });
                let mut out: Vec<(usize, u8)> = machine
                    .instruction_edges
                    .iter()
                    .filter(|e| e.source == machine.instructions[idx])
                    .map(|e| {
                        let t = machine.instruction_index(e.target.as_str()).expect("validated edge");
                        (t, e.weight)
                    })
                    .collect();
                out.sort_unstable();
                let pick = |w: Option<u8>| -> Vec<usize> {
                    w.map(|w| out.iter().filter(|(_, x)| *x == w).map(|(t, _)| *t).collect())
                        .unwrap_or_default()
                };
                let hi = out.iter().map(|(_, w)| *w).max();
                let lo = out.iter().map(|(_, w)| *w).min();
                Op {
                    transfer,
                    on_transmit: pick(hi),
                    on_idle: pick(lo),
                }
            })
            .collect();
        Ok(Self { machine, ops })
    }

    pub fn machine(&self) -> &'m VirusMachine<C> {
        self.machine
    }

    pub fn initial(&self) -> Configuration<C> {
        initial_configuration(self.machine).expect("program built from a valid machine")
    }

    pub(crate) fn fire(&self, c: &Configuration<C>) -> Result<Option<Fired<'_, C>>, SemanticsError> {
        let idx = match c.next {
            Next::Halt => return Ok(None),
            Next::At(i) => i,
        };
        let op = self.ops.get(idx).ok_or(SemanticsError::UnknownInstruction(idx))?;
        if c.hosts.len() != self.machine.hosts.len() {
            return Err(SemanticsError::HostArity {
                expected: self.machine.hosts.len(),
                found: c.hosts.len(),
            });
        }
        let overflow = SemanticsError::Overflow { step: c.step + 1 };
        let mut hosts = c.hosts.clone();
        let mut env = c.env.clone();
        let mut transmitted = false;
        if let Some(t) = &op.transfer {
            if !hosts[t.source].is_zero() {
                hosts[t.source] = hosts[t.source].checked_sub(&C::one()).ok_or(overflow.clone())?;
                let slot = match t.target {
                    Some(h) => &mut hosts[h],
                    None => &mut env,
                };
                *slot = slot.checked_add(&t.weight).ok_or(overflow)?;
                transmitted = true;
            }
        }
        let candidates = if transmitted { &op.on_transmit } else { &op.on_idle };
        Ok(Some(Fired {
            hosts,
            env,
            candidates,
        }))
    }

    /// All configurations reachable in one transition, in canonical order.
    pub fn successors(&self, c: &Configuration<C>) -> Result<Vec<Configuration<C>>, SemanticsError> {
        let Some(fired) = self.fire(c)? else {
            return Ok(Vec::new());
        };
        let step = c.step + 1;
        if fired.candidates.is_empty() {
            return Ok(vec![Configuration::new(fired.hosts, Next::Halt, fired.env, step)]);
        }
        Ok(fired
            .candidates
            .iter()
            .map(|&t| Configuration::new(fired.hosts.clone(), Next::At(t), fired.env.clone(), step))
            .collect())
    }
}

/// One-shot form of [`Program::successors`].
pub fn successors<C: Count>(
    m: &VirusMachine<C>,
    c: &Configuration<C>,
) -> Result<Vec<Configuration<C>>, SemanticsError> {
    Program::new(m)?.successors(c)
}
