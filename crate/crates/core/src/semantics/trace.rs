use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Program, SemanticsError};
use crate::count::Count;
use crate::model::{render_next, Configuration, InstructionId, Next, VirusMachine};

/// How nondeterministic ties are resolved during a single run.
///
/// Scripted entries are consumed only at genuine ties (two or more
/// candidates); forced steps never read the script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChoicePolicy {
    Scripted(Vec<usize>),
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChoicePoint {
    /// Index of the configuration produced by the choice.
    pub step: usize,
    pub ties: Vec<InstructionId>,
    pub chosen: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComputationTrace<C> {
    pub configurations: Vec<Configuration<C>>,
    pub choices: Vec<ChoicePoint>,
    pub halted: bool,
    pub emitted: Option<C>,
}

impl<C: Count> ComputationTrace<C> {
    pub fn last(&self) -> &Configuration<C> {
        self.configurations.last().expect("trace holds the initial configuration")
    }

    /// Number of transitions taken.
    pub fn steps(&self) -> usize {
        self.configurations.len() - 1
    }

    pub fn at(&self, step: usize) -> Option<&Configuration<C>> {
        self.configurations.get(step)
    }
}

enum Chooser {
    Script { entries: Vec<usize>, pos: usize },
    Rng(Box<ChaCha8Rng>),
}

impl Chooser {
    fn new(policy: &ChoicePolicy) -> Self {
        match policy {
            ChoicePolicy::Scripted(s) => Chooser::Script {
                entries: s.clone(),
                pos: 0,
            },
            ChoicePolicy::Seeded(seed) => Chooser::Rng(Box::new(ChaCha8Rng::seed_from_u64(*seed))),
        }
    }

    fn choose(&mut self, step: usize, ties: usize) -> Result<usize, SemanticsError> {
        match self {
            Chooser::Script { entries, pos } => {
                let index = *entries.get(*pos).ok_or(SemanticsError::ScriptExhausted { step, ties })?;
                *pos += 1;
                if index >= ties {
                    return Err(SemanticsError::ChoiceOutOfRange { step, index, ties });
                }
                Ok(index)
            }
            Chooser::Rng(rng) => Ok(rng.gen_range(0..ties)),
        }
    }
}

/// Runs until halt, `max_steps` transitions, or a policy failure. The partial
/// trace is returned alongside the failure, if any.
fn run_partial<C: Count>(
    m: &VirusMachine<C>,
    policy: &ChoicePolicy,
    max_steps: usize,
) -> Result<(ComputationTrace<C>, Option<SemanticsError>), SemanticsError> {
    let program = Program::new(m)?;
    let mut chooser = Chooser::new(policy);
    let mut trace = ComputationTrace {
        configurations: vec![program.initial()],
        choices: Vec::new(),
        halted: false,
        emitted: None,
    };
    while trace.steps() < max_steps {
        let current = trace.last();
        if current.is_halting() {
            break;
        }
        let mut next = program.successors(current)?;
        let step = current.step + 1;
        let pick = if next.len() > 1 {
            match chooser.choose(step, next.len()) {
                Ok(k) => {
                    trace.choices.push(ChoicePoint {
                        step,
                        ties: next
                            .iter()
                            .map(|c| match c.next {
                                Next::At(i) => m.instructions[i].clone(),
                                Next::Halt => InstructionId::new(render_next(m, c.next)),
                            })
                            .collect(),
                        chosen: k,
                    });
                    k
                }
                Err(e) => return Ok((trace, Some(e))),
            }
        } else {
            0
        };
        trace.configurations.push(next.swap_remove(pick));
    }
    if trace.last().is_halting() {
        trace.halted = true;
        trace.emitted = Some(trace.last().env.clone());
    }
    Ok((trace, None))
}

/// Executes one computation, resolving ties with `policy`.
pub fn run_trace<C: Count>(
    m: &VirusMachine<C>,
    policy: &ChoicePolicy,
    max_steps: usize,
) -> Result<ComputationTrace<C>, SemanticsError> {
    match run_partial(m, policy, max_steps)? {
        (trace, None) => Ok(trace),
        (_, Some(e)) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub step: usize,
    pub field: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Runs a trace and compares the configuration at each expected step
/// field by field. Missing steps are reported, not raised.
pub fn assert_trace<C: Count>(
    m: &VirusMachine<C>,
    policy: &ChoicePolicy,
    expectations: &[(usize, Configuration<C>)],
) -> Result<CheckReport, SemanticsError> {
    let horizon = expectations.iter().map(|(s, _)| *s).max().unwrap_or(0);
    let (trace, stop) = run_partial(m, policy, horizon)?;
    let mut report = CheckReport::default();
    for (step, want) in expectations {
        report.checked += 1;
        let Some(got) = trace.at(*step) else {
            let why = match &stop {
                Some(e) => format!("trace stopped at step {}: {e}", trace.steps()),
                None => format!("trace ended at step {}", trace.steps()),
            };
            report.mismatches.push(Mismatch {
                step: *step,
                field: "trace".into(),
                expected: want.render(m),
                actual: why,
            });
            continue;
        };
        let mut diff = |field: String, e: String, a: String| {
            if e != a {
                report.mismatches.push(Mismatch {
                    step: *step,
                    field,
                    expected: e,
                    actual: a,
                });
            }
        };
        for (k, host) in m.hosts.iter().enumerate() {
            diff(
                host.id.to_string(),
                want.hosts.get(k).map(|c| c.to_string()).unwrap_or_default(),
                got.hosts[k].to_string(),
            );
        }
        diff("next_instruction".into(), render_next(m, want.next), render_next(m, got.next));
        diff("env_count".into(), want.env.to_string(), got.env.to_string());
    }
    Ok(report)
}
