//! Static description of a virus machine and its configurations.
//!
//! A machine is three graphs over a singleton alphabet: the weighted host
//! graph (hosts plus the environment `h0`, arcs are channels), the instruction
//! graph (edge weights in `{1, 2}`), and the attachment relation that binds each
//! instruction to at most one channel. Viruses carry no identity, only counts.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::count::Count;

/// Reserved identifier of the environment. Never a member of the host list.
pub const ENVIRONMENT: &str = "h0";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HostId(pub String);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InstructionId(pub String);

impl HostId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl InstructionId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for HostId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for InstructionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for HostId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

impl From<&str> for InstructionId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

/// Target side of a channel: a declared host or the environment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Host(HostId),
    Environment,
}

impl Endpoint {
    /// Parses a textual endpoint; `"h0"` is the environment.
    pub fn parse(s: &str) -> Self {
        if s == ENVIRONMENT {
            Endpoint::Environment
        } else {
            Endpoint::Host(HostId::new(s))
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Endpoint::Host(h) => h.as_str(),
            Endpoint::Environment => ENVIRONMENT,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<&str> for Endpoint {
    fn from(s: &str) -> Self {
        Endpoint::parse(s)
    }
}

/// Ordered `(source, target)` pair identifying a channel.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelKey {
    pub source: HostId,
    pub target: Endpoint,
}

impl ChannelKey {
    pub fn new(source: impl Into<HostId>, target: impl Into<Endpoint>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
        }
    }
}

impl fmt::Display for ChannelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.source, self.target)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Host<C> {
    pub id: HostId,
    pub viruses: C,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Channel<C> {
    pub source: HostId,
    pub target: Endpoint,
    pub weight: C,
}

impl<C> Channel<C> {
    pub fn key(&self) -> ChannelKey {
        ChannelKey {
            source: self.source.clone(),
            target: self.target.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InstructionEdge {
    pub source: InstructionId,
    pub target: InstructionId,
    /// Must be 1 or 2; anything else is reported by validation.
    pub weight: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Attachment {
    pub instruction: InstructionId,
    pub channel: ChannelKey,
}

/// Complete static description of a virus machine.
///
/// Hosts and instructions are ordered sets; their declaration order is the
/// canonical order used for tie sets, serialization and configuration tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirusMachine<C> {
    pub name: String,
    /// Free-form provenance note carried through serialization.
    pub note: Option<String>,
    pub hosts: Vec<Host<C>>,
    pub channels: Vec<Channel<C>>,
    pub instructions: Vec<InstructionId>,
    pub instruction_edges: Vec<InstructionEdge>,
    pub attachments: Vec<Attachment>,
    pub initial_instruction: InstructionId,
}

impl<C> VirusMachine<C> {
    pub fn host_index(&self, id: &str) -> Option<usize> {
        self.hosts.iter().position(|h| h.id.as_str() == id)
    }

    pub fn instruction_index(&self, id: &str) -> Option<usize> {
        self.instructions.iter().position(|i| i.as_str() == id)
    }

    pub fn channel(&self, key: &ChannelKey) -> Option<&Channel<C>> {
        self.channels
            .iter()
            .find(|c| c.source == key.source && c.target == key.target)
    }

    /// The channel an instruction is attached to, if any (first match).
    pub fn attachment_of(&self, instruction: &InstructionId) -> Option<&ChannelKey> {
        self.attachments
            .iter()
            .find(|a| &a.instruction == instruction)
            .map(|a| &a.channel)
    }

    pub fn host_count(&self) -> usize {
        self.hosts.len()
    }

    pub fn instruction_count(&self) -> usize {
        self.instructions.len()
    }
}

/// One structural defect found by [`validate_machine`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Violation {
    ReservedHostId,
    DuplicateHost(HostId),
    DuplicateInstruction(InstructionId),
    NoInstructions,
    UnknownInitialInstruction(InstructionId),
    ChannelFromEnvironment(ChannelKey),
    UnknownChannelSource(ChannelKey),
    UnknownChannelTarget(ChannelKey),
    SelfChannel(ChannelKey),
    ZeroChannelWeight(ChannelKey),
    DuplicateChannel(ChannelKey),
    UnknownEdgeEndpoint { source: InstructionId, target: InstructionId },
    BadEdgeWeight { source: InstructionId, target: InstructionId, weight: u8 },
    DuplicateEdge { source: InstructionId, target: InstructionId },
    UnknownAttachedInstruction(InstructionId),
    UnknownAttachedChannel { instruction: InstructionId, channel: ChannelKey },
    MultipleAttachments(InstructionId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            ReservedHostId => write!(f, "host id {ENVIRONMENT} is reserved for the environment"),
            DuplicateHost(h) => write!(f, "duplicate host {h}"),
            DuplicateInstruction(i) => write!(f, "duplicate instruction {i}"),
            NoInstructions => write!(f, "machine declares no instructions"),
            UnknownInitialInstruction(i) => write!(f, "initial instruction {i} is not declared"),
            ChannelFromEnvironment(k) => write!(f, "channel {k} starts at the environment"),
            UnknownChannelSource(k) => write!(f, "channel {k} has an undeclared source host"),
            UnknownChannelTarget(k) => write!(f, "channel {k} has an undeclared target host"),
            SelfChannel(k) => write!(f, "channel {k} is a self-channel"),
            ZeroChannelWeight(k) => write!(f, "channel {k} has weight 0"),
            DuplicateChannel(k) => write!(f, "channel {k} is declared more than once"),
            UnknownEdgeEndpoint { source, target } => {
                write!(f, "instruction edge ({source},{target}) references an undeclared instruction")
            }
            BadEdgeWeight { source, target, weight } => {
                write!(f, "instruction edge ({source},{target}) has weight {weight}, expected 1 or 2")
            }
            DuplicateEdge { source, target } => {
                write!(f, "instruction edge ({source},{target}) is declared more than once")
            }
            UnknownAttachedInstruction(i) => write!(f, "attachment references undeclared instruction {i}"),
            UnknownAttachedChannel { instruction, channel } => {
                write!(f, "instruction {instruction} is attached to undeclared channel {channel}")
            }
            MultipleAttachments(i) => write!(f, "instruction {i} is attached to more than one channel"),
        }
    }
}

/// Every violated structural invariant; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid machine: {0}")]
    Invalid(ValidationReport),
}

/// Checks every structural constraint of the machine description.
///
/// The report is sorted and deduplicated, so it does not depend on the order
/// in which hosts, channels, edges or attachments are listed.
pub fn validate_machine<C: Count>(m: &VirusMachine<C>) -> ValidationReport {
    let mut out = BTreeSet::new();

    let mut hosts = HashSet::new();
    for h in &m.hosts {
        if h.id.as_str() == ENVIRONMENT {
            out.insert(Violation::ReservedHostId);
        } else if !hosts.insert(&h.id) {
            out.insert(Violation::DuplicateHost(h.id.clone()));
        }
    }

    let mut instructions = HashSet::new();
    for i in &m.instructions {
        if !instructions.insert(i) {
            out.insert(Violation::DuplicateInstruction(i.clone()));
        }
    }
    if m.instructions.is_empty() {
        out.insert(Violation::NoInstructions);
    }
    if !instructions.contains(&m.initial_instruction) {
        out.insert(Violation::UnknownInitialInstruction(m.initial_instruction.clone()));
    }

    let mut channels = HashSet::new();
    for c in &m.channels {
        let key = c.key();
        if c.source.as_str() == ENVIRONMENT {
            out.insert(Violation::ChannelFromEnvironment(key.clone()));
        } else if !hosts.contains(&c.source) {
            out.insert(Violation::UnknownChannelSource(key.clone()));
        }
        if let Endpoint::Host(t) = &c.target {
            if !hosts.contains(t) {
                out.insert(Violation::UnknownChannelTarget(key.clone()));
            }
            if t == &c.source {
                out.insert(Violation::SelfChannel(key.clone()));
            }
        }
        if c.weight.is_zero() {
            out.insert(Violation::ZeroChannelWeight(key.clone()));
        }
        if !channels.insert(key.clone()) {
            out.insert(Violation::DuplicateChannel(key));
        }
    }

    let mut edges = HashSet::new();
    for e in &m.instruction_edges {
        if !instructions.contains(&e.source) || !instructions.contains(&e.target) {
            out.insert(Violation::UnknownEdgeEndpoint {
                source: e.source.clone(),
                target: e.target.clone(),
            });
        }
        if e.weight != 1 && e.weight != 2 {
            out.insert(Violation::BadEdgeWeight {
                source: e.source.clone(),
                target: e.target.clone(),
                weight: e.weight,
            });
        }
        if !edges.insert((&e.source, &e.target)) {
            out.insert(Violation::DuplicateEdge {
                source: e.source.clone(),
                target: e.target.clone(),
            });
        }
    }

    let mut attached: HashMap<&InstructionId, usize> = HashMap::new();
    for a in &m.attachments {
        if !instructions.contains(&a.instruction) {
            out.insert(Violation::UnknownAttachedInstruction(a.instruction.clone()));
        }
        if !channels.contains(&a.channel) {
            out.insert(Violation::UnknownAttachedChannel {
                instruction: a.instruction.clone(),
                channel: a.channel.clone(),
            });
        }
        *attached.entry(&a.instruction).or_default() += 1;
    }
    for (i, n) in attached {
        if n > 1 {
            out.insert(Violation::MultipleAttachments(i.clone()));
        }
    }

    ValidationReport {
        violations: out.into_iter().collect(),
    }
}

/// Next-instruction slot of a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Next {
    /// Index into the machine's instruction list.
    At(usize),
    Halt,
}

/// `(a_1, ..., a_p, u_t, a_0)` plus the instant `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration<C> {
    /// Per-host counts in host declaration order.
    pub hosts: Vec<C>,
    pub next: Next,
    pub env: C,
    pub step: usize,
}

impl<C: Count> Configuration<C> {
    pub fn new(hosts: Vec<C>, next: Next, env: C, step: usize) -> Self {
        Self { hosts, next, env, step }
    }

    pub fn is_halting(&self) -> bool {
        self.next == Next::Halt
    }

    pub fn total_viruses(&self) -> Option<C> {
        self.hosts
            .iter()
            .try_fold(C::zero(), |acc, c| acc.checked_add(c))
    }

    pub fn max_host(&self) -> C {
        self.hosts.iter().max().cloned().unwrap_or_else(C::zero)
    }

    /// Formats as the tuple `(a_1,...,a_p,u,a_0)` using the machine's ids.
    pub fn render(&self, m: &VirusMachine<C>) -> String {
        let mut parts: Vec<String> = self.hosts.iter().map(|c| c.to_string()).collect();
        parts.push(render_next(m, self.next));
        parts.push(self.env.to_string());
        format!("({})", parts.join(","))
    }
}

pub fn render_next<C>(m: &VirusMachine<C>, next: Next) -> String {
    match next {
        Next::At(i) => m
            .instructions
            .get(i)
            .map(|id| id.to_string())
            .unwrap_or_else(|| format!("?{i}")),
        Next::Halt => "#".to_string(),
    }
}

/// `C_0 = (n_1, ..., n_p, i_1, 0)`.
pub fn initial_configuration<C: Count>(m: &VirusMachine<C>) -> Result<Configuration<C>, ModelError> {
    let report = validate_machine(m);
    if !report.is_valid() {
        return Err(ModelError::Invalid(report));
    }
    let start = m
        .instruction_index(m.initial_instruction.as_str())
        .expect("validated machine declares its initial instruction");
    Ok(Configuration {
        hosts: m.hosts.iter().map(|h| h.viruses.clone()).collect(),
        next: Next::At(start),
        env: C::zero(),
        step: 0,
    })
}

/// Incremental construction of a machine in declaration order.
#[derive(Clone, Debug)]
pub struct MachineBuilder<C> {
    machine: VirusMachine<C>,
}

impl<C: Count> MachineBuilder<C> {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            machine: VirusMachine {
                name: name.into(),
                note: None,
                hosts: Vec::new(),
                channels: Vec::new(),
                instructions: Vec::new(),
                instruction_edges: Vec::new(),
                attachments: Vec::new(),
                initial_instruction: InstructionId::new("i1"),
            },
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.machine.note = Some(note.into());
        self
    }

    pub fn host(mut self, id: &str, viruses: C) -> Self {
        self.machine.hosts.push(Host {
            id: HostId::new(id),
            viruses,
        });
        self
    }

    pub fn channel(mut self, source: &str, target: &str, weight: C) -> Self {
        self.machine.channels.push(Channel {
            source: HostId::new(source),
            target: Endpoint::parse(target),
            weight,
        });
        self
    }

    /// Declares an instruction. The first one declared becomes initial
    /// unless [`MachineBuilder::initial`] overrides it.
    pub fn instruction(mut self, id: &str) -> Self {
        if self.machine.instructions.is_empty() {
            self.machine.initial_instruction = InstructionId::new(id);
        }
        self.machine.instructions.push(InstructionId::new(id));
        self
    }

    pub fn edge(mut self, source: &str, target: &str, weight: u8) -> Self {
        self.machine.instruction_edges.push(InstructionEdge {
            source: InstructionId::new(source),
            target: InstructionId::new(target),
            weight,
        });
        self
    }

    pub fn attach(mut self, instruction: &str, source: &str, target: &str) -> Self {
        self.machine.attachments.push(Attachment {
            instruction: InstructionId::new(instruction),
            channel: ChannelKey::new(source, target),
        });
        self
    }

    pub fn initial(mut self, id: &str) -> Self {
        self.machine.initial_instruction = InstructionId::new(id);
        self
    }

    pub fn build(self) -> VirusMachine<C> {
        self.machine
    }
}
