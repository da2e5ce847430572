//! JSON machine documents and DOT export.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::count::Count;
use crate::model::{
    validate_machine, Attachment, Channel, ChannelKey, Endpoint, Host, HostId, InstructionEdge, InstructionId,
    ValidationReport, VirusMachine, ENVIRONMENT,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed machine document at line {line}, column {column}: {message}")]
    Malformed { line: usize, column: usize, message: String },
    #[error("invalid machine:\n{0}")]
    Invalid(ValidationReport),
    #[error("{field} = {value} does not fit the count type")]
    CountRange { field: String, value: u64 },
    #[error("{field} = {value} does not fit in a 64-bit document count")]
    Unrepresentable { field: String, value: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HostEntry {
    pub id: String,
    pub viruses: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelEntry {
    pub from: String,
    pub to: String,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub from: String,
    pub to: String,
    pub weight: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelRef {
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttachmentEntry {
    pub instruction: String,
    pub channel: ChannelRef,
}

/// On-disk machine description. Field order is the serialization order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineDocument {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub hosts: Vec<HostEntry>,
    pub channels: Vec<ChannelEntry>,
    pub instructions: Vec<String>,
    pub instruction_edges: Vec<EdgeEntry>,
    pub attachments: Vec<AttachmentEntry>,
    pub initial_instruction: String,
}

impl MachineDocument {
    pub fn from_machine<C: Count>(m: &VirusMachine<C>) -> Result<Self, IoError> {
        let wide = |field: String, v: &C| {
            v.to_u64().ok_or_else(|| IoError::Unrepresentable {
                field,
                value: v.to_string(),
            })
        };
        Ok(Self {
            name: m.name.clone(),
            note: m.note.clone(),
            hosts: m
                .hosts
                .iter()
                .map(|h| {
                    Ok(HostEntry {
                        id: h.id.to_string(),
                        viruses: wide(format!("hosts.{}.viruses", h.id), &h.viruses)?,
                    })
                })
                .collect::<Result<_, IoError>>()?,
            channels: m
                .channels
                .iter()
                .map(|c| {
                    Ok(ChannelEntry {
                        from: c.source.to_string(),
                        to: c.target.to_string(),
                        weight: wide(format!("channels.{}.weight", c.key()), &c.weight)?,
                    })
                })
                .collect::<Result<_, IoError>>()?,
            instructions: m.instructions.iter().map(|i| i.to_string()).collect(),
            instruction_edges: m
                .instruction_edges
                .iter()
                .map(|e| EdgeEntry {
                    from: e.source.to_string(),
                    to: e.target.to_string(),
                    weight: e.weight,
                })
                .collect(),
            attachments: m
                .attachments
                .iter()
                .map(|a| AttachmentEntry {
                    instruction: a.instruction.to_string(),
                    channel: ChannelRef {
                        from: a.channel.source.to_string(),
                        to: a.channel.target.to_string(),
                    },
                })
                .collect(),
            initial_instruction: m.initial_instruction.to_string(),
        })
    }

    /// Converts without validating.
    pub fn to_machine<C: Count>(&self) -> Result<VirusMachine<C>, IoError> {
        let narrow = |field: String, v: u64| C::from_u64(v).ok_or(IoError::CountRange { field, value: v });
        Ok(VirusMachine {
            name: self.name.clone(),
            note: self.note.clone(),
            hosts: self
                .hosts
                .iter()
                .map(|h| {
                    Ok(Host {
                        id: HostId::new(&h.id),
                        viruses: narrow(format!("hosts.{}.viruses", h.id), h.viruses)?,
                    })
                })
                .collect::<Result<_, IoError>>()?,
            channels: self
                .channels
                .iter()
                .map(|c| {
                    Ok(Channel {
                        source: HostId::new(&c.from),
                        target: Endpoint::parse(&c.to),
                        weight: narrow(format!("channels.({},{}).weight", c.from, c.to), c.weight)?,
                    })
                })
                .collect::<Result<_, IoError>>()?,
            instructions: self.instructions.iter().map(InstructionId::new).collect(),
            instruction_edges: self
                .instruction_edges
                .iter()
                .map(|e| InstructionEdge {
                    source: InstructionId::new(&e.from),
                    target: InstructionId::new(&e.to),
                    weight: e.weight,
                })
                .collect(),
            attachments: self
                .attachments
                .iter()
                .map(|a| Attachment {
                    instruction: InstructionId::new(&a.instruction),
                    channel: ChannelKey::new(HostId::new(&a.channel.from), Endpoint::parse(&a.channel.to)),
                })
                .collect(),
            initial_instruction: InstructionId::new(&self.initial_instruction),
        })
    }
}

/// Parses and validates a machine document.
pub fn parse_machine<C: Count>(text: &str) -> Result<VirusMachine<C>, IoError> {
    let doc: MachineDocument = serde_json::from_str(text).map_err(|e| IoError::Malformed {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let m = doc.to_machine()?;
    let report = validate_machine(&m);
    if report.is_valid() {
        Ok(m)
    } else {
        Err(IoError::Invalid(report))
    }
}

/// Pretty JSON in declaration order, newline-terminated.
pub fn serialize_machine<C: Count>(m: &VirusMachine<C>) -> Result<String, IoError> {
    let doc = MachineDocument::from_machine(m)?;
    let mut out = serde_json::to_string_pretty(&doc).expect("documents always serialize");
    out.push('\n');
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DotLayer {
    Host,
    Instruction,
    Combined,
}

impl FromStr for DotLayer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "host" => Ok(DotLayer::Host),
            "instruction" => Ok(DotLayer::Instruction),
            "combined" => Ok(DotLayer::Combined),
            other => Err(format!("unknown layer {other:?}; expected host, instruction or combined")),
        }
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn weight_attr(w: &str) -> String {
    if w == "1" {
        String::new()
    } else {
        format!(" [label={}]", quote(w))
    }
}

fn host_nodes<C: Count>(out: &mut String, m: &VirusMachine<C>) {
    for h in &m.hosts {
        let label = format!("{}\\n{}", h.id, h.viruses);
        let _ = writeln!(out, "  {} [shape=box, label=\"{}\"];", quote(h.id.as_str()), label);
    }
    if m.channels.iter().any(|c| c.target == Endpoint::Environment) {
        let _ = writeln!(out, "  {} [shape=ellipse, peripheries=2];", quote(ENVIRONMENT));
    }
}

fn instruction_nodes<C: Count>(out: &mut String, m: &VirusMachine<C>) {
    for i in &m.instructions {
        let extra = if *i == m.initial_instruction { ", style=bold" } else { "" };
        let _ = writeln!(out, "  {} [shape=circle{}];", quote(i.as_str()), extra);
    }
    for e in &m.instruction_edges {
        let _ = writeln!(
            out,
            "  {} -> {}{};",
            quote(e.source.as_str()),
            quote(e.target.as_str()),
            weight_attr(&e.weight.to_string())
        );
    }
}

/// DOT text for one layer. Weight-1 labels are omitted.
pub fn export_dot<C: Count>(m: &VirusMachine<C>, layer: DotLayer) -> String {
    let mut out = format!("digraph {} {{\n", quote(&m.name));
    match layer {
        DotLayer::Host => {
            host_nodes(&mut out, m);
            for c in &m.channels {
                let _ = writeln!(
                    out,
                    "  {} -> {}{};",
                    quote(c.source.as_str()),
                    quote(c.target.as_str()),
                    weight_attr(&c.weight.to_string())
                );
            }
        }
        DotLayer::Instruction => instruction_nodes(&mut out, m),
        DotLayer::Combined => {
            host_nodes(&mut out, m);
            instruction_nodes(&mut out, m);
            // each channel passes through a point node so attachments can target it
            for (k, c) in m.channels.iter().enumerate() {
                let mid = quote(&format!("c{k}"));
                let _ = writeln!(out, "  {mid} [shape=point];");
                let _ = writeln!(out, "  {} -> {mid} [arrowhead=none];", quote(c.source.as_str()));
                let _ = writeln!(out, "  {mid} -> {}{};", quote(c.target.as_str()), weight_attr(&c.weight.to_string()));
            }
            for a in &m.attachments {
                if let Some(k) = m.channels.iter().position(|c| c.key() == a.channel) {
                    let _ = writeln!(
                        out,
                        "  {} -> {} [style=dashed, color=red, arrowhead=none];",
                        quote(a.instruction.as_str()),
                        quote(&format!("c{k}"))
                    );
                }
            }
        }
    }
    out.push_str("}\n");
    out
}
