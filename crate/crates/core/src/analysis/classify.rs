use std::fmt;

use serde::Serialize;

use super::graph::{tree_depth, Digraph};
use super::profile::IngredientProfile;
use super::{acyclic_host_bound, prune_to_rooted_tree, AnalysisError};
use crate::count::Count;
use crate::model::VirusMachine;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    Singleton,
    #[serde(rename = "NFIN")]
    Nfin,
    #[serde(rename = "NLinFIN")]
    NLinFin,
    #[serde(rename = "NCombFIN")]
    NCombFin,
    #[serde(rename = "SLIN-signature")]
    SlinSignature,
    #[serde(rename = "NRE-signature")]
    NreSignature,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Singleton => "Singleton",
            Family::Nfin => "NFIN",
            Family::NLinFin => "NLinFIN",
            Family::NCombFin => "NCombFIN",
            Family::SlinSignature => "SLIN-signature",
            Family::NreSignature => "NRE-signature",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// A sufficient condition holds: the generated set lies in the family.
    Member,
    /// The resource tuple fits a row's bounds. Informational only.
    SignatureMatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationEntry {
    pub rule: String,
    pub family: Family,
    pub verdict: Verdict,
    pub justification: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub entries: Vec<ClassificationEntry>,
}

impl ClassificationReport {
    pub fn has_member(&self, family: Family) -> bool {
        self.entries
            .iter()
            .any(|e| e.family == family && e.verdict == Verdict::Member)
    }

    pub fn matches_rule(&self, rule: &str) -> bool {
        self.entries.iter().any(|e| e.rule == rule)
    }
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let tag = match e.verdict {
                Verdict::Member => format!("member of {}", e.family),
                Verdict::SignatureMatch => format!("matches resource signature of {}", e.family),
            };
            writeln!(f, "[{}] {}: {}", e.rule, tag, e.justification)?;
        }
        Ok(())
    }
}

/// One row of the resource table. `None` is an unbounded ingredient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignatureRow {
    pub rule: &'static str,
    pub family: Family,
    /// `=` for a characterisation, `⊊` for a strict inclusion of the family.
    pub relation: &'static str,
    pub hosts: Option<u64>,
    pub instructions: Option<u64>,
    pub nvh: Option<u64>,
    pub wc: Option<u64>,
    pub outd: Option<u64>,
    pub alpha_host: Option<u64>,
    pub alpha_inst: Option<u64>,
    /// Whether the row restricts channels to a single instruction each.
    pub beta_required: bool,
}

const fn row(
    rule: &'static str,
    family: Family,
    relation: &'static str,
    b: [Option<u64>; 7],
    beta_required: bool,
) -> SignatureRow {
    SignatureRow {
        rule,
        family,
        relation,
        hosts: b[0],
        instructions: b[1],
        nvh: b[2],
        wc: b[3],
        outd: b[4],
        alpha_host: b[5],
        alpha_inst: b[6],
        beta_required,
    }
}

/// The normal-form resource table, one row per characterised family.
pub fn signature_rows() -> Vec<SignatureRow> {
    use Family::*;
    let (s, n) = (Some, None);
    vec![
        row("sig-singleton", Singleton, "=", [s(1), s(1), s(1), s(1), s(1), s(0), s(0)], true),
        row("sig-nfin-one-host", Nfin, "=", [s(1), n, n, s(1), s(1), s(0), s(0)], false),
        row("sig-nfin-one-virus", Nfin, "=", [n, n, s(1), n, s(1), s(0), s(0)], true),
        row("sig-nfin-two-host-tree-inst", Nfin, "=", [s(2), n, s(2), s(2), s(2), s(2), s(0)], false),
        row("sig-nfin-strict-two-host", Nfin, "⊊", [s(2), n, s(2), s(2), s(2), s(2), s(3)], false),
        row("sig-slin-bijective", SlinSignature, "=", [n, n, s(2), n, s(2), s(2), s(3)], true),
        row("sig-slin-two-host", SlinSignature, "=", [s(2), n, s(2), s(2), s(2), s(2), n], false),
        row("sig-nre-weight-two", NreSignature, "=", [n, n, n, s(2), n, n, n], false),
    ]
}

fn fits<C: Count>(row: &SignatureRow, p: &IngredientProfile<C>) -> Option<String> {
    let within = |bound: Option<u64>, value: u64| bound.is_none_or(|b| value <= b);
    if row.beta_required && !p.beta {
        return None;
    }
    let nvh_note = match (&p.nvh_r, row.nvh) {
        (_, None) => String::new(),
        (None, Some(_)) => return None,
        (Some(o), Some(b)) => {
            if o.value.to_u64().is_none_or(|v| v > b) {
                return None;
            }
            if o.exact {
                String::new()
            } else {
                " (nvh observed within exploration bounds only)".into()
            }
        }
    };
    let wc = p.wc_s.to_u64().unwrap_or(u64::MAX);
    let ok = within(row.hosts, p.hosts_p as u64)
        && within(row.instructions, p.instructions_q as u64)
        && within(row.wc, wc)
        && within(row.outd, p.outd_t as u64)
        && within(row.alpha_host, p.alpha_host_u as u64)
        && within(row.alpha_inst, p.alpha_inst_v as u64);
    ok.then_some(nvh_note)
}

/// Applies the sufficient conditions for finiteness, singleton and small
/// instruction-count families, then lists every resource row the profile fits.
/// Never claims membership that would require deciding infinite behaviour.
pub fn classify<C: Count>(m: &VirusMachine<C>, profile: &IngredientProfile<C>) -> ClassificationReport {
    let mut entries = Vec::new();
    let mut member = |rule: &str, family: Family, justification: String| {
        entries.push(ClassificationEntry {
            rule: rule.into(),
            family,
            verdict: Verdict::Member,
            justification,
        })
    };

    match acyclic_host_bound(m) {
        Ok(bound) => member(
            "host-graph-acyclic",
            Family::Nfin,
            format!("host graph is acyclic; every generated number is at most {bound}"),
        ),
        Err(AnalysisError::Overflow) => member(
            "host-graph-acyclic",
            Family::Nfin,
            "host graph is acyclic; the output bound exceeds the count width".into(),
        ),
        Err(_) => {}
    }

    let pruned = prune_to_rooted_tree(m).ok();
    let reachable = pruned.as_ref().map(|p| p.instruction_count());
    if let Some(pruned) = &pruned {
        let g = Digraph::instruction_graph(pruned);
        let root = pruned
            .instruction_index(pruned.initial_instruction.as_str())
            .expect("pruned machine keeps its root");
        if let Ok(depth) = tree_depth(&g, root) {
            member(
                "instruction-tree-halts",
                Family::Nfin,
                format!(
                    "reachable instruction graph is a tree of depth {depth}; every computation halts within {} transitions",
                    depth + 1
                ),
            );
        }
    }

    match reachable {
        Some(1) => member(
            "one-reachable-instruction",
            Family::Singleton,
            "a single reachable instruction runs once or loops forever".into(),
        ),
        Some(2) => member(
            "two-reachable-instructions",
            Family::NLinFin,
            "two reachable instructions generate a finite linear progression".into(),
        ),
        Some(3) => member(
            "three-reachable-instructions",
            Family::NCombFin,
            "three reachable instructions generate a finite linear combination".into(),
        ),
        _ => {}
    }
    if profile.hosts_p == 1 {
        if let Some(o) = &profile.nvh_r {
            if o.exact && o.value == C::one() {
                member(
                    "one-host-one-virus",
                    Family::Singleton,
                    "one host that never holds more than one virus emits at most one channel weight".into(),
                );
            }
        }
    }

    for r in signature_rows() {
        if let Some(note) = fits(&r, profile) {
            entries.push(ClassificationEntry {
                rule: r.rule.into(),
                family: r.family,
                verdict: Verdict::SignatureMatch,
                justification: format!("profile fits the {} {} row{}", r.relation, r.family, note),
            });
        }
    }

    ClassificationReport { entries }
}
