//! Graph-level normal-form analysis: rooted-tree pruning, cycle statistics,
//! the ingredient profile, output bounds and family classification.

mod classify;
pub mod graph;
mod profile;

pub use classify::{classify, signature_rows, ClassificationEntry, ClassificationReport, Family, SignatureRow, Verdict};
pub use graph::{longest_simple_cycle, tree_depth, Digraph, DEFAULT_CYCLE_VERTEX_CAP};
pub use profile::{ingredient_profile, IngredientProfile, NvhObservation};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::count::Count;
use crate::model::{Endpoint, InstructionId, VirusMachine};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("graph has {vertices} vertices, above the cycle-search cap of {cap}")]
    VertexCapExceeded { vertices: usize, cap: usize },
    #[error("graph is cyclic")]
    Cyclic,
    #[error("count overflow while bounding the output")]
    Overflow,
    #[error("initial instruction {0} is not declared")]
    UnknownInitial(InstructionId),
}

fn root_index<C>(m: &VirusMachine<C>) -> Result<usize, AnalysisError> {
    m.instruction_index(m.initial_instruction.as_str())
        .ok_or_else(|| AnalysisError::UnknownInitial(m.initial_instruction.clone()))
}

/// `I(i_1)`: instructions reachable from the initial one, including it.
pub fn reachable_instructions<C: Count>(m: &VirusMachine<C>) -> Result<BTreeSet<InstructionId>, AnalysisError> {
    let mask = Digraph::instruction_graph(m).reachable_from(root_index(m)?);
    Ok(m.instructions
        .iter()
        .zip(mask)
        .filter(|(_, keep)| *keep)
        .map(|(id, _)| id.clone())
        .collect())
}

/// Restricts the instruction graph to `I(i_1)`; hosts, channels and initial
/// viruses are untouched. Computation-preserving, since unreachable
/// instructions can never be activated.
pub fn prune_to_rooted_tree<C: Count>(m: &VirusMachine<C>) -> Result<VirusMachine<C>, AnalysisError> {
    let keep = reachable_instructions(m)?;
    let mut out = m.clone();
    out.instructions.retain(|i| keep.contains(i));
    out.instruction_edges
        .retain(|e| keep.contains(&e.source) && keep.contains(&e.target));
    out.attachments.retain(|a| keep.contains(&a.instruction));
    Ok(out)
}

/// Upper bound on any generated number for an acyclic host graph.
///
/// Each host contributes its initial viruses times the largest product of
/// channel weights along any path to the environment (0 when none exists).
/// On a chain `h_1 -> ... -> h_p -> h0` this is `sum_i n_i * prod_{j>=i} w_j`.
pub fn acyclic_host_bound<C: Count>(m: &VirusMachine<C>) -> Result<C, AnalysisError> {
    let g = Digraph::host_graph(m);
    let order = g.topological_order().ok_or(AnalysisError::Cyclic)?;
    // best multiplier to reach h0, filled in reverse topological order
    let mut gain: Vec<Option<C>> = vec![None; m.hosts.len()];
    for &h in order.iter().rev() {
        let mut best: Option<C> = None;
        for c in m.channels.iter().filter(|c| c.source == m.hosts[h].id) {
            let via = match &c.target {
                Endpoint::Environment => Some(c.weight.clone()),
                Endpoint::Host(t) => {
                    let t = m.host_index(t.as_str()).expect("host graph built from declared hosts");
                    match &gain[t] {
                        Some(g) => Some(c.weight.checked_mul(g).ok_or(AnalysisError::Overflow)?),
                        None => None,
                    }
                }
            };
            if let Some(v) = via {
                if best.as_ref().is_none_or(|b| &v > b) {
                    best = Some(v);
                }
            }
        }
        gain[h] = best;
    }
    let mut total = C::zero();
    for (host, g) in m.hosts.iter().zip(gain) {
        if let Some(g) = g {
            let part = host.viruses.checked_mul(&g).ok_or(AnalysisError::Overflow)?;
            total = total.checked_add(&part).ok_or(AnalysisError::Overflow)?;
        }
    }
    Ok(total)
}
