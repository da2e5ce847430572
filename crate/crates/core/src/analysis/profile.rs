use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::graph::{longest_simple_cycle, Digraph, DEFAULT_CYCLE_VERTEX_CAP};
use super::AnalysisError;
use crate::count::Count;
use crate::model::{ChannelKey, VirusMachine};
use crate::semantics::GeneratedSetReport;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NvhObservation<C> {
    pub value: C,
    /// Whether the enumeration that observed it was exhaustive.
    pub exact: bool,
}

/// Resource tuple `NVM_beta(h_p, i_q, nvh_r, wc_s, outd_t, alpha_host^u, alpha_inst^v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IngredientProfile<C> {
    /// No channel is attached to more than one instruction.
    pub beta: bool,
    pub hosts_p: usize,
    pub instructions_q: usize,
    /// `None` when no enumeration report was supplied.
    pub nvh_r: Option<NvhObservation<C>>,
    /// Largest channel weight (0 for a machine without channels).
    pub wc_s: C,
    /// Largest host out-degree, channels to the environment included.
    pub outd_t: usize,
    /// Longest simple cycle of the host graph.
    pub alpha_host_u: usize,
    /// Longest simple cycle of the instruction graph.
    pub alpha_inst_v: usize,
}

impl<C: Count> fmt::Display for IngredientProfile<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match &self.nvh_r {
            Some(o) if o.exact => format!("{} (exact)", o.value),
            Some(o) => format!("{} (observed)", o.value),
            None => "unknown".into(),
        };
        write!(
            f,
            "β={} p={} q={} r={} s={} t={} u={} v={}",
            if self.beta { "T" } else { "F" },
            self.hosts_p,
            self.instructions_q,
            r,
            self.wc_s,
            self.outd_t,
            self.alpha_host_u,
            self.alpha_inst_v
        )
    }
}

pub fn ingredient_profile<C: Count>(
    m: &VirusMachine<C>,
    enumeration: Option<&GeneratedSetReport<C>>,
) -> Result<IngredientProfile<C>, AnalysisError> {
    let mut per_channel: HashMap<&ChannelKey, usize> = HashMap::new();
    for a in &m.attachments {
        *per_channel.entry(&a.channel).or_default() += 1;
    }
    let beta = per_channel.values().all(|&n| n <= 1);

    let wc_s = m.channels.iter().map(|c| c.weight.clone()).max().unwrap_or_else(C::zero);
    let outd_t = m
        .hosts
        .iter()
        .map(|h| m.channels.iter().filter(|c| c.source == h.id).count())
        .max()
        .unwrap_or(0);

    Ok(IngredientProfile {
        beta,
        hosts_p: m.hosts.len(),
        instructions_q: m.instructions.len(),
        nvh_r: enumeration.map(|r| NvhObservation {
            value: r.observed_nvh.clone(),
            exact: r.exact,
        }),
        wc_s,
        outd_t,
        alpha_host_u: longest_simple_cycle(&Digraph::host_graph(m), DEFAULT_CYCLE_VERTEX_CAP)?,
        alpha_inst_v: longest_simple_cycle(&Digraph::instruction_graph(m), DEFAULT_CYCLE_VERTEX_CAP)?,
    })
}
