//! The fixture suite behind `vm reproduce`: each construction is enumerated,
//! profiled and checked against its expected set and resource-table row.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::analysis::{classify, ingredient_profile, AnalysisError};
use crate::constructions::{
    build_comb_a, build_example, build_finite_one_host, build_finite_one_virus, build_finite_set, build_lin_fin,
    build_singleton, predicted_set, ConstructionError, SetSpec,
};
use crate::model::VirusMachine;
use crate::semantics::{enumerate_generated_set, ExplorationBounds, SemanticsError};

#[derive(Debug, thiserror::Error)]
pub enum ReproduceError {
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproductionRow {
    pub fixture: String,
    pub family: String,
    /// Classification rule the fixture is expected to trigger.
    pub rule: String,
    pub profile: String,
    pub generated: String,
    pub expected: String,
    pub set_ok: bool,
    pub rule_ok: bool,
}

impl ReproductionRow {
    pub fn passed(&self) -> bool {
        self.set_ok && self.rule_ok
    }
}

struct Fixture {
    label: &'static str,
    family: &'static str,
    rule: &'static str,
    machine: VirusMachine<u64>,
    steps: usize,
    expected: BTreeSet<u64>,
}

fn fixtures() -> Result<Vec<Fixture>, ConstructionError> {
    let cap = 20;
    let fx = |label, family, rule, machine, steps, expected| Fixture {
        label,
        family,
        rule,
        machine,
        steps,
        expected,
    };
    Ok(vec![
        fx("singleton 7", "Singleton", "one-host-one-virus", build_singleton(7), 3, BTreeSet::from([7])),
        fx(
            "finite one-host {2,4}",
            "NFIN",
            "sig-nfin-one-host",
            build_finite_one_host(&[2, 4])?,
            8,
            BTreeSet::from([2, 4]),
        ),
        fx(
            "finite one-virus {2,4}",
            "NFIN",
            "sig-nfin-one-virus",
            build_finite_one_virus(&[2, 4])?,
            8,
            BTreeSet::from([2, 4]),
        ),
        fx(
            "finite {1,3,5}",
            "NFIN",
            "sig-nfin-two-host-tree-inst",
            build_finite_set(&[1, 3, 5])?,
            12,
            BTreeSet::from([1, 3, 5]),
        ),
        fx(
            "example {2,4}",
            "NFIN",
            "host-graph-acyclic",
            build_example(),
            10,
            BTreeSet::from([2, 4]),
        ),
        fx(
            "lin-fin 1 2 3",
            "NLinFIN",
            "two-reachable-instructions",
            build_lin_fin(1, 2, 3)?,
            10,
            predicted_set(&SetSpec::LinFin { x: 1, n: 2, count: 3 }, 0),
        ),
        fx(
            "comb-a 1 2 1 2 2",
            "NCombFIN",
            "three-reachable-instructions",
            build_comb_a(1, 2, 1, 2, 2)?,
            8,
            predicted_set(&SetSpec::CombA { w1: 1, w2: 2, r: 1, n1: 2, n2: 2 }, 0),
        ),
        fx(
            "nat",
            "NFIN-strict",
            "sig-nfin-strict-two-host",
            SetSpec::Nat.build()?,
            3 * cap as usize + 1,
            predicted_set(&SetSpec::Nat, cap),
        ),
        fx(
            "arith 2 3",
            "SLIN",
            "sig-slin-two-host",
            SetSpec::Arith { n: 2, r: 3 }.build()?,
            3 * cap as usize,
            predicted_set(&SetSpec::Arith { n: 2, r: 3 }, cap),
        ),
        fx(
            "union 2:3,5:1",
            "SLIN",
            "sig-slin-two-host",
            SetSpec::Union(vec![(2, 3), (5, 1)]).build()?,
            3 * cap as usize + 1,
            predicted_set(&SetSpec::Union(vec![(2, 3), (5, 1)]), cap),
        ),
    ])
}

fn render_set(s: &BTreeSet<u64>) -> String {
    let items: Vec<String> = s.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

/// Runs every fixture. Infinite families are enumerated just far enough to
/// produce every element up to the cap of 20.
pub fn reproduce_suite() -> Result<Vec<ReproductionRow>, ReproduceError> {
    let mut rows = Vec::new();
    for f in fixtures()? {
        let report = enumerate_generated_set(&f.machine, &ExplorationBounds::steps(f.steps))?;
        let profile = ingredient_profile(&f.machine, Some(&report))?;
        let classes = classify(&f.machine, &profile);
        rows.push(ReproductionRow {
            fixture: f.label.into(),
            family: f.family.into(),
            rule: f.rule.into(),
            profile: profile.to_string(),
            generated: report.summary(),
            expected: render_set(&f.expected),
            set_ok: report.numbers == f.expected,
            rule_ok: classes.matches_rule(f.rule),
        });
    }
    Ok(rows)
}

/// Plain-text table of reproduction rows.
pub struct SummaryTable<'a>(pub &'a [ReproductionRow]);

impl fmt::Display for SummaryTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<24} {:<12} {:<30} {:<6} {:<6} profile",
            "fixture", "family", "rule", "set", "rule"
        )?;
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        for r in self.0 {
            writeln!(
                f,
                "{:<24} {:<12} {:<30} {:<6} {:<6} {}",
                r.fixture,
                r.family,
                r.rule,
                mark(r.set_ok),
                mark(r.rule_ok),
                r.profile
            )?;
        }
        let failed = self.0.iter().filter(|r| !r.passed()).count();
        write!(f, "{} fixtures, {} failed", self.0.len(), failed)
    }
}
