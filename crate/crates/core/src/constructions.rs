//! Builders for the concrete machines of the normal-form results, and the
//! closed-form sets they are expected to generate.
//!
//! Builders are generic over the count type; parameters are plain `u64`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::count::Count;
use crate::model::{MachineBuilder, VirusMachine};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("the finite set must be nonempty")]
    EmptySet,
    #[error("finite-set elements must be positive")]
    NonPositiveElement,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("a union needs at least two progressions, got {0}")]
    TooFewParts(usize),
}

/// A set family with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetSpec {
    Singleton(u64),
    FiniteSet(Vec<u64>),
    Nat,
    /// `x + n*i` for `1 <= i <= N`.
    LinFin { x: u64, n: u64, count: u64 },
    CombA { w1: u64, w2: u64, r: u64, n1: u64, n2: u64 },
    CombB { w1: u64, w2: u64, r: u64, n1: u64, n2: u64 },
    /// `n*i + r` for `i >= 1`.
    Arith { n: u64, r: u64 },
    Union(Vec<(u64, u64)>),
}

impl SetSpec {
    /// The machine built for this family.
    pub fn build<C: Count>(&self) -> Result<VirusMachine<C>, ConstructionError> {
        match self {
            SetSpec::Singleton(v) => Ok(build_singleton(*v)),
            SetSpec::FiniteSet(f) => build_finite_set(f),
            SetSpec::Nat => Ok(build_nat()),
            SetSpec::LinFin { x, n, count } => build_lin_fin(*x, *n, *count),
            SetSpec::CombA { w1, w2, r, n1, n2 } => build_comb_a(*w1, *w2, *r, *n1, *n2),
            SetSpec::CombB { w1, w2, r, n1, n2 } => build_comb_b(*w1, *w2, *r, *n1, *n2),
            SetSpec::Arith { n, r } => build_arith(*n, *r),
            SetSpec::Union(parts) => build_union(parts),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SetSpec::Nat | SetSpec::Arith { .. } | SetSpec::Union(_))
    }
}

/// The two-host, four-instruction worked example generating `{2, 4}`.
pub fn build_example<C: Count>() -> VirusMachine<C> {
    MachineBuilder::new("example")
        .note("reconstruction pinned by the worked computation; verified by exhaustive enumeration")
        .host("h1", C::of(2))
        .host("h2", C::of(2))
        .channel("h1", "h0", C::one())
        .channel("h2", "h1", C::one())
        .channel("h2", "h0", C::of(2))
        .instruction("i1")
        .instruction("i2")
        .instruction("i3")
        .instruction("i4")
        .edge("i1", "i1", 2)
        .edge("i1", "i2", 1)
        .edge("i2", "i3", 1)
        .edge("i2", "i4", 1)
        .attach("i1", "h1", "h0")
        .attach("i2", "h2", "h1")
        .attach("i3", "h2", "h0")
        .build()
}

/// One host, one virus, one instruction: generates `{v}`.
///
/// For `v = 0` the channel keeps weight 1 and the instruction is left
/// unattached, so the only computation emits nothing.
pub fn build_singleton<C: Count>(v: u64) -> VirusMachine<C> {
    let b = MachineBuilder::new(format!("singleton-{v}"))
        .host("h1", C::one())
        .channel("h1", "h0", C::of(v.max(1)))
        .instruction("i1");
    if v == 0 {
        b.build()
    } else {
        b.attach("i1", "h1", "h0").build()
    }
}

/// Two hosts with at most two viruses each; generates every positive integer.
pub fn build_nat<C: Count>() -> VirusMachine<C> {
    MachineBuilder::new("nat")
        .host("h1", C::one())
        .host("h2", C::zero())
        .channel("h1", "h2", C::of(2))
        .channel("h2", "h0", C::one())
        .channel("h2", "h1", C::one())
        .instruction("i1")
        .instruction("i2")
        .instruction("i3")
        .instruction("i4")
        .edge("i1", "i2", 1)
        .edge("i2", "i3", 1)
        .edge("i3", "i1", 1)
        .edge("i3", "i4", 1)
        .attach("i1", "h1", "h2")
        .attach("i2", "h2", "h1")
        .attach("i3", "h2", "h0")
        .build()
}

fn normalize_finite(f: &[u64]) -> Result<Vec<u64>, ConstructionError> {
    if f.is_empty() {
        return Err(ConstructionError::EmptySet);
    }
    if f.contains(&0) {
        return Err(ConstructionError::NonPositiveElement);
    }
    let set: BTreeSet<u64> = f.iter().copied().collect();
    Ok(set.into_iter().collect())
}

fn id(k: u64) -> String {
    format!("i{k}")
}

/// Two hosts, `2*max(F)` instructions, at most two viruses per host.
///
/// The viruses shuttle between `h1` and `h2` (weight 2) while odd
/// instructions emit one each; after emitting `m` the machine may jump from
/// `i_{2m-1}` to the terminal `i_{2 max F}`, which is unattached, and halts
/// after `2m + 1` transitions.
pub fn build_finite_set<C: Count>(f: &[u64]) -> Result<VirusMachine<C>, ConstructionError> {
    let f = normalize_finite(f)?;
    let top = *f.last().expect("nonempty");
    let last = 2 * top;
    let label: Vec<String> = f.iter().map(|m| m.to_string()).collect();
    let mut b = MachineBuilder::new(format!("finite-{{{}}}", label.join(",")))
        .note("terminal instruction unattached so each halting configuration keeps the invariant's host counts")
        .host("h1", C::of(2))
        .host("h2", C::zero())
        .channel("h1", "h2", C::of(2))
        .channel("h1", "h0", C::one())
        .channel("h2", "h1", C::of(2))
        .channel("h2", "h0", C::one());
    for k in 1..=last {
        b = b.instruction(&id(k));
    }
    for k in 1..last {
        b = b.edge(&id(k), &id(k + 1), 1);
    }
    for &m in &f {
        if m < top {
            b = b.edge(&id(2 * m - 1), &id(last), 1);
        }
    }
    // emitter i_{2x+1}: h1 when x is even, h2 when odd
    for x in 0..top {
        let src = if x % 2 == 0 { "h1" } else { "h2" };
        b = b.attach(&id(2 * x + 1), src, "h0");
    }
    // shuttle i_{2j}: h1 -> h2 when j is odd, h2 -> h1 when even
    for j in 1..top {
        let (s, t) = if j % 2 == 1 { ("h1", "h2") } else { ("h2", "h1") };
        b = b.attach(&id(2 * j), s, t);
    }
    Ok(b.build())
}

fn finite_chain<C: Count>(name: String, b: MachineBuilder<C>, f: &[u64], attach: impl Fn(u64) -> (String, String)) -> VirusMachine<C> {
    let top = *f.last().expect("nonempty");
    let mut b = b;
    for k in 1..=top + 1 {
        b = b.instruction(&id(k));
    }
    for k in 1..=top {
        b = b.edge(&id(k), &id(k + 1), 1);
    }
    for &m in f {
        if m < top {
            b = b.edge(&id(m), &id(top + 1), 1);
        }
    }
    for k in 1..=top {
        let (s, t) = attach(k);
        b = b.attach(&id(k), &s, &t);
    }
    let mut m = b.build();
    m.name = name;
    m
}

/// One host holding `max(F)` viruses; instruction `i_k` emits the `k`-th.
pub fn build_finite_one_host<C: Count>(f: &[u64]) -> Result<VirusMachine<C>, ConstructionError> {
    let f = normalize_finite(f)?;
    let top = *f.last().expect("nonempty");
    let b = MachineBuilder::new("")
        .note("reconstruction: one host, emitter chain with exits to an unattached terminal; verified by exhaustive enumeration")
        .host("h1", C::of(top))
        .channel("h1", "h0", C::one());
    let label: Vec<String> = f.iter().map(|m| m.to_string()).collect();
    Ok(finite_chain(format!("finite-one-host-{{{}}}", label.join(",")), b, &f, |_| {
        ("h1".into(), "h0".into())
    }))
}

/// `max(F)` hosts with one virus each; instruction `i_k` empties host `h_k`.
pub fn build_finite_one_virus<C: Count>(f: &[u64]) -> Result<VirusMachine<C>, ConstructionError> {
    let f = normalize_finite(f)?;
    let top = *f.last().expect("nonempty");
    let mut b = MachineBuilder::new("")
        .note("reconstruction: one virus per host, emitter chain with exits to an unattached terminal; verified by exhaustive enumeration");
    for k in 1..=top {
        b = b.host(&format!("h{k}"), C::one());
    }
    for k in 1..=top {
        b = b.channel(&format!("h{k}"), "h0", C::one());
    }
    let label: Vec<String> = f.iter().map(|m| m.to_string()).collect();
    Ok(finite_chain(format!("finite-one-virus-{{{}}}", label.join(",")), b, &f, |k| {
        (format!("h{k}"), "h0".into())
    }))
}

/// Two instructions: `i1` emits `n` per firing and may repeat; `i2` emits `x`
/// once. Generates `{x + n*i : 1 <= i <= N}`.
pub fn build_lin_fin<C: Count>(x: u64, n: u64, count: u64) -> Result<VirusMachine<C>, ConstructionError> {
    if n == 0 || count == 0 {
        return Err(ConstructionError::InvalidParameter("n and N must be at least 1".into()));
    }
    let mut b = MachineBuilder::new(format!("lin-fin-{x}-{n}-{count}"))
        .host("h1", C::of(count))
        .host("h2", C::one())
        .channel("h1", "h0", C::of(n));
    if x > 0 {
        b = b.channel("h2", "h0", C::of(x));
    }
    b = b
        .instruction("i1")
        .instruction("i2")
        .edge("i1", "i1", 1)
        .edge("i1", "i2", 1)
        .attach("i1", "h1", "h0");
    if x > 0 {
        b = b.attach("i2", "h2", "h0");
    }
    Ok(b.build())
}

fn comb_common<C: Count>(name: String, w1: u64, w2: u64, r: u64, n1: u64, n2: u64) -> Result<MachineBuilder<C>, ConstructionError> {
    if w1 == 0 || w2 == 0 || n1 == 0 || n2 == 0 {
        return Err(ConstructionError::InvalidParameter("w1, w2, N1, N2 must be at least 1".into()));
    }
    let mut b = MachineBuilder::new(name)
        .host("h1", C::of(n1))
        .host("h2", C::of(n2))
        .host("h3", C::one())
        .channel("h1", "h0", C::of(w1))
        .channel("h2", "h0", C::of(w2));
    if r > 0 {
        b = b.channel("h3", "h0", C::of(r));
    }
    b = b.instruction("i1").instruction("i2").instruction("i3");
    Ok(b)
}

fn comb_attach<C: Count>(b: MachineBuilder<C>, r: u64) -> VirusMachine<C> {
    let b = b.attach("i1", "h1", "h0").attach("i2", "h2", "h0");
    if r > 0 {
        b.attach("i3", "h3", "h0").build()
    } else {
        b.build()
    }
}

/// Self-loops on `i1` and `i2`: generates `{w1*x + w2*y + r}` over
/// `1 <= x <= N1`, `1 <= y <= N2`.
pub fn build_comb_a<C: Count>(w1: u64, w2: u64, r: u64, n1: u64, n2: u64) -> Result<VirusMachine<C>, ConstructionError> {
    let b = comb_common(format!("comb-a-{w1}-{w2}-{r}-{n1}-{n2}"), w1, w2, r, n1, n2)?
        .edge("i1", "i1", 1)
        .edge("i1", "i2", 1)
        .edge("i2", "i2", 1)
        .edge("i2", "i3", 1);
    Ok(comb_attach(b, r))
}

/// A two-cycle `i1 <-> i2` with exit `i2 -> i3`: after `k` rounds the output
/// is `w1*min(k,N1) + w2*min(k,N2) + r`.
pub fn build_comb_b<C: Count>(w1: u64, w2: u64, r: u64, n1: u64, n2: u64) -> Result<VirusMachine<C>, ConstructionError> {
    let b = comb_common(format!("comb-b-{w1}-{w2}-{r}-{n1}-{n2}"), w1, w2, r, n1, n2)?
        .edge("i1", "i2", 1)
        .edge("i2", "i1", 1)
        .edge("i2", "i3", 1);
    Ok(comb_attach(b, r))
}

fn arith_block<C: Count>(mut b: MachineBuilder<C>, first: u64, n: u64, r: u64) -> MachineBuilder<C> {
    let len = 3 * (n + r);
    let at = |j: u64| id(first + j - 1);
    for j in 1..=len {
        b = b.instruction(&at(j));
    }
    for j in 1..len {
        b = b.edge(&at(j), &at(j + 1), 1);
    }
    b = b.edge(&at(3 * n), &at(1), 1);
    for j in 1..=len {
        b = match j % 3 {
            1 => b.attach(&at(j), "h1", "h2"),
            2 => b.attach(&at(j), "h2", "h0"),
            _ => b.attach(&at(j), "h2", "h1"),
        };
    }
    b
}

fn arith_hosts<C: Count>(name: String) -> MachineBuilder<C> {
    MachineBuilder::new(name)
        .note("emission channel moved to h2 and initial viruses set to (1,0) so each three-step block emits exactly one virus")
        .host("h1", C::one())
        .host("h2", C::zero())
        .channel("h1", "h2", C::of(2))
        .channel("h2", "h0", C::one())
        .channel("h2", "h1", C::one())
}

/// `3(n+r)` instructions in three-step blocks that each emit one virus; the
/// first `3n` form a loop. Generates `{n*i + r : i >= 1}`.
pub fn build_arith<C: Count>(n: u64, r: u64) -> Result<VirusMachine<C>, ConstructionError> {
    if n == 0 || r == 0 {
        return Err(ConstructionError::InvalidParameter("n and r must be at least 1".into()));
    }
    Ok(arith_block(arith_hosts(format!("arith-{n}-{r}")), 1, n, r).build())
}

/// Shares the arithmetic-progression host graph across parts; an unattached
/// initial `i0` branches into each part's block.
pub fn build_union<C: Count>(parts: &[(u64, u64)]) -> Result<VirusMachine<C>, ConstructionError> {
    if parts.len() < 2 {
        return Err(ConstructionError::TooFewParts(parts.len()));
    }
    if parts.iter().any(|&(n, r)| n == 0 || r == 0) {
        return Err(ConstructionError::InvalidParameter("n and r must be at least 1".into()));
    }
    let label: Vec<String> = parts.iter().map(|(n, r)| format!("{n}:{r}")).collect();
    let mut b = arith_hosts(format!("union-{}", label.join(","))).instruction("i0");
    let mut first = 1;
    for &(n, r) in parts {
        b = b.edge("i0", &id(first), 1);
        b = arith_block(b, first, n, r);
        first += 3 * (n + r);
    }
    Ok(b.initial("i0").build())
}

/// The element of the machine's comb-b output that the closed-form b-set
/// omits: exiting right after round `min(N1, N2)`.
pub fn comb_b_boundary(w1: u64, w2: u64, r: u64, n1: u64, n2: u64) -> u64 {
    (w1 + w2) * n1.min(n2) + r
}

fn comb_b_formula(w1: u64, w2: u64, r: u64, n1: u64, n2: u64) -> BTreeSet<u64> {
    let lo = n1.min(n2);
    let span = n1.abs_diff(n2);
    let mut out = BTreeSet::new();
    for x in 1..=lo {
        for y in 1..=span {
            let v = if x < lo {
                Some((w1 + w2) * x + r)
            } else if x == n1 && n1 < n2 {
                Some((w1 + w2) * n1 + w2 * y + r)
            } else if x == n2 && n2 < n1 {
                Some((w1 + w2) * n2 + w1 * y + r)
            } else {
                None
            };
            out.extend(v);
        }
    }
    out
}

/// Closed-form set of a family. `cap` truncates the infinite families
/// (`Nat`, `Arith`, `Union`); finite families are returned whole.
pub fn predicted_set(spec: &SetSpec, cap: u64) -> BTreeSet<u64> {
    match spec {
        SetSpec::Singleton(v) => BTreeSet::from([*v]),
        SetSpec::FiniteSet(f) => f.iter().copied().collect(),
        SetSpec::Nat => (1..=cap).collect(),
        SetSpec::LinFin { x, n, count } => (1..=*count).map(|i| x + n * i).collect(),
        SetSpec::CombA { w1, w2, r, n1, n2 } => (1..=*n1)
            .flat_map(|x| (1..=*n2).map(move |y| w1 * x + w2 * y + r))
            .collect(),
        SetSpec::CombB { w1, w2, r, n1, n2 } => comb_b_formula(*w1, *w2, *r, *n1, *n2),
        SetSpec::Arith { n, r } => (1..).map(|i| n * i + r).take_while(|v| *v <= cap).collect(),
        SetSpec::Union(parts) => parts
            .iter()
            .flat_map(|&(n, r)| predicted_set(&SetSpec::Arith { n, r }, cap))
            .collect(),
    }
}
