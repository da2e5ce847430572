//! Random machine generators and the construction corpus shared by the
//! integration suites.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use virus_machine::constructions::{
    build_comb_a, build_comb_b, build_example, build_finite_one_host, build_finite_one_virus, build_finite_set,
    build_lin_fin, build_nat, build_singleton, build_arith, build_union,
};
use virus_machine::{Machine, MachineBuilder};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct Shape {
    pub max_hosts: usize,
    pub max_instructions: usize,
    pub max_viruses: u64,
    pub max_weight: u64,
    pub max_out_degree: usize,
    /// Channels only run from lower to higher host index (or to `h0`).
    pub host_dag: bool,
    /// Instruction edges only run from lower to higher index.
    pub forward_instructions: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Self {
            max_hosts: 3,
            max_instructions: 4,
            max_viruses: 3,
            max_weight: 3,
            max_out_degree: 3,
            host_dag: false,
            forward_instructions: false,
        }
    }
}

pub fn random_machine(rng: &mut ChaCha8Rng, shape: &Shape) -> Machine {
    let p = rng.gen_range(1..=shape.max_hosts);
    let q = rng.gen_range(1..=shape.max_instructions);
    let host = |k: usize| format!("h{}", k + 1);
    let inst = |k: usize| format!("i{}", k + 1);

    let mut b = MachineBuilder::<u64>::new("random");
    for k in 0..p {
        b = b.host(&host(k), rng.gen_range(0..=shape.max_viruses));
    }
    let mut channels: Vec<(String, String)> = Vec::new();
    for a in 0..p {
        let mut targets: Vec<String> = (0..p)
            .filter(|&t| t != a && (!shape.host_dag || t > a))
            .map(host)
            .collect();
        targets.push("h0".into());
        for t in targets {
            if rng.gen_bool(0.45) {
                b = b.channel(&host(a), &t, rng.gen_range(1..=shape.max_weight));
                channels.push((host(a), t));
            }
        }
    }
    for k in 0..q {
        b = b.instruction(&inst(k));
    }
    for k in 0..q {
        let mut pool: Vec<usize> = (0..q).filter(|&t| !shape.forward_instructions || t > k).collect();
        pool.shuffle(rng);
        let degree = rng.gen_range(0..=shape.max_out_degree.min(pool.len()));
        for &t in &pool[..degree] {
            b = b.edge(&inst(k), &inst(t), rng.gen_range(1..=2));
        }
    }
    for k in 0..q {
        if !channels.is_empty() && rng.gen_bool(0.75) {
            let (s, t) = channels.choose(rng).expect("nonempty");
            b = b.attach(&inst(k), s, t);
        }
    }
    b.build()
}

/// `h1 -> ... -> hp -> h0` with a draining program: `i_k` opens the `k`-th
/// channel and repeats (weight 2) until its host is empty, then moves on
/// (weight 1). The single computation attains the acyclic output bound.
pub fn chain_machine(rng: &mut ChaCha8Rng) -> Machine {
    let p = rng.gen_range(1..=4);
    let mut b = MachineBuilder::<u64>::new("chain");
    for k in 1..=p {
        b = b.host(&format!("h{k}"), rng.gen_range(0..=3));
    }
    for k in 1..=p {
        let target = if k == p { "h0".to_string() } else { format!("h{}", k + 1) };
        b = b.channel(&format!("h{k}"), &target, rng.gen_range(1..=3));
    }
    for k in 1..=p + 1 {
        b = b.instruction(&format!("i{k}"));
    }
    for k in 1..=p {
        b = b
            .edge(&format!("i{k}"), &format!("i{k}"), 2)
            .edge(&format!("i{k}"), &format!("i{}", k + 1), 1);
        let target = if k == p { "h0".to_string() } else { format!("h{}", k + 1) };
        b = b.attach(&format!("i{k}"), &format!("h{k}"), &target);
    }
    b.build()
}

/// Adds `count` instructions `j1..` that cannot be reached from the initial
/// instruction: their edges only leave the junk set or point into it from junk.
pub fn with_junk(m: &Machine, rng: &mut ChaCha8Rng, count: usize) -> Machine {
    let mut out = m.clone();
    let junk: Vec<String> = (1..=count).map(|k| format!("j{k}")).collect();
    let real: Vec<String> = m.instructions.iter().map(|i| i.to_string()).collect();
    let mut b = MachineBuilder::<u64>::new(out.name.clone());
    for j in &junk {
        b = b.instruction(j);
    }
    for (k, j) in junk.iter().enumerate() {
        if rng.gen_bool(0.7) {
            let t = real.choose(rng).expect("machines declare instructions");
            b = b.edge(j, t, rng.gen_range(1..=2));
        }
        if let Some(next) = junk.get(k + 1) {
            if rng.gen_bool(0.5) {
                b = b.edge(j, next, rng.gen_range(1..=2));
            }
        }
        if !m.channels.is_empty() && rng.gen_bool(0.6) {
            let c = m.channels.choose(rng).expect("nonempty").key();
            b = b.attach(j, c.source.as_str(), c.target.as_str());
        }
    }
    let extra = b.build();
    out.instructions.extend(extra.instructions);
    out.instruction_edges.extend(extra.instruction_edges);
    out.attachments.extend(extra.attachments);
    out
}

/// Every construction with an exploration depth that reaches its
/// interesting outputs.
pub fn construction_suite() -> Vec<(Machine, usize)> {
    vec![
        (build_example(), 10),
        (build_singleton(0), 3),
        (build_singleton(6), 3),
        (build_nat(), 31),
        (build_finite_set(&[1, 3, 4]).unwrap(), 12),
        (build_finite_one_host(&[2, 3]).unwrap(), 8),
        (build_finite_one_virus(&[1, 3]).unwrap(), 8),
        (build_lin_fin(2, 3, 3).unwrap(), 8),
        (build_comb_a(1, 2, 1, 2, 3).unwrap(), 9),
        (build_comb_b(2, 1, 1, 3, 1).unwrap(), 12),
        (build_arith(2, 3).unwrap(), 45),
        (build_union(&[(2, 3), (5, 1)]).unwrap(), 46),
    ]
}
