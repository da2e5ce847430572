//! Acceptance criteria, one line per criterion. All comparisons are exact
//! integer or set equality; there is no floating-point tolerance anywhere.
//!
//! Runs without the libtest harness so every line is printed even when a
//! criterion fails. Exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use common::{chain_machine, construction_suite, random_machine, rng, with_junk, Shape};
use virus_machine::analysis::{
    acyclic_host_bound, graph::Digraph, ingredient_profile, prune_to_rooted_tree, reachable_instructions, tree_depth,
};
use virus_machine::constructions::{
    build_arith, build_comb_a, build_comb_b, build_example, build_finite_set, build_lin_fin, build_nat,
    build_singleton, build_union, comb_b_boundary, predicted_set, SetSpec,
};
use virus_machine::semantics::{
    assert_trace, brute_force_oracle, enumerate_generated_set, run_trace, ChoicePolicy, ExplorationBounds,
};
use virus_machine::{initial_configuration, Config, Machine, Next, Profile};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn set(v: &[u64]) -> BTreeSet<u64> {
    v.iter().copied().collect()
}

fn show(s: &BTreeSet<u64>) -> String {
    let items: Vec<String> = s.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn enumerate(m: &Machine, steps: usize) -> Result<virus_machine::Report, String> {
    enumerate_generated_set(m, &ExplorationBounds::steps(steps)).map_err(|e| e.to_string())
}

fn profile(m: &Machine, steps: usize) -> Result<Profile, String> {
    let r = enumerate(m, steps)?;
    ingredient_profile(m, Some(&r)).map_err(|e| e.to_string())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cfg(m: &Machine, hosts: &[u64], next: &str, env: u64, step: usize) -> Config {
    let next = if next == "#" {
        Next::Halt
    } else {
        Next::At(m.instruction_index(next).expect("declared instruction"))
    };
    Config::new(hosts.to_vec(), next, env, step)
}

/// `(profile field, claimed)` pairs with `None` for an unbounded slot.
fn compare_profile(p: &Profile, claimed: [(&str, Option<u64>); 7], beta: Option<bool>) -> Result<(), String> {
    let actual = [
        p.hosts_p as u64,
        p.instructions_q as u64,
        p.nvh_r.as_ref().map(|o| o.value).unwrap_or(u64::MAX),
        p.wc_s,
        p.outd_t as u64,
        p.alpha_host_u as u64,
        p.alpha_inst_v as u64,
    ];
    let mut bad = Vec::new();
    for ((name, want), got) in claimed.iter().zip(actual) {
        if let Some(w) = want {
            if *w != got {
                bad.push(format!("{name}={got} (claimed {w})"));
            }
        }
    }
    if let Some(b) = beta {
        if b != p.beta {
            bad.push(format!("beta={} (claimed {b})", p.beta));
        }
    }
    ensure(bad.is_empty(), || bad.join(", "))
}

fn c1_worked_example() -> Outcome {
    let m: Machine = build_example();
    let r = enumerate(&m, 10)?;
    ensure(r.numbers == set(&[2, 4]) && r.exact, || format!("enumeration gave {}", r.summary()))?;
    // configurations as listed in the worked computation
    let prefix = [
        (0, [2, 2], "i1", 0),
        (1, [1, 2], "i1", 1),
        (2, [0, 2], "i1", 2),
        (3, [0, 2], "i2", 2),
    ];
    let mut failures = Vec::new();
    for (script, tail) in [
        (0usize, [(4, [1, 1], "i3", 2), (5, [1, 1], "#", 4)]),
        (1usize, [(4, [1, 1], "i4", 2), (5, [1, 1], "#", 2)]),
    ] {
        let expect: Vec<(usize, Config)> = prefix
            .iter()
            .chain(tail.iter())
            .map(|&(t, h, n, e)| (t, cfg(&m, &h, n, e, t)))
            .collect();
        let report = assert_trace(&m, &ChoicePolicy::Scripted(vec![script]), &expect).map_err(|e| e.to_string())?;
        for x in report.mismatches {
            failures.push(format!(
                "script [{script}] C{} {}: listed {}, computed {}",
                x.step, x.field, x.expected, x.actual
            ));
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok("{2,4} exact; both traces match C0..C5 field by field".into())
}

fn c2_finite_sets() -> Outcome {
    let mut g = rng(2);
    let mut wrong_steps = std::collections::BTreeMap::new();
    for _ in 0..20 {
        let mut f: Vec<u64> = (1..=8).filter(|_| g.gen_bool(0.4)).collect();
        if f.is_empty() {
            f.push(g.gen_range(1..=8));
        }
        let m = build_finite_set(&f).map_err(|e| e.to_string())?;
        let r = enumerate(&m, 2 * 8 + 2)?;
        ensure(r.numbers == set(&f) && r.exact, || format!("F={} gave {}", show(&set(&f)), r.summary()))?;
        for &mi in &f {
            let max = *f.last().unwrap();
            // take the exit after emitting mi: ties are [chain, exit] at each odd emitter
            let script: Vec<usize> = (1..=max).filter(|&k| f.contains(&k) && k < max).map(|k| usize::from(k == mi)).collect();
            let t = run_trace(&m, &ChoicePolicy::Scripted(script), 64).map_err(|e| e.to_string())?;
            ensure(t.emitted == Some(mi), || format!("F={} trace for {mi} emitted {:?}", show(&set(&f)), t.emitted))?;
            if t.steps() as u64 != 2 * mi + 1 {
                wrong_steps.insert(mi, t.steps());
            }
        }
    }
    ensure(wrong_steps.is_empty(), || {
        let seen: Vec<String> = wrong_steps.iter().map(|(m, t)| format!("m={m}:{t}")).collect();
        format!(
            "sets exact for all 20, but traces halt after these transition counts, expected 2m+1: {}",
            seen.join(" ")
        )
    })?;
    Ok("20 random F exact; every trace halts in 2m+1 transitions".into())
}

fn c3_naturals() -> Outcome {
    let k = 25usize;
    let m: Machine = build_nat();
    let r = enumerate(&m, 3 * k + 1)?;
    let want: BTreeSet<u64> = (1..=k as u64).collect();
    ensure(r.numbers == want && !r.exact, || format!("max_steps {} gave {}", 3 * k + 1, r.summary()))?;
    let expect: Vec<(usize, Config)> = (0..=k).map(|j| (3 * j, cfg(&m, &[1, 0], "i1", j as u64, 3 * j))).collect();
    let mut script = vec![0; k];
    script.push(1);
    let report = assert_trace(&m, &ChoicePolicy::Scripted(script.clone()), &expect).map_err(|e| e.to_string())?;
    ensure(report.passed(), || format!("{:?}", report.mismatches))?;
    let t = run_trace(&m, &ChoicePolicy::Scripted(script), 200).map_err(|e| e.to_string())?;
    ensure(t.emitted == Some(k as u64 + 1) && t.steps() == 3 * (k + 1) + 1, || {
        format!("exit after the invariant emitted {:?} in {} transitions", t.emitted, t.steps())
    })?;
    Ok(format!("{{1..{k}}} at max_steps {}, exact=false; C_3j=(1,0,i1,j) for j<={k}", 3 * k + 1))
}

fn c4_singletons() -> Outcome {
    for v in [0, 1, 7, 100] {
        let m: Machine = build_singleton(v);
        let r = enumerate(&m, 2)?;
        ensure(r.numbers == set(&[v]) && r.exact, || format!("v={v} gave {}", r.summary()))?;
        let t = run_trace(&m, &ChoicePolicy::Scripted(vec![]), 2).map_err(|e| e.to_string())?;
        ensure(t.halted && t.steps() <= 2, || format!("v={v} took {} transitions", t.steps()))?;
        let p = ingredient_profile(&m, Some(&r)).map_err(|e| e.to_string())?;
        compare_profile(
            &p,
            [("p", Some(1)), ("q", Some(1)), ("r", Some(1)), ("s", None), ("t", Some(1)), ("u", Some(0)), ("v", Some(0))],
            Some(true),
        )
        .map_err(|e| format!("v={v}: {e}"))?;
        ensure(p.nvh_r.as_ref().is_some_and(|o| o.exact), || format!("v={v}: nvh not exact"))?;
    }
    Ok("v in {0,1,7,100}: {v} exact within 2 transitions; profile (T,1,1,1,.,1,0,0)".into())
}

fn c5_linear_families() -> Outcome {
    let mut g = rng(5);
    let mut deviations = Vec::new();
    for _ in 0..10 {
        let (x, n, count) = (g.gen_range(0..=5), g.gen_range(1..=4), g.gen_range(1..=5));
        let m = build_lin_fin(x, n, count).map_err(|e| e.to_string())?;
        let got = enumerate(&m, count as usize + 3)?.numbers;
        let want = predicted_set(&SetSpec::LinFin { x, n, count }, 0);
        ensure(got == want, || format!("lin-fin({x},{n},{count}) gave {} expected {}", show(&got), show(&want)))?;
    }
    for _ in 0..10 {
        let (w1, w2, r, n1, n2) = (g.gen_range(1..=3), g.gen_range(1..=3), g.gen_range(0..=3), g.gen_range(1..=4), g.gen_range(1..=4));
        let m = build_comb_a(w1, w2, r, n1, n2).map_err(|e| e.to_string())?;
        let got = enumerate(&m, (n1 + n2) as usize + 3)?.numbers;
        let want = predicted_set(&SetSpec::CombA { w1, w2, r, n1, n2 }, 0);
        ensure(got == want, || format!("comb-a({w1},{w2},{r},{n1},{n2}) gave {} expected {}", show(&got), show(&want)))?;
    }
    for _ in 0..10 {
        let (w1, w2, r, n1) = (g.gen_range(1..=3), g.gen_range(1..=3), g.gen_range(0..=3), g.gen_range(1..=4));
        let mut n2 = g.gen_range(1..=4);
        if n2 == n1 {
            n2 = n1 % 4 + 1;
        }
        let m = build_comb_b(w1, w2, r, n1, n2).map_err(|e| e.to_string())?;
        let got = enumerate(&m, 2 * (n1.max(n2) as usize + 1) + 1)?.numbers;
        let want = predicted_set(&SetSpec::CombB { w1, w2, r, n1, n2 }, 0);
        let boundary = comb_b_boundary(w1, w2, r, n1, n2);
        for v in got.symmetric_difference(&want) {
            ensure(*v == boundary, || {
                format!("comb-b({w1},{w2},{r},{n1},{n2}) deviates at {v}, not the boundary {boundary}")
            })?;
            deviations.push(format!("comb-b({w1},{w2},{r},{n1},{n2}) +{v}"));
        }
    }
    Ok(format!(
        "lin-fin and comb-a exact x10 each; comb-b deviations only at (w1+w2)min(N1,N2)+r: {}",
        deviations.join(" ")
    ))
}

fn c6_arithmetic() -> Outcome {
    let cap = 30u64;
    for (n, r) in [(1, 1), (2, 3), (3, 2)] {
        let m = build_arith(n, r).map_err(|e| e.to_string())?;
        let rep = enumerate(&m, 3 * cap as usize)?;
        let want = predicted_set(&SetSpec::Arith { n, r }, cap);
        ensure(rep.numbers == want, || format!("arith({n},{r}) gave {} expected {}", show(&rep.numbers), show(&want)))?;
        ensure(rep.observed_nvh == 2, || format!("arith({n},{r}) nvh {}", rep.observed_nvh))?;
        for loops in 1..=(cap - r) / n {
            // loops-1 returns to i1, then leave the loop
            let mut script = vec![0; loops as usize - 1];
            script.push(1);
            let t = run_trace(&m, &ChoicePolicy::Scripted(script), 4 * cap as usize).map_err(|e| e.to_string())?;
            let v = loops * n + r;
            let last = t.last();
            ensure(last.hosts == [1, 0] && last.is_halting() && last.env == v, || {
                format!("arith({n},{r}) m={loops} halted at {}", last.render(&m))
            })?;
        }
    }
    Ok(format!("(1,1),(2,3),(3,2) match {{n*i+r}} up to {cap}; nvh 2; halting (1,0,#,m*n+r)"))
}

fn c7_union() -> Outcome {
    let cap = 30u64;
    let parts = vec![(2, 3), (5, 1)];
    let m = build_union(&parts).map_err(|e| e.to_string())?;
    let rep = enumerate(&m, 3 * cap as usize + 1)?;
    let want = predicted_set(&SetSpec::Union(parts), cap);
    ensure(rep.numbers == want, || format!("gave {} expected {}", show(&rep.numbers), show(&want)))?;
    let p = ingredient_profile(&m, Some(&rep)).map_err(|e| e.to_string())?;
    ensure(p.hosts_p == 2, || format!("hosts_p {}", p.hosts_p))?;
    Ok(format!("union equals {} up to {cap}; hosts_p 2", show(&want)))
}

fn c8_invariance() -> Outcome {
    let mut g = rng(8);
    let suite = construction_suite();
    for (m, steps) in &suite {
        let aug = with_junk(m, &mut g, 3);
        let pruned = prune_to_rooted_tree(&aug).map_err(|e| e.to_string())?;
        let reach = reachable_instructions(&aug).map_err(|e| e.to_string())?;
        ensure(pruned.instruction_count() == reach.len() && reach.len() == m.instruction_count(), || {
            format!("{}: q'={} |I(i1)|={}", m.name, pruned.instruction_count(), reach.len())
        })?;
        let a = enumerate(&aug, *steps)?;
        let b = enumerate(&pruned, *steps)?;
        ensure(a == b, || format!("{}: {} vs {}", m.name, a.summary(), b.summary()))?;
    }
    Ok(format!("{} construction machines + 3 junk instructions each: reports identical", suite.len()))
}

fn c9_acyclic_bounds() -> Outcome {
    let mut g = rng(9);
    let shape = Shape {
        max_hosts: 4,
        max_instructions: 5,
        host_dag: true,
        ..Shape::default()
    };
    for k in 0..50 {
        let m = random_machine(&mut g, &shape);
        let bound = acyclic_host_bound(&m).map_err(|e| e.to_string())?;
        let r = enumerate_generated_set(&m, &ExplorationBounds { max_steps: 40, max_total_viruses: None, max_frontier: Some(20_000) })
            .map_err(|e| e.to_string())?;
        ensure(r.numbers.iter().all(|&v| v <= bound), || format!("machine {k}: {} exceeds bound {bound}", r.summary()))?;
    }
    for k in 0..20 {
        let m = chain_machine(&mut g);
        let bound = acyclic_host_bound(&m).map_err(|e| e.to_string())?;
        let r = enumerate(&m, 2_000)?;
        ensure(r.exact && r.numbers.last() == Some(&bound), || {
            format!("chain {k}: {} does not attain bound {bound}", r.summary())
        })?;
    }
    Ok("50 random DAG machines within the bound; 20 chains attain it".into())
}

fn c10_tree_halting() -> Outcome {
    let mut g = rng(10);
    let shape = Shape {
        max_instructions: 6,
        forward_instructions: true,
        ..Shape::default()
    };
    for k in 0..50 {
        let m = random_machine(&mut g, &shape);
        let pruned = prune_to_rooted_tree(&m).map_err(|e| e.to_string())?;
        let root = pruned.instruction_index(pruned.initial_instruction.as_str()).expect("root kept");
        let depth = tree_depth(&Digraph::instruction_graph(&pruned), root).map_err(|e| e.to_string())?;
        let r = enumerate(&m, depth + 1)?;
        ensure(r.exact && r.truncated_branch_count == 0, || format!("machine {k}: depth {depth} but {}", r.summary()))?;
        let o = brute_force_oracle(&m, depth + 1).map_err(|e| e.to_string())?;
        ensure(o.exact, || format!("machine {k}: a branch outlives depth+1 = {}", depth + 1))?;
        initial_configuration(&m).map_err(|e| e.to_string())?;
    }
    Ok("50 forward-only machines halt within tree_depth+1; reports exact".into())
}

fn c11_oracle() -> Outcome {
    let mut g = rng(11);
    let shape = Shape::default();
    let mut exact = 0;
    for k in 0..100 {
        let m = random_machine(&mut g, &shape);
        let a = enumerate(&m, 12)?;
        let b = brute_force_oracle(&m, 12).map_err(|e| e.to_string())?;
        ensure(a.numbers == b.numbers && a.exact == b.exact && a.observed_nvh == b.observed_nvh, || {
            format!("machine {k}: bfs {} nvh {} vs oracle {} nvh {}", a.summary(), a.observed_nvh, b.summary(), b.observed_nvh)
        })?;
        exact += usize::from(a.exact);
    }
    Ok(format!("100 random machines (<=4 instructions) agree at 12 steps; {exact} exhaustive"))
}

fn c12_profiles() -> Outcome {
    for (n, r) in [(1, 1), (2, 3), (3, 2)] {
        let p = profile(&build_arith(n, r).map_err(|e| e.to_string())?, 60)?;
        let q = 3 * (n + r);
        compare_profile(
            &p,
            [("p", Some(2)), ("q", Some(q)), ("r", Some(2)), ("s", Some(2)), ("t", Some(2)), ("u", Some(2)), ("v", Some(3 * n))],
            Some(false),
        )
        .map_err(|e| format!("arith({n},{r}): {e}"))?;
    }
    for v in [1, 5, 9] {
        let p = profile(&build_singleton(v), 3)?;
        compare_profile(
            &p,
            [("p", Some(1)), ("q", Some(1)), ("r", Some(1)), ("s", Some(v)), ("t", Some(1)), ("u", Some(0)), ("v", Some(0))],
            Some(true),
        )
        .map_err(|e| format!("singleton({v}): {e}"))?;
    }
    for f in [vec![1], vec![2, 5], vec![1, 3, 4, 8]] {
        let m = build_finite_set(&f).map_err(|e| e.to_string())?;
        let p = profile(&m, 20)?;
        // the table's beta = F leaves the slot unrestricted
        compare_profile(
            &p,
            [("p", Some(2)), ("q", None), ("r", Some(2)), ("s", Some(2)), ("t", Some(2)), ("u", Some(2)), ("v", Some(0))],
            None,
        )
        .map_err(|e| format!("finite {}: {e}", show(&set(&f))))?;
    }
    Ok("arith (F,2,3(n+r),2,2,2,2,3n), singleton (T,1,1,1,v,1,0,0), finite (.,2,*,2,2,2,2,0)".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("worked example", c1_worked_example),
        ("finite-set construction", c2_finite_sets),
        ("naturals machine", c3_naturals),
        ("singleton machines", c4_singletons),
        ("linear and combination families", c5_linear_families),
        ("arithmetic progression", c6_arithmetic),
        ("union closure", c7_union),
        ("pruning invariance", c8_invariance),
        ("acyclic host bound", c9_acyclic_bounds),
        ("tree halting", c10_tree_halting),
        ("oracle equivalence", c11_oracle),
        ("profile regression", c12_profiles),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
