//! Parsing of `vm build <kind> <args...>`.

use virus_machine::constructions::{build_finite_one_host, build_finite_one_virus, build_example, SetSpec};
use virus_machine::Machine;

use crate::Failure;

pub const KINDS: &str = "singleton, finite, one-host, one-virus, nat, example, lin-fin, comb-a, comb-b, arith, union";

fn arity(kind: &str, args: &[String], n: usize, usage: &str) -> Result<(), Failure> {
    if args.len() == n {
        Ok(())
    } else {
        Err(Failure::Usage(format!("usage: vm build {kind} {usage}")))
    }
}

fn int(s: &str) -> Result<u64, Failure> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("expected a nonnegative integer, got {s:?}")))
}

fn ints(args: &[String]) -> Result<Vec<u64>, Failure> {
    args.iter().map(|a| int(a)).collect()
}

fn list(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(int).collect()
}

/// `2:3,5:1` into `[(2, 3), (5, 1)]`.
fn pairs(s: &str) -> Result<Vec<(u64, u64)>, Failure> {
    s.split(',')
        .map(|p| {
            let (n, r) = p
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("expected n:r, got {p:?}")))?;
            Ok((int(n)?, int(r)?))
        })
        .collect()
}

pub fn build(kind: &str, args: &[String]) -> Result<Machine, Failure> {
    let spec = match kind {
        "singleton" => {
            arity(kind, args, 1, "<v>")?;
            SetSpec::Singleton(int(&args[0])?)
        }
        "finite" => {
            arity(kind, args, 1, "<m1,m2,...>")?;
            SetSpec::FiniteSet(list(&args[0])?)
        }
        "one-host" => {
            arity(kind, args, 1, "<m1,m2,...>")?;
            return Ok(build_finite_one_host(&list(&args[0])?)?);
        }
        "one-virus" => {
            arity(kind, args, 1, "<m1,m2,...>")?;
            return Ok(build_finite_one_virus(&list(&args[0])?)?);
        }
        "nat" => {
            arity(kind, args, 0, "")?;
            SetSpec::Nat
        }
        "example" => {
            arity(kind, args, 0, "")?;
            return Ok(build_example());
        }
        "lin-fin" => {
            arity(kind, args, 3, "<x> <n> <N>")?;
            let v = ints(args)?;
            SetSpec::LinFin { x: v[0], n: v[1], count: v[2] }
        }
        "comb-a" | "comb-b" => {
            arity(kind, args, 5, "<w1> <w2> <r> <N1> <N2>")?;
            let v = ints(args)?;
            let (w1, w2, r, n1, n2) = (v[0], v[1], v[2], v[3], v[4]);
            if kind == "comb-a" {
                SetSpec::CombA { w1, w2, r, n1, n2 }
            } else {
                SetSpec::CombB { w1, w2, r, n1, n2 }
            }
        }
        "arith" => {
            arity(kind, args, 2, "<n> <r>")?;
            SetSpec::Arith { n: int(&args[0])?, r: int(&args[1])? }
        }
        "union" => {
            arity(kind, args, 1, "<n:r,n:r,...>")?;
            SetSpec::Union(pairs(&args[0])?)
        }
        other => {
            return Err(Failure::Domain(anyhow::anyhow!(
                "unknown construction {other:?}; known: {KINDS}"
            )))
        }
    };
    Ok(spec.build()?)
}
