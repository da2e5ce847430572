use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use virus_machine::analysis::{classify, ingredient_profile};
use virus_machine::io::{export_dot, parse_machine, serialize_machine, DotLayer, MachineDocument};
use virus_machine::reproduce::{reproduce_suite, SummaryTable};
use virus_machine::semantics::{enumerate_generated_set, run_trace, ChoicePolicy, ExplorationBounds};
use virus_machine::{validate_machine, Machine};

mod kinds;

#[derive(Parser, Debug)]
#[command(name = "vm", version, about = "Simulate and analyse virus machines in generating mode")]
struct Cli {
    /// Machine document; `-` or absent reads stdin.
    #[arg(long, global = true)]
    machine: Option<PathBuf>,
    /// Transitions explored along each branch.
    #[arg(long, global = true, default_value_t = 10_000)]
    max_steps: usize,
    /// Extra exploration bounds, e.g. `steps=40,viruses=100,frontier=5000`.
    #[arg(long, global = true)]
    bounds: Option<String>,
    /// Default frontier cap when `--bounds` does not set one.
    #[arg(long, global = true, env = "VM_MAX_FRONTIER", hide_env_values = true)]
    max_frontier: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Layer {
    Host,
    Instruction,
    Combined,
}

impl From<Layer> for DotLayer {
    fn from(l: Layer) -> Self {
        match l {
            Layer::Host => DotLayer::Host,
            Layer::Instruction => DotLayer::Instruction,
            Layer::Combined => DotLayer::Combined,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a machine document and list every violation.
    Validate,
    /// Execute one computation.
    Run {
        /// Seed for resolving ties at random.
        #[arg(long, conflicts_with = "script")]
        seed: Option<u64>,
        /// Candidate index for each tie in turn, e.g. `0,1,0`.
        #[arg(long, value_delimiter = ',')]
        script: Option<Vec<usize>>,
    },
    /// Enumerate the generated set within the bounds.
    Enumerate,
    /// Ingredient profile and classification.
    Analyze,
    /// Write the machine document of a construction, e.g. `build arith 2 3`.
    Build {
        kind: String,
        args: Vec<String>,
    },
    /// Graphviz DOT for one layer of the machine.
    ExportDot {
        #[arg(long, value_enum, default_value_t = Layer::Combined)]
        layer: Layer,
    },
    /// Run the construction fixture suite and print a summary table.
    Reproduce,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(anyhow::Error),
}

impl<E: std::error::Error + Send + Sync + 'static> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

fn domain(msg: String) -> Failure {
    Failure::Domain(anyhow::anyhow!(msg))
}

fn read_source(path: &Option<PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
            .map_err(|e| domain(format!("cannot read {}: {e}", p.display()))),
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| domain(format!("cannot read stdin: {e}")))?;
            Ok(text)
        }
    }
}

fn load(cli: &Cli) -> Result<Machine, Failure> {
    Ok(parse_machine(&read_source(&cli.machine)?)?)
}

fn bounds(cli: &Cli) -> Result<ExplorationBounds, Failure> {
    let mut b = ExplorationBounds::steps(cli.max_steps);
    b.max_frontier = cli.max_frontier;
    if let Some(spec) = &cli.bounds {
        for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("expected key=value in --bounds, got {part:?}")))?;
            let n: u64 = value
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("--bounds {key} needs an integer, got {value:?}")))?;
            match key.trim() {
                "steps" => b.max_steps = (n as usize).max(1),
                "viruses" => b.max_total_viruses = Some(n),
                "frontier" => b.max_frontier = Some(n as usize),
                other => return Err(Failure::Usage(format!("unknown bound {other:?}; use steps, viruses or frontier"))),
            }
        }
    }
    Ok(b)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("values always serialize") + "\n"
}

/// Output text and whether the command succeeded.
fn execute(cli: &Cli) -> Result<(String, bool), Failure> {
    let text = cli.format == Format::Text;
    Ok(match &cli.command {
        Command::Validate => {
            let source = read_source(&cli.machine)?;
            let doc: MachineDocument = serde_json::from_str(&source)
                .map_err(|e| domain(format!("malformed machine document at line {}, column {}: {e}", e.line(), e.column())))?;
            let m: Machine = doc.to_machine()?;
            let report = validate_machine(&m);
            let ok = report.is_valid();
            let out = if text {
                report.to_string()
            } else {
                let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
                pretty(&json!({ "valid": ok, "violations": violations }))
            };
            (out, ok)
        }
        Command::Run { seed, script } => {
            let m = load(cli)?;
            let policy = match script {
                Some(s) => ChoicePolicy::Scripted(s.clone()),
                None => ChoicePolicy::Seeded(seed.unwrap_or(0)),
            };
            let trace = run_trace(&m, &policy, cli.max_steps)?;
            let configs: Vec<String> = trace.configurations.iter().map(|c| c.render(&m)).collect();
            let out = if text {
                let mut out = String::new();
                for (t, c) in configs.iter().enumerate() {
                    out += &format!("C{t} = {c}\n");
                }
                out += &match &trace.emitted {
                    Some(n) => format!("halted after {} transitions, generated {n}\n", trace.steps()),
                    None => format!("no halt within {} transitions\n", trace.steps()),
                };
                out
            } else {
                pretty(&json!({
                    "configurations": configs,
                    "choices": trace.choices,
                    "halted": trace.halted,
                    "emitted": trace.emitted,
                }))
            };
            (out, true)
        }
        Command::Enumerate => {
            let m = load(cli)?;
            let report = enumerate_generated_set(&m, &bounds(cli)?)?;
            let out = if text {
                format!(
                    "{}\nbranches: {} (truncated {})\nobserved nvh: {}\n",
                    report.summary(),
                    report.branch_count,
                    report.truncated_branch_count,
                    report.observed_nvh
                )
            } else {
                pretty(&serde_json::to_value(&report)?)
            };
            if !report.exact {
                eprintln!("warning: exploration bounds cut some branches; the set may be incomplete");
            }
            (out, true)
        }
        Command::Analyze => {
            let m = load(cli)?;
            let report = enumerate_generated_set(&m, &bounds(cli)?)?;
            let profile = ingredient_profile(&m, Some(&report))?;
            let classes = classify(&m, &profile);
            let out = if text {
                format!("{profile}\n{classes}")
            } else {
                pretty(&json!({ "profile": profile, "classification": classes.entries }))
            };
            (out, true)
        }
        Command::Build { kind, args } => (serialize_machine(&kinds::build(kind, args)?)?, true),
        Command::ExportDot { layer } => (export_dot(&load(cli)?, (*layer).into()), true),
        Command::Reproduce => {
            let rows = reproduce_suite()?;
            let ok = rows.iter().all(|r| r.passed());
            let out = if text {
                format!("{}\n", SummaryTable(&rows))
            } else {
                pretty(&serde_json::to_value(&rows)?)
            };
            (out, ok)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((mut out, ok)) => {
            if !out.is_empty() && !out.ends_with('\n') {
                out.push('\n');
            }
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &out).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => {
                    print!("{out}");
                    Ok(())
                }
            };
            match written {
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
                Ok(()) if ok => ExitCode::SUCCESS,
                Ok(()) => ExitCode::from(1),
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
