//! Command-line front end: diagram documents in, reports and artifacts out.
//!
//! Every report is human-readable text followed by a line `--- machine ---`
//! and a JSON block. Exit codes: 0 success, 1 negative mathematical result,
//! 2 usage, input or computation error.

pub mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use bratteli_core::diagram::{LabeledBratteliDiagram, Violation};
use bratteli_core::elliott::{decide_af_pair_isomorphic, Arrow, Decision, Seed};
use bratteli_core::interval_maps::PLMap;
use bratteli_core::k_theory::{check_map, stage_k0, supernatural_invariant};
use bratteli_core::rational::{format_fraction, parse_fraction};
use bratteli_core::spectrum::{
    check_simplicity_sufficient, count_components, incompleteness_witness, path_census, Census, WitnessOptions,
};
use bratteli_core::{IntMatrix, Q};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

pub use spec::{format_label, parse_label, parse_spec, serialize_spec, DiagramSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("parse error in field {field}: {message}")]
    Field { field: String, message: String },
    #[error("validation failed:\n{}", list(.0))]
    Invalid(Vec<Violation>),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] bratteli_core::Error),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| format!("  - {x}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Parser)]
#[command(name = "bratteli", version, about = "Exact tools for labeled Bratteli diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Diagram document (JSON)
    pub file: PathBuf,
    /// Write the artifact (or the report) here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a diagram document and list every violation
    Validate {
        file: PathBuf,
    },
    /// Graphviz rendering
    Dot {
        #[command(flatten)]
        common: Common,
    },
    /// Stage K0 groups, order units and connecting maps
    K0 {
        #[command(flatten)]
        common: Common,
        /// Number of levels to report (unrolls a repeating diagram)
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Number of path-space components at a level (zero-based step count)
    Components {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Component counts per level and a classification of periodic path classes
    Classify {
        #[command(flatten)]
        common: Common,
        /// Longest cycle in the census
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Build a diagram with an unseen spectral component
    Witness {
        #[command(flatten)]
        common: Common,
        /// Levels of the telescoped diagram
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Label descriptor for the extra map (default tent)
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long, default_value = "1/16")]
        epsilon: String,
        #[arg(long, default_value_t = 6)]
        horizon: usize,
    },
    /// Decide isomorphism of two AF diagrams by a checked intertwining
    Isomorphic {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long)]
        search_bound: Option<usize>,
        /// First K0 map as a JSON integer matrix, e.g. [[1],[2]]
        #[arg(long)]
        seed: Option<String>,
        /// One-based stage of A the seed starts from
        #[arg(long, default_value_t = 1)]
        seed_stage: usize,
        /// One-based stage of B the seed matrix lands in
        #[arg(long, default_value_t = 1)]
        seed_target: usize,
        /// Certificate file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sufficient test for simplicity of an interval diagram
    Simplicity {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1/16")]
        epsilon: String,
        #[arg(long, default_value_t = 6)]
        horizon: usize,
    },
}

/// Output of one command: stdout text, an optional file to write and the
/// exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub file: Option<(PathBuf, String)>,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, file: None, code: 0 }
    }
}

fn report(text: &str, machine: &Value) -> String {
    let mut s = String::from(text);
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s.push_str("--- machine ---\n");
    s.push_str(&serde_json::to_string_pretty(machine).expect("json value"));
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load(path: &Path) -> Result<LabeledBratteliDiagram, CliError> {
    parse_spec(&read(path)?)
}

fn fraction(flag: &str, s: &str) -> Result<Q, CliError> {
    parse_fraction(s).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn count_json(n: u128) -> Value {
    u64::try_from(n).map_or_else(|_| Value::String(n.to_string()), Value::from)
}

/// Report to stdout, or to `--out` when given.
fn emit(text: String, out: Option<PathBuf>, code: i32) -> Outcome {
    match out {
        Some(p) => Outcome {
            stdout: String::new(),
            file: Some((p, text)),
            code,
        },
        None => Outcome { stdout: text, file: None, code },
    }
}

fn one_based(flag: &str, v: usize) -> Result<usize, CliError> {
    v.checked_sub(1)
        .ok_or_else(|| CliError::Usage(format!("--{flag}: stages are numbered from 1")))
}

fn census_json(c: &Census) -> Value {
    Value::Array(
        c.entries
            .iter()
            .map(|e| {
                json!({
                    "start": e.start + 1,
                    "cycle": e.cycle.iter().map(|(t, l)| json!({"to": t + 1, "label": l})).collect::<Vec<_>>(),
                    "verdict": e.classification.verdict.to_string(),
                    "evidence": e.classification.evidence,
                })
            })
            .collect(),
    )
}

fn census_text(c: &Census, out: &mut String) {
    for e in &c.entries {
        let cycle: Vec<String> = e.cycle.iter().map(|(t, l)| format!("{l}→{}", t + 1)).collect();
        out.push_str(&format!(
            "  from summand {} via [{}]: {} ({})\n",
            e.start + 1,
            cycle.join(", "),
            e.classification.verdict,
            e.classification.evidence
        ));
    }
}

/// Executes a parsed command without touching stdout or the filesystem
/// beyond reading inputs.
pub fn execute(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Validate { file } => {
            let d = DiagramSpec::from_json(&read(&file)?)?.to_diagram_unchecked()?;
            let v = d.validate();
            let machine = json!({
                "valid": v.is_empty(),
                "violations": v.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            });
            let text = if v.is_empty() {
                format!("valid: {} levels, repeat {}\n", d.depth(), d.repeats())
            } else {
                format!("invalid:\n{}\n", list(&v))
            };
            Ok(Outcome {
                stdout: report(&text, &machine),
                file: None,
                code: if v.is_empty() { 0 } else { 1 },
            })
        }
        Command::Dot { common } => {
            let dot = load(&common.file)?.export_dot()?;
            Ok(emit(dot, common.out, 0))
        }
        Command::K0 { common, depth } => {
            let d = load(&common.file)?;
            let levels = depth.unwrap_or(d.depth());
            if levels == 0 {
                return Err(CliError::Usage("--depth must be at least 1".into()));
            }
            let d = d.unrolled(levels)?;
            let mut text = String::new();
            let mut stages = Vec::new();
            for n in 0..levels {
                let k = stage_k0(&d, n)?;
                text.push_str(&format!("K0(level {}) = Z^{}, order unit {:?}\n", n + 1, k.rank(), k.order_unit()));
                stages.push(json!({"level": n + 1, "rank": k.rank(), "order_unit": k.order_unit()}));
            }
            let mut maps = Vec::new();
            for n in 0..levels - 1 {
                let m = d.multiplicity_matrix(n)?;
                let c = check_map(&m, &stage_k0(&d, n)?, &stage_k0(&d, n + 1)?)?;
                text.push_str(&format!(
                    "level {} → {}: {} positive {} unit-preserving {}\n",
                    n + 1,
                    n + 2,
                    m,
                    c.positive,
                    c.unit_preserving
                ));
                maps.push(json!({
                    "from": n + 1,
                    "to": n + 2,
                    "matrix": m,
                    "positive": c.positive,
                    "unit_preserving": c.unit_preserving,
                }));
            }
            let mut machine = json!({"stages": stages, "maps": maps});
            if d.is_af() && d.levels().iter().all(|l| l.len() == 1) {
                let s = supernatural_invariant(&d, levels)?;
                text.push_str(&format!("supernatural number {s}\n"));
                machine["supernatural"] = Value::String(s.to_string());
            }
            Ok(emit(report(&text, &machine), common.out, 0))
        }
        Command::Components { common, depth } => {
            let d = load(&common.file)?;
            let depth = depth.unwrap_or(d.depth() - 1);
            let n = count_components(&d, depth)?;
            Ok(emit(format!("{n}\n"), common.out, 0))
        }
        Command::Classify { common, depth } => {
            let d = load(&common.file)?;
            let mut text = String::from("components per level:\n");
            let mut counts = Vec::new();
            for n in 0..d.depth() {
                let c = count_components(&d, n)?;
                text.push_str(&format!("  level {}: {c}\n", n + 1));
                counts.push(count_json(c));
            }
            let mut machine = json!({"components": counts});
            if d.repeats() {
                let census = path_census(&d, depth)?;
                text.push_str(&format!("periodic path classes (period ≤ {depth}):\n"));
                census_text(&census, &mut text);
                let verdicts: Vec<String> = census.verdicts().iter().map(|v| v.to_string()).collect();
                text.push_str(&format!("verdicts: {}\n", verdicts.join(", ")));
                machine["census"] = census_json(&census);
                machine["verdicts"] = json!(verdicts);
            } else {
                text.push_str("no repetition rule: path classes need tail data and are not classified\n");
                machine["census"] = Value::Null;
            }
            Ok(emit(report(&text, &machine), common.out, 0))
        }
        Command::Witness {
            common,
            depth,
            gamma,
            epsilon,
            horizon,
        } => {
            let d = load(&common.file)?;
            let gammas: Vec<PLMap> = match gamma {
                Some(g) => vec![parse_label(&g).map_err(|e| CliError::Usage(format!("--gamma: {e}")))?],
                None => Vec::new(),
            };
            let opts = WitnessOptions {
                levels: depth,
                gammas,
                epsilon: fraction("epsilon", &epsilon)?,
                horizon,
                ..WitnessOptions::default()
            };
            let w = incompleteness_witness(&d, &opts)?;
            let r = &w.report;
            let stages: Vec<usize> = r.stages.iter().map(|s| s + 1).collect();
            let mut text = format!(
                "telescoped stages {:?}, sizes {:?}\nlabels cover [0,1] at every layer: {}\nsimplicity (ε = {}, horizon {}): {} ({})\nall-γ path: {} ({})\n",
                stages,
                r.sizes,
                r.surjective_layers,
                r.simplicity.epsilon,
                r.simplicity.horizon,
                if r.simplicity.passed { "passed" } else { "not established" },
                r.simplicity.note,
                r.witness_path.verdict,
                r.witness_path.evidence,
            );
            let mut machine = json!({
                "stages": stages,
                "sizes": r.sizes,
                "surjective_layers": r.surjective_layers,
                "simplicity": {
                    "passed": r.simplicity.passed,
                    "levels": r.simplicity.levels.iter().map(|n| n + 1).collect::<Vec<_>>(),
                    "epsilon": r.simplicity.epsilon,
                    "horizon": r.simplicity.horizon,
                    "note": r.simplicity.note,
                },
                "witness_path": {
                    "verdict": r.witness_path.verdict.to_string(),
                    "evidence": r.witness_path.evidence,
                },
                "flagged": r.flagged,
                "summary": r.summary,
            });
            if let Some(c) = &r.input_census {
                text.push_str("input path classes:\n");
                census_text(c, &mut text);
                machine["input_census"] = census_json(c);
            }
            text.push_str(&format!("{}\n", r.summary));
            let code = if r.flagged { 0 } else { 1 };
            let spec = serialize_spec(&w.diagram);
            match common.out {
                Some(p) => {
                    text.push_str(&format!("witness diagram written to {}\n", p.display()));
                    machine["diagram_file"] = Value::String(p.display().to_string());
                    Ok(Outcome {
                        stdout: report(&text, &machine),
                        file: Some((p, spec)),
                        code,
                    })
                }
                None => {
                    machine["diagram"] = serde_json::from_str(&spec).expect("spec is json");
                    Ok(Outcome {
                        stdout: report(&text, &machine),
                        file: None,
                        code,
                    })
                }
            }
        }
        Command::Isomorphic {
            a,
            b,
            depth,
            search_bound,
            seed,
            seed_stage,
            seed_target,
            out,
        } => {
            let da = load(&a)?;
            let db = load(&b)?;
            let a_stage = one_based("seed-stage", seed_stage)?;
            let seed = match seed {
                None => Seed::Auto { a_stage },
                Some(m) => {
                    let matrix: IntMatrix = serde_json::from_str(&m)
                        .map_err(|e| CliError::Usage(format!("--seed: {e}")))?;
                    Seed::Matrix {
                        a_stage,
                        b_stage: one_based("seed-target", seed_target)?,
                        matrix,
                    }
                }
            };
            match decide_af_pair_isomorphic(&da, &db, &seed, depth, search_bound)? {
                Decision::Yes(cert) => {
                    let sa: Vec<usize> = cert.stages_a.iter().map(|s| s + 1).collect();
                    let sb: Vec<usize> = cert.stages_b.iter().map(|s| s + 1).collect();
                    let mut text = format!(
                        "isomorphic: intertwining certificate of depth {depth} verified\nA stages {sa:?}\nB stages {sb:?}\n"
                    );
                    let mut machine = json!({
                        "result": "isomorphic",
                        "depth": depth,
                        "stages_a": sa,
                        "stages_b": sb,
                    });
                    let cert_json = cert.to_json();
                    match out {
                        Some(p) => {
                            text.push_str(&format!("certificate written to {}\n", p.display()));
                            machine["certificate_file"] = Value::String(p.display().to_string());
                            Ok(Outcome {
                                stdout: report(&text, &machine),
                                file: Some((p, cert_json + "\n")),
                                code: 0,
                            })
                        }
                        None => {
                            machine["certificate"] = serde_json::from_str(&cert_json).expect("certificate is json");
                            Ok(Outcome::ok(report(&text, &machine)))
                        }
                    }
                }
                Decision::NoWitness {
                    refutation,
                    supernatural,
                } => {
                    let mut text = format!("no witness: {refutation}\n");
                    let (kind, k) = match refutation.arrow {
                        Arrow::Down(k) => ("down", k),
                        Arrow::Up(k) => ("up", k),
                    };
                    let mut machine = json!({
                        "result": "no_witness",
                        "refutation": {
                            "arrow": kind,
                            "index": k,
                            "source_stage": refutation.source_stage + 1,
                            "bound": refutation.bound,
                            "message": refutation.to_string(),
                        },
                    });
                    if let Some((sa, sb)) = supernatural {
                        let verdict = if sa == sb { "agree" } else { "differ" };
                        text.push_str(&format!("supernatural numbers: A {sa}, B {sb} ({verdict})\n"));
                        machine["supernatural"] = json!({"a": sa.to_string(), "b": sb.to_string(), "equal": sa == sb});
                    }
                    Ok(Outcome {
                        stdout: report(&text, &machine),
                        file: None,
                        code: 1,
                    })
                }
            }
        }
        Command::Simplicity {
            common,
            epsilon,
            horizon,
        } => {
            let d = load(&common.file)?;
            let r = check_simplicity_sufficient(&d, &fraction("epsilon", &epsilon)?, horizon);
            let levels: Vec<usize> = r.levels.iter().map(|n| n + 1).collect();
            let text = format!(
                "simplicity (ε = {}, horizon {}): {}\nchecked levels {:?}\n{}\n",
                format_fraction(&fraction("epsilon", &epsilon)?),
                horizon,
                if r.passed { "passed" } else { "not established" },
                levels,
                r.note
            );
            let machine = json!({
                "passed": r.passed,
                "levels": levels,
                "epsilon": r.epsilon,
                "horizon": r.horizon,
                "note": r.note,
            });
            Ok(emit(report(&text, &machine), common.out, if r.passed { 0 } else { 1 }))
        }
    }
}

/// Parses arguments, runs the command and writes any artifact. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return if code == 0 { 0 } else { 2 };
        }
    };
    let outcome = execute(cli.command).and_then(|o| {
        if let Some((path, body)) = &o.file {
            std::fs::write(path, body).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
        Ok(o)
    });
    match outcome {
        Ok(o) => {
            if stdout.write_all(o.stdout.as_bytes()).is_err() {
                return 2;
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
