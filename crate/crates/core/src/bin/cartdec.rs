use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cartdec::analysis::{six_class_classify, theorem_main_report, REPORT_SCHEMA};
use cartdec::constructions::{build, Example};
use cartdec::io::{decomposition_json, parse_decomposition, read_file, to_json, GroupFile, SystemFile};
use cartdec::normal::is_innately_transitive;
use cartdec::suites::{run_suite, Suite};
use cartdec::system::{enumerate_invariant_decompositions, system_from_decomposition, ENUMERATION_DEGREE_CAP};
use cartdec::{Error, Group, Limits, Point, Result};

#[derive(Parser, Debug)]
#[command(name = "cartdec", version, about = "Invariant Cartesian decompositions of innately transitive permutation groups")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Report file (for `construct`: a directory for the instance files).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    max_degree: Option<usize>,
    #[arg(long, global = true)]
    max_order: Option<u128>,
    /// Enable the expensive tier (Sp6(2) on 120960 points).
    #[arg(long, global = true)]
    heavy: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quotient analysis and theorem checks for an invariant decomposition.
    Analyze {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        decomp: PathBuf,
        #[arg(long, default_value_t = 0)]
        omega: Point,
    },
    /// All invariant decompositions whose parts are block systems of the plinth.
    Enumerate {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 0)]
        omega: Point,
    },
    /// Class label of a decomposition on which the group is transitive.
    Classify {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        decomp: PathBuf,
        #[arg(long, default_value_t = 0)]
        omega: Point,
    },
    /// Build one of the example groups.
    Construct {
        #[arg(long)]
        example: String,
        #[arg(long)]
        simple: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Run verification suites.
    Verify {
        #[arg(long)]
        suite: String,
    },
}

#[derive(Serialize)]
struct Config {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomp: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega: Option<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    example: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    simple: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    suite: Option<String>,
    max_degree: usize,
    max_order: String,
    heavy: bool,
    format: Format,
}

/// The envelope every run writes.
#[derive(Serialize)]
struct Report {
    schema: u32,
    config: Config,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<Value>,
}

struct Outcome {
    result: Value,
    text: String,
    /// Exit code for a completed run whose checks failed.
    failed: bool,
}

fn limits(cli: &Cli) -> Limits {
    let mut l = if cli.heavy { Limits::unguarded() } else { Limits::default() };
    if let Some(d) = cli.max_degree {
        l.max_degree = d;
    }
    if let Some(o) = cli.max_order {
        l.max_order = o;
    }
    l
}

fn config(cli: &Cli, l: &Limits) -> Config {
    let path = |p: &Path| Some(p.display().to_string());
    let mut c = Config {
        command: "",
        group: None,
        decomp: None,
        omega: None,
        example: None,
        simple: None,
        k: None,
        suite: None,
        max_degree: l.max_degree,
        max_order: l.max_order.to_string(),
        heavy: cli.heavy,
        format: cli.format,
    };
    match &cli.command {
        Command::Analyze { group, decomp, omega } | Command::Classify { group, decomp, omega } => {
            c.command = if matches!(cli.command, Command::Analyze { .. }) { "analyze" } else { "classify" };
            c.group = path(group);
            c.decomp = path(decomp);
            c.omega = Some(*omega);
        }
        Command::Enumerate { group, omega } => {
            c.command = "enumerate";
            c.group = path(group);
            c.omega = Some(*omega);
        }
        Command::Construct { example, simple, k } => {
            c.command = "construct";
            c.example = Some(example.clone());
            c.simple = Some(simple.clone());
            c.k = Some(*k);
        }
        Command::Verify { suite } => {
            c.command = "verify";
            c.suite = Some(suite.clone());
        }
    }
    c
}

/// The group from a file and its plinth: the one recorded in the file, or
/// the first transitive minimal normal subgroup found.
fn load_group(path: &Path, l: &Limits) -> Result<(Group, Group)> {
    let f = GroupFile::parse(&read_file(path)?)?;
    let g = f.group()?;
    g.try_order()?;
    let m = match f.plinth_group()? {
        Some(m) => m,
        None => is_innately_transitive(&g, l)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::input("the group is not innately transitive"))?,
    };
    m.try_order()?;
    Ok((g, m))
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serialisable value")
}

fn run(cli: &Cli, l: &Limits) -> Result<Outcome> {
    match &cli.command {
        Command::Analyze { group, decomp, omega } => {
            let (g, m) = load_group(group, l)?;
            let e = parse_decomposition(&read_file(decomp)?)?;
            let r = theorem_main_report(&g, &m, *omega, &e, l)?;
            Ok(Outcome {
                result: value(&r),
                text: r.render_text(),
                failed: false,
            })
        }
        Command::Classify { group, decomp, omega } => {
            let (g, m) = load_group(group, l)?;
            let e = parse_decomposition(&read_file(decomp)?)?;
            let c = six_class_classify(&g, &m, *omega, &e, l)?;
            let text = format!("label {}\nF_0 orders {:?}\n", c.label, c.factor_sets.orders);
            Ok(Outcome {
                result: value(&c),
                text,
                failed: false,
            })
        }
        Command::Enumerate { group, omega } => {
            let (g, m) = load_group(group, l)?;
            let found = enumerate_invariant_decompositions(&g, &m, ENUMERATION_DEGREE_CAP)?;
            let mut items = Vec::new();
            let mut text = format!("{} invariant decompositions\n", found.len());
            for (i, e) in found.iter().enumerate() {
                let r = theorem_main_report(&g, &m, *omega, e, l)?;
                let sizes: Vec<usize> = e.parts().iter().map(|p| p.num_blocks()).collect();
                let labels: Vec<String> = r.labels().iter().map(|x| x.to_string()).collect();
                text.push_str(&format!("[{i}] block counts {sizes:?}  s = {}  labels {labels:?}\n", r.s));
                items.push(json!({ "decomposition": e.canonical(), "report": r }));
            }
            Ok(Outcome {
                result: json!({ "degree_cap": ENUMERATION_DEGREE_CAP, "count": found.len(), "items": items }),
                text,
                failed: false,
            })
        }
        Command::Construct { example, simple, k } => {
            let ex = Example::parse(example)?;
            if ex == Example::StrongMultiple && !cli.heavy {
                return Err(Error::limit(
                    "the strong multiple example acts on 120960 points and needs --heavy (expect several minutes)",
                ));
            }
            if cli.heavy {
                eprintln!("heavy tier enabled: the Sp6(2) instance acts on 120960 points; expect several minutes");
            }
            let inst = build(ex, simple, *k, l)?;
            let r = theorem_main_report(&inst.g, &inst.m, inst.omega, &inst.decomposition, l)?;
            let mut files = Vec::new();
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir)?;
                let name = inst.label();
                let write = |file: &str, body: String| -> Result<String> {
                    let p = dir.join(file);
                    std::fs::write(&p, body)?;
                    Ok(p.display().to_string())
                };
                files.push(write("group.json", to_json(&GroupFile::from_group(Some(&name), &inst.g, Some(&inst.m))))?);
                files.push(write("decomposition.json", decomposition_json(&inst.decomposition))?);
                let system = system_from_decomposition(&inst.m, inst.omega, &inst.decomposition)?;
                files.push(write("system.json", to_json(&SystemFile::from_system(&system)))?);
                files.push(write("report.json", to_json(&r))?);
            }
            let text = format!("{}\n{}", inst.label(), r.render_text());
            Ok(Outcome {
                result: json!({
                    "instance": inst.label(),
                    "degree": inst.g.degree(),
                    "group_order": inst.g.order().to_string(),
                    "prototype_degree": inst.prototype_degree,
                    "adjoined": inst.adjoined,
                    "catalog_row": inst.catalog_row,
                    "files": files,
                    "report": r,
                }),
                text,
                failed: false,
            })
        }
        Command::Verify { suite } => {
            let s = Suite::parse(suite)?;
            if cli.heavy {
                eprintln!("heavy tier enabled: includes Sp6(2) on 120960 points; expect several minutes");
            }
            let results = run_suite(s, cli.heavy, l)?;
            let mut text = String::new();
            for r in &results {
                for c in &r.checks {
                    let mark = if c.passed { "PASS" } else { "FAIL" };
                    text.push_str(&format!("{mark} {}: {} ({})\n", r.suite, c.name, c.detail));
                }
            }
            Ok(Outcome {
                result: value(&results),
                failed: results.iter().any(|r| !r.passed()),
                text,
            })
        }
    }
}

fn error_value(e: &Error) -> Value {
    match e {
        Error::TheoremViolation { claim, detail, witness } => json!({
            "kind": "theorem-violation",
            "claim": claim,
            "message": detail,
            "witness": witness,
        }),
        Error::Limit(m) => json!({ "kind": "resource-limit", "message": m }),
        e if e.exit_code() == 2 => json!({ "kind": "input", "message": e.to_string() }),
        e => json!({ "kind": "internal", "message": e.to_string() }),
    }
}

fn emit(cli: &Cli, body: &str) -> std::io::Result<()> {
    match (&cli.out, &cli.command) {
        (Some(p), c) if !matches!(c, Command::Construct { .. }) => std::fs::write(p, body),
        _ => std::io::stdout().write_all(body.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let l = limits(&cli);
    let cfg = config(&cli, &l);
    let (report, text, code) = match run(&cli, &l) {
        Ok(o) => {
            let status = if o.failed { "failed" } else { "ok" };
            let code = if o.failed { 1 } else { 0 };
            let r = Report {
                schema: REPORT_SCHEMA,
                config: cfg,
                status,
                result: Some(o.result),
                error: None,
            };
            (r, o.text, code)
        }
        Err(e) => {
            eprintln!("cartdec: {e}");
            let status = match e.exit_code() {
                1 => "violation",
                3 => "limit",
                _ => "input-error",
            };
            let r = Report {
                schema: REPORT_SCHEMA,
                config: cfg,
                status,
                result: None,
                error: Some(error_value(&e)),
            };
            (r, format!("{status}: {e}\n"), e.exit_code())
        }
    };
    let body = match cli.format {
        Format::Json => to_json(&report),
        Format::Text => text,
    };
    if let Err(e) = emit(&cli, &body) {
        eprintln!("cartdec: cannot write the report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
