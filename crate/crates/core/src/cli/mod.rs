//! Command-line front end: argument parsing, dispatch and reports.

mod commands;

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::somekawa::DEFAULT_SEED;

pub const REPORT_SCHEMA: &str = "1.0.0";

pub fn report_schema_version() -> &'static str {
    REPORT_SCHEMA
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BOUND: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "kgroups",
    version,
    about = "Tame symbols, Milnor K-groups and truncated Somekawa K-groups over finite fields"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Emit the JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized sweeps (overrides the SEED environment variable).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for relation enumeration (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Record wall-clock timings in the report.
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Residue of a Milnor symbol at a place.
    Tame(TameArgs),
    /// Extended tame symbol of a point of a semi-abelian variety and a function.
    ExtendedTame(ExtendedTameArgs),
    /// Product of normed residues of a symbol over all places.
    Reciprocity(ReciprocityArgs),
    /// `K_2` of a finite field from its Steinberg presentation.
    K2Oracle(K2Args),
    /// Build a truncated Somekawa presentation from a JSON config.
    Somekawa(SomekawaArgs),
    /// Degree-zero Picard group of a curve, with an Abel check on random functions.
    Pic0(Pic0Args),
    /// Truncated Bloch group `V(E)` and the comparison with `(E, Gm)`.
    BlochV(BlochArgs),
    /// Compare the two fibers of a curve family over `A^1`.
    PhiCheck(PhiArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TameArgs {
    /// Curve literal, e.g. `P1(GF(5))` or `E(GF(5); 0,1)`.
    #[arg(long)]
    pub field: String,
    /// Place literal, e.g. `v(t)`, `v(inf)`, `v(O)`, `v(2,2)`.
    #[arg(long)]
    pub place: String,
    /// Symbol literal, e.g. `{t,1-t}`.
    #[arg(long)]
    pub symbol: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtendedTameArgs {
    #[arg(long)]
    pub field: String,
    /// Group literal over the constants, e.g. `Gm`, `Gm^2 x E(GF(5); 0,1)`.
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub place: String,
    /// Torus coordinates, comma separated.
    #[arg(long, default_value = "")]
    pub torus: String,
    /// Elliptic coordinate: `O` or `(f, g)` with function literals.
    #[arg(long)]
    pub ell: Option<String>,
    #[arg(long)]
    pub h: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReciprocityArgs {
    #[arg(long)]
    pub field: String,
    /// A symbol `{f,g}`; alternatively give `--group`, `--torus`, `--ell` and `--h`.
    #[arg(long)]
    pub symbol: Option<String>,
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long, default_value = "")]
    pub torus: String,
    #[arg(long)]
    pub ell: Option<String>,
    #[arg(long)]
    pub h: Option<String>,
    /// Largest residue degree of a place in the supports.
    #[arg(long)]
    pub bound: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct K2Args {
    #[arg(long)]
    pub q: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SomekawaArgs {
    /// Path of the JSON config.
    #[arg(long)]
    pub config: String,
    /// Also build at degree bound `d + 1` and compare.
    #[arg(long)]
    pub stabilize: bool,
    /// List the provenance of every relation row.
    #[arg(long)]
    pub rows: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Pic0Args {
    #[arg(long)]
    pub curve: String,
    /// Random functions whose divisor classes are checked.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Largest numerator/denominator degree of a random function.
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BlochArgs {
    #[arg(long)]
    pub curve: String,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Largest degree of an irreducible in the residue-relation family.
    #[arg(long)]
    pub h_bound: Option<usize>,
    #[arg(long)]
    pub stabilize: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PhiArgs {
    #[arg(long)]
    pub config: String,
    /// `u`-coefficients `c_0; c_1; ...; 1` (polynomials in `t`) of a torus hypersurface.
    #[arg(long)]
    pub coeffs: Option<String>,
    /// A regular function `p` on the elliptic curve of the first slot.
    #[arg(long)]
    pub h: Option<String>,
    /// Second slot: `const:c` or `power:e`.
    #[arg(long)]
    pub second: Option<String>,
    /// Check this many random instances instead.
    #[arg(long)]
    pub random: Option<usize>,
}

/// One asserted invariant.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl InvariantCheck {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        InvariantCheck { name: name.into(), passed, detail: detail.into() }
    }
}

/// What a command produces before it is wrapped into a report.
pub struct Outcome {
    pub config: Value,
    pub results: Value,
    pub checks: Vec<InvariantCheck>,
}

pub struct Report {
    pub json: Value,
    pub exit_code: i32,
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::DegreeOverflow { .. } | Error::FieldTooLarge { .. } => EXIT_BOUND,
        Error::Invariant(_) => EXIT_INVARIANT,
        _ => EXIT_PARSE,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code_for(e) {
        EXIT_BOUND => "bound",
        EXIT_INVARIANT => "invariant",
        _ => "input",
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Tame(_) => "tame",
        Command::ExtendedTame(_) => "extended-tame",
        Command::Reciprocity(_) => "reciprocity",
        Command::K2Oracle(_) => "k2-oracle",
        Command::Somekawa(_) => "somekawa",
        Command::Pic0(_) => "pic0",
        Command::BlochV(_) => "bloch-v",
        Command::PhiCheck(_) => "phi-check",
    }
}

fn effective_seed(g: &GlobalArgs) -> u64 {
    g.seed.or_else(|| std::env::var("SEED").ok().and_then(|s| s.trim().parse().ok())).unwrap_or(DEFAULT_SEED)
}

/// Run a parsed command and assemble its report.
pub fn run(cli: &Cli) -> Report {
    let seed = effective_seed(&cli.global);
    let start = Instant::now();
    let outcome = commands::dispatch(&cli.command, seed, cli.global.threads);
    let elapsed = start.elapsed();
    let timings = if cli.global.timings { json!({ "total_ms": elapsed.as_secs_f64() * 1e3 }) } else { json!({}) };
    let (config, results, checks, code) = match outcome {
        Ok(o) => {
            let code = if o.checks.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_INVARIANT };
            (o.config, o.results, o.checks, code)
        }
        Err((config, e)) => {
            let results = json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } });
            (config, results, Vec::new(), exit_code_for(&e))
        }
    };
    let json = json!({
        "schema": REPORT_SCHEMA,
        "command": command_name(&cli.command),
        "config": config,
        "results": results,
        "invariant_checks": checks,
        "seed": seed,
        "timings": timings,
    });
    Report { json, exit_code: code }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(inner) if !inner.is_empty() => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, indent + 1, out);
                    }
                    Value::Array(a) if a.iter().any(|e| e.is_object() || e.is_array()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(x))),
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                if x.is_object() || x.is_array() {
                    out.push_str(&format!("{pad}-\n"));
                    render(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}- {}\n", scalar(x)));
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        Value::Object(m) if m.is_empty() => "{}".into(),
        other => other.to_string(),
    }
}

/// Human-readable form of a report.
pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    let mut m = Map::new();
    for key in ["command", "results", "invariant_checks"] {
        if let Some(v) = report.get(key) {
            m.insert(key.to_string(), v.clone());
        }
    }
    if let Some(t) = report.get("timings").filter(|t| t.as_object().is_some_and(|o| !o.is_empty())) {
        m.insert("timings".into(), t.clone());
    }
    render(&Value::Object(m), 0, &mut out);
    out
}

/// Parse `args`, run, print, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let report = run(&cli);
    if cli.global.json {
        println!("{}", serde_json::to_string_pretty(&report.json).expect("serializable report"));
    } else {
        print!("{}", render_text(&report.json));
        if let Some(err) = report.json.pointer("/results/error/message") {
            eprintln!("error: {}", scalar(err));
        }
    }
    report.exit_code
}
