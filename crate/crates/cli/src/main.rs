//! `linrel`: JSON in, JSON out, over the linrel library.

mod commands;
mod input;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use linrel::io::{AnyMatrix, DEFAULT_RATIONALIZE_TOL};
use linrel::{Backend, GaussQ, TolerancePolicy, C64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::input::Failure;

#[derive(Parser, Debug)]
#[command(name = "linrel", version, about = "Linear relations, pH pencils and their Kronecker structure")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Relative rank tolerance of the float backend.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Principal angle tolerance for subspace comparisons.
    #[arg(long, global = true)]
    angle_tol: Option<f64>,
    /// Force the exact rational backend.
    #[arg(long, global = true)]
    exact: bool,
    /// How far a float may sit from a small-denominator rational and still count as it.
    #[arg(long, global = true, default_value_t = DEFAULT_RATIONALIZE_TOL)]
    rationalize_tol: f64,
    /// Seed for the random generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Run the command on every `*.json` file of a directory, in filename order.
    #[arg(long, global = true)]
    batch: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Pretty,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Kronecker invariants, spectrum, index and positive-realness of a pencil.
    PencilAnalyze { input: Option<String> },
    /// Operations on relations.
    RelationOp {
        #[arg(long, value_enum)]
        op: commands::RelOp,
        input: Option<String>,
        /// Second operand for product, sums and intersection.
        #[arg(long)]
        other: Option<String>,
        /// Scalar for scalar-mul: `a`, `p/q` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        scalar: Option<String>,
    },
    /// Verdicts for all three pH notions from the obstruction test and any bundled witnesses.
    ClassifyPh {
        input: Option<String>,
        #[arg(long, value_enum)]
        assume_d: Option<commands::AssumeD>,
        #[arg(long, value_enum)]
        assume_l: Option<commands::AssumeL>,
    },
    /// Check a witness for one pH notion.
    VerifyPh {
        #[arg(long, value_enum)]
        variant: commands::VariantArg,
        input: Option<String>,
    },
    /// Block decomposition of a product D L.
    Decompose { input: Option<String> },
    /// Structured quasi-Kronecker form of a maximal pair.
    QuasiKronecker { input: Option<String> },
    /// Emit a worked example or a random instance.
    CorpusGen(commands::GenArgs),
    /// Corpus commands (`corpus gen` is the same as `corpus-gen`).
    Corpus {
        #[command(subcommand)]
        sub: CorpusSub,
    },
}

#[derive(Subcommand, Debug, Clone)]
enum CorpusSub {
    Gen(commands::GenArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::PencilAnalyze { .. } => "pencil-analyze",
            Command::RelationOp { .. } => "relation-op",
            Command::ClassifyPh { .. } => "classify-ph",
            Command::VerifyPh { .. } => "verify-ph",
            Command::Decompose { .. } => "decompose",
            Command::QuasiKronecker { .. } => "quasi-kronecker",
            Command::CorpusGen(_) | Command::Corpus { .. } => "corpus-gen",
        }
    }

    fn input(&self) -> Option<&str> {
        match self {
            Command::PencilAnalyze { input }
            | Command::RelationOp { input, .. }
            | Command::ClassifyPh { input, .. }
            | Command::VerifyPh { input, .. }
            | Command::Decompose { input }
            | Command::QuasiKronecker { input } => input.as_deref(),
            Command::CorpusGen(_) | Command::Corpus { .. } => None,
        }
    }

    fn with_input(&self, path: &str) -> Command {
        let mut c = self.clone();
        match &mut c {
            Command::PencilAnalyze { input }
            | Command::RelationOp { input, .. }
            | Command::ClassifyPh { input, .. }
            | Command::VerifyPh { input, .. }
            | Command::Decompose { input }
            | Command::QuasiKronecker { input } => *input = Some(path.to_string()),
            Command::CorpusGen(_) | Command::Corpus { .. } => {}
        }
        c
    }
}

fn policy(o: &Opts) -> Result<TolerancePolicy, Failure> {
    let mut p = TolerancePolicy::default();
    let positive = |name: &str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Failure::usage(format!("--{name} must be a positive number, got {v}")))
        }
    };
    if let Some(t) = o.tol {
        p.rank_rel_tol = positive("tol", t)?;
    }
    if let Some(t) = o.angle_tol {
        p.angle_tol = positive("angle-tol", t)?;
    }
    positive("rationalize-tol", o.rationalize_tol)?;
    Ok(p)
}

/// Exact when asked for, or when every input matrix already is.
fn backend(o: &Opts, mats: &[&AnyMatrix]) -> Backend {
    if o.exact || mats.iter().all(|m| m.backend() == Backend::Exact) {
        Backend::Exact
    } else {
        Backend::Float
    }
}

fn envelope(cmd: &Command, o: &Opts, pol: &TolerancePolicy, be: Option<Backend>) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(cmd.name()));
    m.insert("backend".into(), json!(be));
    m.insert("policy".into(), json!(pol));
    m.insert("rationalize_tol".into(), json!(o.rationalize_tol));
    m.insert("seed".into(), json!(o.seed));
    m
}

/// Runs one command on one input; returns the report and its exit status.
fn run_one(cmd: &Command, o: &Opts) -> (Value, i32) {
    let pol = match policy(o) {
        Ok(p) => p,
        Err(f) => return f.report(envelope(cmd, o, &TolerancePolicy::default(), None)),
    };
    let loaded = match cmd.input() {
        Some(src) => input::load(src).map(Some),
        None => Ok(None),
    };
    let doc = match loaded {
        Ok(d) => d,
        Err(f) => return f.report(envelope(cmd, o, &pol, None)),
    };
    let result = std::panic::catch_unwind(|| dispatch(cmd, o, &pol, doc.as_ref()));
    let (be, out) = match result {
        Ok((be, r)) => (be, r),
        Err(_) => (None, Err(Failure::internal("internal error while processing this input".into()))),
    };
    let mut env = envelope(cmd, o, &pol, be);
    match out {
        Ok(v) => {
            env.insert("result".into(), v);
            (Value::Object(env), 0)
        }
        Err(f) => f.report(env),
    }
}

type Dispatched = (Option<Backend>, Result<Value, Failure>);

fn dispatch(cmd: &Command, o: &Opts, pol: &TolerancePolicy, doc: Option<&Value>) -> Dispatched {
    let prepared = match commands::Prepared::parse(cmd_kind(cmd), doc) {
        Ok(p) => p,
        Err(f) => return (None, Err(f)),
    };
    let be = backend(o, &prepared.matrices());
    let ctx = commands::Run { pol: *pol, tol: o.rationalize_tol, seed: o.seed };
    let out = match be {
        Backend::Exact => prepared.run::<GaussQ>(&ctx),
        Backend::Float => prepared.run::<C64>(&ctx),
    };
    (Some(be), out)
}

fn cmd_kind(cmd: &Command) -> commands::Kind {
    use commands::Kind;
    match cmd {
        Command::PencilAnalyze { .. } => Kind::PencilAnalyze,
        Command::RelationOp { op, other, scalar, .. } => {
            Kind::RelationOp { op: *op, other: other.clone(), scalar: scalar.clone() }
        }
        Command::ClassifyPh { assume_d, assume_l, .. } => Kind::ClassifyPh { d: *assume_d, l: *assume_l },
        Command::VerifyPh { variant, .. } => Kind::VerifyPh(*variant),
        Command::Decompose { .. } => Kind::Decompose,
        Command::QuasiKronecker { .. } => Kind::QuasiKronecker,
        Command::CorpusGen(g) | Command::Corpus { sub: CorpusSub::Gen(g) } => Kind::Gen(g.clone()),
    }
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let rd = std::fs::read_dir(dir).map_err(|e| Failure::io(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn run_batch(cmd: &Command, o: &Opts, dir: &Path) -> (Value, i32) {
    let files = if cmd.input().is_some() || matches!(cmd_kind(cmd), commands::Kind::Gen(_)) {
        Err(Failure::usage(format!("{} takes no positional input with --batch", cmd.name())))
    } else {
        json_files(dir)
    };
    let files = match files {
        Ok(f) => f,
        Err(f) => {
            let env = envelope(cmd, o, &policy(o).unwrap_or_default(), None);
            return f.report(env);
        }
    };
    let entries: Vec<(Value, i32)> = files
        .par_iter()
        .map(|p| {
            let (mut v, code) = run_one(&cmd.with_input(&p.to_string_lossy()), o);
            let name = p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            if let Value::Object(m) = &mut v {
                m.insert("file".into(), json!(name));
                m.insert("exit_code".into(), json!(code));
            }
            (v, code)
        })
        .collect();
    let code = entries.iter().map(|e| e.1).max().unwrap_or(0);
    let ok = entries.iter().filter(|e| e.1 == 0).count();
    let report = json!({
        "command": cmd.name(),
        "batch": entries.into_iter().map(|e| e.0).collect::<Vec<_>>(),
        "succeeded": ok,
        "failed": files.len() - ok,
    });
    (report, code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (report, code) = match &cli.opts.batch {
        Some(dir) => run_batch(&cli.cmd, &cli.opts, dir),
        None => run_one(&cli.cmd, &cli.opts),
    };
    if let Some(err) = report.get("error").and_then(|e| e.get("message")) {
        eprintln!("linrel: {}", err.as_str().unwrap_or_default());
    }
    let text = match cli.opts.format {
        Format::Json => serde_json::to_string(&report),
        Format::Pretty => serde_json::to_string_pretty(&report),
    };
    let mut out = std::io::stdout().lock();
    // a closed pipe downstream is not our failure
    let _ = writeln!(out, "{}", text.expect("reports are plain JSON"));
    ExitCode::from(code as u8)
}
