//! Command-line front end.
//!
//! Exit statuses for `solve` and `tree` depend only on the classification
//! of the query's tree; `check` reports the program verdict. Usage errors
//! and unreadable files exit with 64, syntax errors with 65.

mod repl;

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::engine::{
    build_tree, diagnose_program, format_answer, solve, to_dot, tree_to_json, Diagnosis, NodeId, TreeClassification,
    TreeConfig, TsldTree, Verdict, DEFAULT_DEPTH_BOUND,
};
use crate::semantics::{is_ill_typed_program, Bounds, TypeVerdict};
use crate::syntax::{parse_program, parse_query, Program, Query};

pub use repl::run_repl;

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_SYNTAX: i32 = 65;
pub const EXIT_IO: i32 = 74;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "tsld", version, about = "Typed SLD resolution with run-time type errors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a query and classify its tree.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        query: String,
    },
    /// Diagnose the program through its generic query.
    Check {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the tree of a query.
    Tree {
        #[command(flatten)]
        run: RunArgs,
        #[arg(default_value = "")]
        query: String,
    },
    /// Interactive session.
    Repl {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Program file.
    #[arg(long, short)]
    pub program: Option<PathBuf>,
    /// Maximum derivation length.
    #[arg(long, env = "TSLD_DEPTH", default_value_t = DEFAULT_DEPTH_BOUND as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub depth: u64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_answers: u64,
    /// Integers in the semantic value pool range over -N..=N.
    #[arg(long, default_value_t = Bounds::default().value_bound as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub value_bound: u64,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
    /// Also run the declarative type check.
    #[arg(long)]
    pub semantic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub program_path: Option<PathBuf>,
    pub depth_bound: usize,
    pub max_answers: usize,
    pub value_pool_bound: i64,
    pub output_format: OutputFormat,
    pub semantic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            program_path: None,
            depth_bound: DEFAULT_DEPTH_BOUND,
            max_answers: 10,
            value_pool_bound: Bounds::default().value_bound,
            output_format: OutputFormat::Text,
            semantic: false,
        }
    }
}

impl From<RunArgs> for RunConfig {
    fn from(a: RunArgs) -> Self {
        RunConfig {
            program_path: a.program,
            depth_bound: usize::try_from(a.depth).unwrap_or(usize::MAX),
            max_answers: usize::try_from(a.max_answers).unwrap_or(usize::MAX),
            value_pool_bound: i64::try_from(a.value_bound).unwrap_or(i64::MAX),
            output_format: a.format,
            semantic: a.semantic,
        }
    }
}

impl RunConfig {
    pub fn tree_config(&self) -> TreeConfig {
        TreeConfig::with_depth(self.depth_bound)
    }

    pub fn bounds(&self) -> Bounds {
        Bounds { value_bound: self.value_pool_bound, ..Bounds::default() }
    }
}

/// A failed command: message for standard error plus exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub status: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { status: EXIT_USAGE, message: message.into() }
    }
}

pub fn load_program(path: &Path) -> Result<Program, Failure> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_program(&src).map_err(|e| Failure { status: EXIT_SYNTAX, message: format!("{}:{e}", path.display()) })
}

fn program_of(config: &RunConfig) -> Result<Program, Failure> {
    match &config.program_path {
        Some(path) => load_program(path),
        None => Ok(Program::default()),
    }
}

fn query_of(text: &str) -> Result<Query, Failure> {
    parse_query(text).map_err(|e| Failure { status: EXIT_SYNTAX, message: format!("query:{e}") })
}

pub fn classification_status(c: TreeClassification) -> i32 {
    match c {
        TreeClassification::Successful => 0,
        TreeClassification::FinitelyFailed => 1,
        TreeClassification::FinitelyErroneous => 2,
        TreeClassification::DepthBounded => 3,
    }
}

pub fn verdict_status(v: Verdict) -> i32 {
    match v {
        Verdict::NoTypeError => 0,
        Verdict::TypeErrorInProgram | Verdict::TypeErrorInQuery => 2,
        Verdict::UnknownDepthBounded => 3,
    }
}

fn describe(v: Verdict) -> &'static str {
    match v {
        Verdict::TypeErrorInProgram => "type error in program",
        Verdict::TypeErrorInQuery => "type error in query",
        Verdict::NoTypeError => "no type error",
        Verdict::UnknownDepthBounded => "unknown (depth bound reached)",
    }
}

/// Output of a successful command run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub status: i32,
    pub output: String,
}

fn write_diagnosis(out: &mut String, p: &Program, d: &Diagnosis) {
    let _ = writeln!(out, "verdict: {} ({})", d.verdict, describe(d.verdict));
    if !d.blamed.is_empty() {
        let _ = writeln!(out, "blamed:");
        for id in &d.blamed {
            let text = p.clause(*id).map(|c| c.to_string()).unwrap_or_default();
            let _ = writeln!(out, "  {id}: {text}");
        }
    }
    if !d.evidence.is_empty() {
        let _ = writeln!(out, "evidence:");
        for b in &d.evidence {
            let _ = writeln!(out, "  {b}");
        }
    }
}

fn diagnosis_json(p: &Program, d: &Diagnosis) -> serde_json::Value {
    json!({
        "verdict": d.verdict,
        "query": d.query,
        "classification": d.classification,
        "blamed": d.blamed.iter().map(|id| json!({
            "clause": id,
            "text": p.clause(*id).map(|c| c.to_string()),
        })).collect::<Vec<_>>(),
        "evidence": d.evidence.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
    })
}

/// Indented outline: one line per node, prefixed by the clause of the
/// edge leading to it.
pub fn tree_outline(t: &TsldTree) -> String {
    let mut out = String::new();
    let mut stack: Vec<(NodeId, Option<String>)> = vec![(t.root(), None)];
    while let Some((id, via)) = stack.pop() {
        let node = t.node(id);
        let indent = "  ".repeat(node.depth);
        match via {
            Some(c) => {
                let _ = writeln!(out, "{indent}{c}: {}", node.kind.label());
            }
            None => {
                let _ = writeln!(out, "{}", node.kind.label());
            }
        }
        for e in node.edges.iter().rev() {
            stack.push((e.target, Some(e.clause.to_string())));
        }
    }
    out
}

fn render_tree(t: &TsldTree, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => tree_outline(t),
        OutputFormat::Json => tree_to_json(t) + "\n",
        OutputFormat::Dot => to_dot(t),
    }
}

pub fn cmd_solve(config: &RunConfig, query_text: &str) -> Result<Report, Failure> {
    let p = program_of(config)?;
    let q = query_of(query_text)?;
    let tc = config.tree_config();
    let r = solve(&p, &q, &tc, config.max_answers);
    let status = classification_status(r.classification);
    let output = match config.output_format {
        OutputFormat::Dot => to_dot(&build_tree(&p, &q, &tc)),
        OutputFormat::Json => {
            let tree = build_tree(&p, &q, &tc);
            let doc = json!({
                "query": q.to_string(),
                "answers": r.answers.iter().map(|a| {
                    a.iter().map(|(v, t)| (v.clone(), t.to_string())).collect::<std::collections::BTreeMap<_, _>>()
                }).collect::<Vec<_>>(),
                "leaves": tree.leaf_terminals(),
                "classification": r.classification,
                "diagnosis": diagnosis_json(&p, &r.diagnosis),
            });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        OutputFormat::Text => {
            let tree = build_tree(&p, &q, &tc);
            let mut out = String::new();
            let _ = writeln!(out, "query: {q}");
            if r.answers.is_empty() {
                let _ = writeln!(out, "no answers");
            } else {
                let _ = writeln!(out, "answers:");
                for a in &r.answers {
                    let _ = writeln!(out, "  {}", format_answer(a));
                }
            }
            let leaves: Vec<String> = tree.leaf_terminals().iter().map(|t| t.to_string()).collect();
            let _ = writeln!(out, "leaves: {}", leaves.join(" "));
            let _ = writeln!(out, "classification: {}", r.classification);
            write_diagnosis(&mut out, &p, &r.diagnosis);
            out
        }
    };
    Ok(Report { status, output })
}

pub fn cmd_check(config: &RunConfig) -> Result<Report, Failure> {
    if config.program_path.is_none() {
        return Err(Failure::usage("check needs --program FILE"));
    }
    let p = program_of(config)?;
    Ok(check_report(&p, config))
}

pub(crate) fn check_report(p: &Program, config: &RunConfig) -> Report {
    let d = diagnose_program(p, &config.tree_config());
    let status = verdict_status(d.verdict);
    let semantic = config.semantic.then(|| is_ill_typed_program(p, &config.bounds()));
    let output = match config.output_format {
        OutputFormat::Json | OutputFormat::Dot => {
            let mut doc = json!({ "generic_query": d.query, "diagnosis": diagnosis_json(p, &d) });
            if let Some(s) = &semantic {
                doc["semantic"] = serde_json::to_value(s).expect("serializable");
            }
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        OutputFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "generic query: {}", d.query);
            let _ = writeln!(out, "classification: {}", d.classification);
            write_diagnosis(&mut out, p, &d);
            if let Some(s) = &semantic {
                let _ = writeln!(out, "declarative: {}", s.verdict);
                if s.truncated {
                    let _ = writeln!(out, "  (a semantic enumeration bound was reached)");
                }
                if s.verdict == TypeVerdict::IllTyped {
                    if let Some(v) = &s.violation {
                        let clause = v.clause.map(|c| format!("{c}: ")).unwrap_or_default();
                        let _ = writeln!(out, "  {clause}{} is {} in a derived interpretation", v.expression, v.value);
                    }
                }
            }
            out
        }
    };
    Report { status, output }
}

pub fn cmd_tree(config: &RunConfig, query_text: &str) -> Result<Report, Failure> {
    let p = program_of(config)?;
    let q = query_of(query_text)?;
    let tree = build_tree(&p, &q, &config.tree_config());
    let status = classification_status(crate::engine::classify(&tree));
    Ok(Report { status, output: render_tree(&tree, config.output_format) })
}

/// Parses `args` (program name first) and runs the command, reading the
/// REPL session from `input`. Returns the exit status.
pub fn run<I, T, R, W, E>(args: I, input: R, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    R: BufRead,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Solve { run, query } => cmd_solve(&run.into(), &query),
        Command::Check { run } => cmd_check(&run.into()),
        Command::Tree { run, query } => cmd_tree(&run.into(), &query),
        Command::Repl { run } => {
            let config: RunConfig = run.into();
            return match run_repl(&config, input, out) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "tsld: {e}");
                    EXIT_IO
                }
            };
        }
    };
    match result {
        Ok(report) => match out.write_all(report.output.as_bytes()) {
            Ok(()) => report.status,
            Err(e) => {
                let _ = writeln!(err, "tsld: {e}");
                EXIT_IO
            }
        },
        Err(f) => {
            let _ = writeln!(err, "tsld: {}", f.message);
            f.status
        }
    }
}

/// Entry point for the binary.
pub fn main_with_std() -> i32 {
    let stdin = io::stdin();
    run(std::env::args_os(), stdin.lock(), &mut io::stdout().lock(), &mut io::stderr().lock())
}
