//! Command-line driver.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::execution::{Bounds, EventKind, Trace};
use crate::frontend::{parse, Diagnostic};
use crate::graph::{build_graph, emit_dot};
use crate::property::{check_theory, LemmaMode, LemmaReport, Verdict};

/// Caps the number of worker threads used to check lemmas in parallel.
pub const THREADS_ENV: &str = "MSR_PROVER_THREADS";

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "msr-prover", version, about = "Bounded verification of multiset-rewriting protocol theories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the lemmas of a theory.
    Prove(ProveArgs),
}

#[derive(Debug, clap::Args)]
pub struct ProveArgs {
    pub file: PathBuf,
    /// Accepted for familiarity; lemmas are always checked.
    #[arg(long)]
    pub prove: bool,
    /// Only check this lemma (repeatable).
    #[arg(long = "lemma", value_name = "NAME")]
    pub lemmas: Vec<String>,
    /// Maximum number of rule instances per trace.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u16).range(1..=64))]
    pub max_events: u16,
    /// Maximum number of fresh names per trace.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u16).range(0..=64))]
    pub max_fresh: u16,
    /// Maximum depth of terms the adversary composes.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u16).range(1..=16))]
    pub adv_depth: u16,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write a DOT graph for every lemma decided by a trace.
    #[arg(long, value_name = "DIR")]
    pub graph_dir: Option<PathBuf>,
}

impl ProveArgs {
    pub fn bounds(&self) -> Bounds {
        Bounds {
            max_events: self.max_events as usize,
            max_fresh: self.max_fresh as usize,
            adv_depth: self.adv_depth as usize,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Outcome of one `prove` run.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub input: String,
    pub theory: String,
    pub bounds: Bounds,
    pub diagnostics: Vec<Diagnostic>,
    pub elapsed_ms: u128,
    pub lemmas: Vec<LemmaResult>,
    pub all_expectations_met: bool,
}

#[derive(Debug, Serialize)]
pub struct LemmaResult {
    pub name: String,
    pub mode: String,
    pub verdict: &'static str,
    /// Whether the verdict is the one the lemma's mode asks for.
    pub expected: bool,
    pub traces: usize,
    pub pruned: usize,
    pub elapsed_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEvent>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct TraceEvent {
    pub timepoint: usize,
    pub kind: &'static str,
    pub label: String,
    pub actions: Vec<String>,
}

fn trace_events(t: &Trace) -> Vec<TraceEvent> {
    t.events
        .iter()
        .map(|e| {
            let (kind, label) = match &e.kind {
                EventKind::Rule { rule, .. } => ("rule", rule.to_string()),
                EventKind::Fresh { name } => ("fresh", name.to_string()),
                EventKind::AdvReceive { term } => ("adv_receive", term.to_string()),
                EventKind::AdvConstruct { term } => ("adv_construct", term.to_string()),
                EventKind::AdvSend { term } => ("adv_send", term.to_string()),
            };
            TraceEvent { timepoint: e.timepoint, kind, label, actions: e.actions.iter().map(|a| a.to_string()).collect() }
        })
        .collect()
}

fn met(mode: LemmaMode, v: &Verdict) -> bool {
    matches!(
        (mode, v),
        (LemmaMode::AllTraces, Verdict::VerifiedUpToBound { .. }) | (LemmaMode::ExistsTrace, Verdict::WitnessFound(_))
    )
}

fn verdict_text(r: &LemmaReport) -> String {
    match &r.verdict {
        Verdict::VerifiedUpToBound { traces, .. } => format!("verified up to bound ({traces} traces)"),
        Verdict::NoWitnessUpToBound { traces, .. } => format!("no witness up to bound ({traces} traces)"),
        Verdict::Falsified(t) => format!("falsified - found trace ({} steps)", t.rule_events().count()),
        Verdict::WitnessFound(t) => format!("verified - found trace ({} steps)", t.rule_events().count()),
    }
}

fn millis(d: Duration) -> u128 {
    d.as_millis()
}

/// Failure that ends a run with exit code 2.
struct Fatal(String);

fn prove(args: &ProveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Fatal> {
    let start = Instant::now();
    let input = args.file.display().to_string();
    let src = std::fs::read_to_string(&args.file).map_err(|e| Fatal(format!("cannot read {input}: {e}")))?;
    let parsed = parse(&src);
    for d in &parsed.diagnostics {
        let _ = writeln!(err, "{input}:{}:{}: {d}", d.line, d.col);
    }
    let theory = match parsed.theory {
        Some(t) if !parsed.diagnostics.iter().any(|d| d.is_error()) => t,
        _ => return Err(Fatal(format!("{input}: theory has errors"))),
    };
    for name in &args.lemmas {
        if theory.lemma(name).is_none() {
            return Err(Fatal(format!("{input}: no lemma named `{name}`")));
        }
    }
    let bounds = args.bounds();
    let reports = check_theory(&theory, bounds, &args.lemmas);

    if let Some(dir) = &args.graph_dir {
        std::fs::create_dir_all(dir).map_err(|e| Fatal(format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut lemmas = Vec::new();
    for r in &reports {
        let mut graph = None;
        if let (Some(dir), Some(trace)) = (&args.graph_dir, r.verdict.trace()) {
            graph = Some(write_graph(dir, r, trace)?);
        }
        lemmas.push(LemmaResult {
            name: r.lemma.name.to_string(),
            mode: r.lemma.mode.to_string(),
            verdict: r.verdict.tag(),
            expected: met(r.lemma.mode, &r.verdict),
            traces: r.stats.nodes,
            pruned: r.stats.pruned,
            elapsed_ms: millis(r.elapsed),
            trace: r.verdict.trace().map(trace_events),
            graph,
        });
    }
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        input: input.clone(),
        theory: theory.name.to_string(),
        bounds,
        diagnostics: parsed.diagnostics,
        elapsed_ms: millis(start.elapsed()),
        all_expectations_met: lemmas.iter().all(|l| l.expected),
        lemmas,
    };
    let written = match args.format {
        Format::Json => serde_json::to_writer_pretty(&mut *out, &report)
            .map_err(std::io::Error::from)
            .and_then(|_| writeln!(out)),
        Format::Text => write_text(out, &report, &reports, start.elapsed()),
    };
    written.map_err(|e| Fatal(format!("cannot write report: {e}")))?;
    Ok(if report.all_expectations_met { 0 } else { 1 })
}

fn write_graph(dir: &Path, r: &LemmaReport, trace: &Trace) -> Result<String, Fatal> {
    let g = build_graph(trace, Some(&r.lemma.formula)).map_err(|e| Fatal(e.to_string()))?;
    let path = dir.join(format!("{}.dot", r.lemma.name));
    std::fs::write(&path, emit_dot(&g, &r.lemma.name))
        .map_err(|e| Fatal(format!("cannot write {}: {e}", path.display())))?;
    Ok(path.display().to_string())
}

fn write_text(out: &mut dyn Write, report: &RunReport, reports: &[LemmaReport], elapsed: Duration) -> std::io::Result<()> {
    for r in reports {
        if let Some(t) = r.verdict.trace() {
            writeln!(out, "{} ({}): trace", r.lemma.name, r.lemma.mode)?;
            for e in t.rule_events() {
                writeln!(out, "  {e}")?;
            }
            writeln!(out)?;
        }
    }
    let rule = "=".repeat(78);
    writeln!(out, "{rule}")?;
    writeln!(out, "summary of summaries:")?;
    writeln!(out)?;
    writeln!(out, "analyzed: {}", report.input)?;
    writeln!(out, "processing time: {:.2}s", elapsed.as_secs_f64())?;
    let b = report.bounds;
    writeln!(out, "bounds: max-events {}, max-fresh {}, adv-depth {}", b.max_events, b.max_fresh, b.adv_depth)?;
    writeln!(out)?;
    let heads: Vec<String> = reports.iter().map(|r| format!("{} ({}):", r.lemma.name, r.lemma.mode)).collect();
    let width = heads.iter().map(|h| h.len()).max().unwrap_or(0);
    for (h, r) in heads.iter().zip(reports) {
        writeln!(out, "  {h:<width$} {}", verdict_text(r))?;
    }
    writeln!(out)?;
    writeln!(out, "{rule}")
}

/// Run the CLI on `args` (program name first) and return the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.command {
        Command::Prove(a) => prove(&a, out, err).unwrap_or_else(|Fatal(msg)| {
            let _ = writeln!(err, "error: {msg}");
            2
        }),
    }
}

/// Apply the thread cap from the environment, if any.
pub fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
