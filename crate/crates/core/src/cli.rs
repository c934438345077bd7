//! The `hydiag` command line.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 not diagnosable,
//! 3 not progressive, 4 inconsistent observations (or an oracle
//! disagreement), 5 a size cap was exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::diagnosability::{check_diagnosable, check_progressive, detection_delay_bound, Lasso, ProgressReport};
use crate::diagnoser::{synthesize, DiagnoserAutomaton, StepError};
use crate::estimator::{build_estimator_capped, Classification, EstimatorError, EstimatorGraph};
use crate::model::{validate_model, QuotientModel, Subject, ValidationReport};
use crate::oracle::{
    brute_force_diagnosable, check_region_quotient, enumerate_utraces, random_models, random_tas,
    GeneratorConfig, OracleError, TaGeneratorConfig,
};
use crate::ta::{parse_ta, region_count_bound, region_graph, RegionGraph, TaError, DEFAULT_MAX_CLASSES};

#[derive(Debug, Parser)]
#[command(name = "hydiag", version, about = "Time-abstract diagnosability of hybrid automata with faults")]
struct Cli {
    /// Output style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap on region-quotient classes and estimator states.
    #[arg(long, global = true, env = "HYDIAG_MAX_CLASSES", default_value_t = DEFAULT_MAX_CLASSES)]
    max_classes: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct Input {
    /// Quotient model file, or timed-automaton file with `--ta`.
    path: PathBuf,
    /// Read the input as a timed automaton and use its region quotient
    /// (implied for files named `*.ta.json`).
    #[arg(long)]
    ta: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the fault axioms of a model.
    Validate(Input),
    /// Compute the region quotient of a timed automaton.
    Regions {
        path: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the state estimator.
    Estimator {
        #[command(flatten)]
        input: Input,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide diagnosability.
    Check(Input),
    /// Synthesize a diagnoser for a diagnosable model.
    Synthesize {
        #[command(flatten)]
        input: Input,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a diagnoser on events read from standard input.
    Run { diagnoser: PathBuf },
    /// Decide diagnosability by brute force on the twin product.
    Oracle {
        #[command(flatten)]
        input: Input,
        /// Also list every observation trace with at most this many steps.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Compare the estimator-based procedures with the oracle on random models.
    Fuzz {
        #[arg(long, default_value_t = 500)]
        models: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fuzz the region construction on random timed automata instead.
        #[arg(long)]
        ta: bool,
    },
}

/// A failed command: what to print and which exit code to use.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<TaError> for Failure {
    fn from(e: TaError) -> Self {
        let code = if matches!(e, TaError::TooManyClasses { .. }) { 5 } else { 1 };
        Failure::new(code, e.to_string())
    }
}

impl From<EstimatorError> for Failure {
    fn from(e: EstimatorError) -> Self {
        let code = if matches!(e, EstimatorError::TooManyStates(_)) { 5 } else { 1 };
        Failure::new(code, e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::new(5, e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

struct Ctx<'a> {
    format: Format,
    max_classes: usize,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn print(&mut self, text: &str) -> Result<(), Failure> {
        writeln!(self.out, "{text}").map_err(|e| Failure::new(1, format!("cannot write output: {e}")))
    }

    fn json(&mut self, value: &impl Serialize) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(value).expect("report serializes");
        self.print(&text)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, format!("{text}\n")).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))
}

fn load_ta(path: &Path, max_classes: usize) -> Result<RegionGraph, Failure> {
    let text = read(path)?;
    let ta = parse_ta(&text).map_err(|e| Failure::from(e).prefixed(path))?;
    Ok(region_graph(&ta, max_classes)?)
}

impl Failure {
    fn prefixed(mut self, path: &Path) -> Self {
        self.message = format!("{}:{}", path.display(), self.message);
        self
    }
}

fn load(input: &Input, max_classes: usize) -> Result<QuotientModel, Failure> {
    if input.ta || input.path.to_string_lossy().ends_with(".ta.json") {
        return load_ta(&input.path, max_classes).map(|g| g.model);
    }
    let text = read(&input.path)?;
    QuotientModel::from_json(&text).map_err(|e| Failure::new(1, format!("{}: {e}", input.path.display())))
}

fn subject_name(model: &QuotientModel, s: &Subject) -> String {
    match s {
        Subject::Model => "model".to_string(),
        Subject::Class(c) => model.class_name(*c).to_string(),
        Subject::Edge(e) => format!(
            "{} -{}-> {}",
            model.class_name(e.src),
            model.action(e.action).name,
            model.class_name(e.dst)
        ),
        Subject::Time(a, b) => format!("{} ~> {}", model.class_name(*a), model.class_name(*b)),
    }
}

fn validation_json(model: &QuotientModel, report: &ValidationReport) -> serde_json::Value {
    let violations: Vec<serde_json::Value> = report
        .violations
        .iter()
        .map(|v| json!({"rule": v.rule.to_string(), "subject": subject_name(model, &v.subject), "message": v.message}))
        .collect();
    json!({"ok": report.ok(), "violations": violations})
}

fn require_valid(model: &QuotientModel) -> Result<(), Failure> {
    let report = validate_model(model);
    if !report.ok() {
        let lines: Vec<String> = report
            .violations
            .iter()
            .map(|v| format!("{} {}: {}", v.rule, subject_name(model, &v.subject), v.message))
            .collect();
        return Err(Failure::new(1, lines.join("\n")));
    }
    Ok(())
}

fn progress_json(model: &QuotientModel, p: &ProgressReport) -> serde_json::Value {
    json!({"progressive": p.progressive, "witness": p.witness.as_ref().map(|_| p.render(model))})
}

fn lasso_json(model: &QuotientModel, l: &Lasso) -> serde_json::Value {
    let cycle: Vec<String> = l.cycle.iter().map(|s| format!("{} {}", model.action(s.action).name, s.obs)).collect();
    let faulty: Vec<&str> = l.faulty_cycle.iter().map(|&c| model.class_name(c)).collect();
    json!({
        "prefix": model.render_trace(&l.prefix),
        "cycle": cycle.join(" "),
        "entry": l.entry.0,
        "faulty_cycle": faulty,
    })
}

fn cmd_validate(ctx: &mut Ctx, input: &Input) -> Outcome {
    let model = load(input, ctx.max_classes)?;
    let report = validate_model(&model);
    if ctx.format == Format::Json {
        ctx.json(&validation_json(&model, &report))?;
    } else if report.ok() {
        ctx.print(&format!("ok: {} classes", model.num_classes()))?;
    } else {
        for v in &report.violations {
            ctx.print(&format!("{} {}: {}", v.rule, subject_name(&model, &v.subject), v.message))?;
        }
    }
    Ok(if report.ok() { 0 } else { 1 })
}

fn cmd_regions(ctx: &mut Ctx, path: &Path, output: Option<&Path>) -> Outcome {
    let text = read(path)?;
    let ta = parse_ta(&text).map_err(|e| Failure::from(e).prefixed(path))?;
    let g = region_graph(&ta, ctx.max_classes)?;
    let bound = region_count_bound(&ta);
    let model_json = g.model.to_json();
    match output {
        Some(out) => {
            write(out, &model_json)?;
            if ctx.format == Format::Json {
                ctx.json(&json!({"classes": g.model.num_classes(), "bound": bound.to_string(), "output": out}))?;
            } else {
                ctx.print(&format!("{} classes (bound {bound}) written to {}", g.model.num_classes(), out.display()))?;
            }
        }
        None => ctx.print(&model_json)?,
    }
    Ok(0)
}

fn cmd_estimator(ctx: &mut Ctx, input: &Input, output: Option<&Path>) -> Outcome {
    let model = load(input, ctx.max_classes)?;
    require_valid(&model)?;
    let est = build_estimator_capped(&model, ctx.max_classes)?;
    match output {
        Some(out) => {
            write(out, &est.to_json())?;
            let indeterminate =
                est.state_ids().filter(|&s| est.classification(s) == Classification::Indeterminate).count();
            if ctx.format == Format::Json {
                ctx.json(&json!({"states": est.len(), "indeterminate": indeterminate, "output": out}))?;
            } else {
                ctx.print(&format!("{} states ({indeterminate} indeterminate) written to {}", est.len(), out.display()))?;
            }
        }
        None => ctx.print(&est.to_json())?,
    }
    Ok(0)
}

/// Shared front half of `check` and `synthesize`.
fn decide(ctx: &mut Ctx, model: &QuotientModel) -> Result<(EstimatorGraph, Option<usize>, serde_json::Value), Failure> {
    require_valid(model)?;
    let progress = check_progressive(model);
    if !progress.progressive {
        if ctx.format == Format::Json {
            ctx.json(&json!({"progressive": false, "diagnosable": null, "progress": progress_json(model, &progress)}))?;
        } else {
            ctx.print(&progress.render(model))?;
        }
        return Err(Failure::new(3, String::new()));
    }
    let est = build_estimator_capped(model, ctx.max_classes)?;
    let verdict = check_diagnosable(&est);
    let bound = detection_delay_bound(&est).ok();
    let report = json!({
        "progressive": true,
        "diagnosable": verdict.diagnosable,
        "detection_delay_bound": bound,
        "witness": verdict.witness.as_ref().map(|l| lasso_json(model, l)),
    });
    if !verdict.diagnosable {
        if ctx.format == Format::Json {
            ctx.json(&report)?;
        } else {
            ctx.print("not diagnosable")?;
            ctx.print(&verdict.witness.as_ref().expect("witness when not diagnosable").render(model))?;
        }
        return Err(Failure::new(2, String::new()));
    }
    Ok((est, bound, report))
}

fn cmd_check(ctx: &mut Ctx, input: &Input) -> Outcome {
    let model = load(input, ctx.max_classes)?;
    let (_, bound, report) = decide(ctx, &model)?;
    if ctx.format == Format::Json {
        ctx.json(&report)?;
    } else {
        ctx.print("diagnosable")?;
        ctx.print(&format!("detection delay bound: {}", bound.expect("bound of a diagnosable model")))?;
    }
    Ok(0)
}

fn cmd_synthesize(ctx: &mut Ctx, input: &Input, output: Option<&Path>) -> Outcome {
    let model = load(input, ctx.max_classes)?;
    let (est, bound, _) = decide(ctx, &model)?;
    let diag = synthesize(&est);
    match output {
        Some(out) => {
            write(out, &diag.to_json())?;
            if ctx.format == Format::Json {
                ctx.json(&json!({"states": diag.num_states(), "detection_delay_bound": bound, "output": out}))?;
            } else {
                ctx.print(&format!(
                    "diagnoser with {} states written to {} (detection delay bound {})",
                    diag.num_states(),
                    out.display(),
                    bound.expect("bound of a diagnosable model")
                ))?;
            }
        }
        None => ctx.print(&diag.to_json())?,
    }
    Ok(0)
}

fn cmd_run(ctx: &mut Ctx, path: &Path, input: &mut dyn BufRead) -> Outcome {
    let text = read(path)?;
    let diag = DiagnoserAutomaton::from_json(&text).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))?;
    let mut current = None;
    let mut line = String::new();
    let mut lineno = 0;
    loop {
        line.clear();
        lineno += 1;
        let n = input.read_line(&mut line).map_err(|e| Failure::new(1, format!("cannot read input: {e}")))?;
        if n == 0 {
            break;
        }
        if line.trim().is_empty() {
            continue;
        }
        let ev = diag.parse_event(&line).map_err(|e| Failure::new(1, format!("line {lineno}: {e}")))?;
        match diag.step(current, ev) {
            Ok((s, verdict)) => {
                current = Some(s);
                if ctx.format == Format::Json {
                    let v = verdict.to_string();
                    let (answer, status) = v.split_once(' ').expect("verdict has two words");
                    ctx.print(&json!({"answer": answer, "status": status}).to_string())?;
                } else {
                    ctx.print(&verdict.to_string())?;
                }
            }
            Err(e @ StepError::NoConsistentExecution) => return Err(Failure::new(4, format!("line {lineno}: {e}"))),
            Err(e) => return Err(Failure::new(1, format!("line {lineno}: {e}"))),
        }
    }
    Ok(0)
}

fn cmd_oracle(ctx: &mut Ctx, input: &Input, depth: Option<usize>) -> Outcome {
    let model = load(input, ctx.max_classes)?;
    require_valid(&model)?;
    let verdict = brute_force_diagnosable(&model);
    let traces = match depth {
        Some(k) => Some(enumerate_utraces(&model, k, ctx.max_classes)?),
        None => None,
    };
    let names = |v: &[crate::model::ClassId]| v.iter().map(|&c| model.class_name(c).to_string()).collect::<Vec<_>>();
    if ctx.format == Format::Json {
        let cex = verdict.counterexample.as_ref().map(|c| {
            json!({
                "prefix": model.render_trace(&c.prefix),
                "cycle": c.cycle.iter().map(|s| format!("{} {}", model.action(s.action).name, s.obs)).collect::<Vec<_>>().join(" "),
                "left_run": names(&c.left_run),
                "right_run": names(&c.right_run),
            })
        });
        let traces = traces.as_ref().map(|t| {
            t.iter()
                .map(|(tr, info)| json!({"trace": model.render_trace(tr), "classes": names(info.classes().as_slice())}))
                .collect::<Vec<_>>()
        });
        ctx.json(&json!({"diagnosable": verdict.diagnosable, "counterexample": cex, "traces": traces}))?;
    } else {
        ctx.print(if verdict.diagnosable { "diagnosable" } else { "not diagnosable" })?;
        if let Some(c) = &verdict.counterexample {
            let cycle: Vec<String> = c.cycle.iter().map(|s| format!("{} {}", model.action(s.action).name, s.obs)).collect();
            ctx.print(&format!("prefix: {}", model.render_trace(&c.prefix)))?;
            ctx.print(&format!("cycle: {}", cycle.join(" ")))?;
            ctx.print(&format!("faulty run: {}", names(&c.left_run).join(" ")))?;
            ctx.print(&format!("non-faulty run: {}", names(&c.right_run).join(" ")))?;
        }
        if let Some(t) = &traces {
            for (tr, info) in t {
                ctx.print(&format!("{} : {}", model.render_trace(tr), model.render_set(&info.classes())))?;
            }
        }
    }
    Ok(if verdict.diagnosable { 0 } else { 2 })
}

fn cmd_fuzz(ctx: &mut Ctx, count: usize, seed: u64, ta: bool) -> Outcome {
    let mut first: Option<String> = None;
    let mut agreements = 0;
    if ta {
        for (i, t) in random_tas(seed, count, &TaGeneratorConfig::default()).iter().enumerate() {
            let g = region_graph(t, ctx.max_classes)?;
            let valid = validate_model(&g.model).ok();
            let bounded = (g.model.num_classes() as u128) <= region_count_bound(t);
            let check = check_region_quotient(t, &g, 100, seed.wrapping_add(i as u64));
            if valid && bounded && check.ok() {
                agreements += 1;
            } else if first.is_none() {
                let why = check.violations.first().cloned().unwrap_or_else(|| format!("valid={valid} bounded={bounded}"));
                first = Some(format!("automaton {i}: {why}\n{}", t.to_json()));
            }
        }
    } else {
        for (i, m) in random_models(seed, count, &GeneratorConfig::default()).iter().enumerate() {
            let est = build_estimator_capped(m, ctx.max_classes)?;
            let ours = check_diagnosable(&est).diagnosable;
            let theirs = brute_force_diagnosable(m).diagnosable;
            if ours == theirs {
                agreements += 1;
            } else if first.is_none() {
                first = Some(format!("model {i}: estimator says {ours}, oracle says {theirs}\n{}", m.to_json()));
            }
        }
    }
    if ctx.format == Format::Json {
        ctx.json(&json!({"tested": count, "agreements": agreements, "first_disagreement": first}))?;
    } else {
        ctx.print(&format!("tested: {count}\nagreements: {agreements}"))?;
        if let Some(d) = &first {
            ctx.print(&format!("first disagreement: {d}"))?;
        }
    }
    Ok(if agreements == count { 0 } else { 4 })
}

/// Runs one invocation with explicit streams; returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{rendered}") } else { write!(stderr, "{rendered}") };
            return code;
        }
    };
    let mut ctx = Ctx { format: cli.format, max_classes: cli.max_classes, out: stdout };
    let result = match &cli.command {
        Command::Validate(input) => cmd_validate(&mut ctx, input),
        Command::Regions { path, output } => cmd_regions(&mut ctx, path, output.as_deref()),
        Command::Estimator { input, output } => cmd_estimator(&mut ctx, input, output.as_deref()),
        Command::Check(input) => cmd_check(&mut ctx, input),
        Command::Synthesize { input, output } => cmd_synthesize(&mut ctx, input, output.as_deref()),
        Command::Run { diagnoser } => cmd_run(&mut ctx, diagnoser, stdin),
        Command::Oracle { input, depth } => cmd_oracle(&mut ctx, input, *depth),
        Command::Fuzz { models, seed, ta } => cmd_fuzz(&mut ctx, *models, *seed, *ta),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                let _ = writeln!(stderr, "error: {}", f.message);
            }
            f.code
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdin = std::io::stdin();
    let mut input = stdin.lock();
    run(std::env::args_os(), &mut input, &mut std::io::stdout(), &mut std::io::stderr())
}
