//! Acceptance criteria 1 to 7, one PASS/FAIL line each.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use hydiag::diagnosability::{check_diagnosable, detection_delay_bound};
use hydiag::diagnoser::{synthesize, DiagnoserAutomaton};
use hydiag::estimator::{build_estimator, delta, Classification, EstimatorGraph};
use hydiag::fixtures;
use hydiag::model::{ClassSet, QuotientModel, UTrace};
use hydiag::oracle::{
    brute_force_diagnosable, check_region_quotient, enumerate_utraces, random_models, random_tas,
    simulate_runs, GeneratorConfig, TaGeneratorConfig,
};
use hydiag::ta::{parse_ta, region_count_bound, region_graph, TimedAutomatonWithFaults};
use hydiag::validate_model;

const SEED: u64 = 20240;
const CORPUS: usize = 500;

fn corpus() -> Vec<QuotientModel> {
    random_models(SEED, CORPUS, &GeneratorConfig::default())
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hydiag"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hydiag-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), detail: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    let models = corpus();
    let mut bad = 0;
    for (i, m) in models.iter().enumerate() {
        let ours = check_diagnosable(&build_estimator(m)).diagnosable;
        let oracle = brute_force_diagnosable(m).diagnosable;
        bad += usize::from(!oracle);
        out.check(ours == oracle, || format!("model {i}: estimator {ours}, oracle {oracle}"));
    }
    out.detail = format!("{} models, {} not diagnosable", models.len(), bad);
    out
}

/// Every trace of at most `k` steps the estimator accepts, with its state.
fn estimator_traces(est: &EstimatorGraph, k: usize) -> Vec<(UTrace, ClassSet)> {
    let mut level: Vec<(UTrace, _)> = est.initials().iter().map(|(&o, &s)| (UTrace::new(o), s)).collect();
    let mut all = Vec::new();
    for depth in 0..=k {
        let mut next = Vec::new();
        for (t, s) in &level {
            all.push((t.clone(), est.state(*s).members.clone()));
            if depth < k {
                for (&(src, a, o), &dst) in est.transitions() {
                    if src == *s {
                        next.push((t.extended(a, o), dst));
                    }
                }
            }
        }
        level = next;
    }
    all
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    let mut traces = 0;
    for (i, m) in corpus().iter().enumerate() {
        let est = build_estimator(m);
        let truth = match enumerate_utraces(m, 4, 10_000_000) {
            Ok(t) => t,
            Err(e) => {
                out.check(false, || format!("model {i}: {e}"));
                continue;
            }
        };
        let ours = estimator_traces(&est, 4);
        out.check(ours.len() == truth.len(), || {
            format!("model {i}: estimator accepts {} traces, oracle finds {}", ours.len(), truth.len())
        });
        for (t, members) in &ours {
            let expected = truth.get(t).map(|info| info.classes());
            out.check(expected.as_ref() == Some(members), || {
                format!("model {i}, trace {}: estimator {}, oracle {:?}", m.render_trace(t), m.render_set(members), expected)
            });
        }
        traces += truth.len();
    }
    out.detail = format!("{traces} traces");
    out
}

fn exit_code(cmd: &mut Command) -> (i32, String) {
    let o = cmd.output().expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stdout).into_owned())
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    let q1 = fixtures::q1();
    let est1 = build_estimator(&q1);
    out.check(check_diagnosable(&est1).diagnosable, || "Q1 not diagnosable".into());
    out.check(brute_force_diagnosable(&q1).diagnosable, || "oracle: Q1 not diagnosable".into());

    let q2 = fixtures::q2();
    let est2 = build_estimator(&q2);
    let v = check_diagnosable(&est2);
    match &v.witness {
        Some(w) => {
            out.check(w.replays(&est2), || "Q2 witness does not replay".into());
            out.check(w.render(&q2) == "prefix: o0 tick o1\ncycle: tick o0 tick o1", || w.render(&q2));
        }
        None => out.check(false, || "Q2 has no witness".into()),
    }
    let oracle = brute_force_diagnosable(&q2);
    match &oracle.counterexample {
        Some(c) => out.check(c.replays(&q2), || "oracle counterexample does not replay".into()),
        None => out.check(false, || "oracle: Q2 diagnosable".into()),
    }

    let (code, stdout) = exit_code(bin().arg("check").arg(fixture("q1.quot.json")));
    out.check(code == 0 && stdout.starts_with("diagnosable"), || format!("check q1: exit {code}\n{stdout}"));
    let (code, stdout) = exit_code(bin().arg("check").arg(fixture("q2.quot.json")));
    out.check(code == 2 && stdout.contains("prefix: o0 tick o1"), || format!("check q2: exit {code}\n{stdout}"));
    out.detail = "Q1 exit 0, Q2 exit 2 with replayed lasso".into();
    out
}

fn simulate_diagnosable(out: &mut Outcome, name: &str, m: &QuotientModel, diag: &DiagnoserAutomaton, bound: usize) -> usize {
    let report = simulate_runs(m, diag, 6, Some(bound));
    out.check(report.exhaustive, || format!("{name}: simulation not exhaustive"));
    out.check(report.winning(), || format!("{name}: {} losing runs, first {:?}", report.losing_count, report.losing.first()));
    report.runs
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    let (mut models, mut runs) = (0, 0);
    for (i, m) in corpus().iter().enumerate() {
        let est = build_estimator(m);
        let Ok(bound) = detection_delay_bound(&est) else {
            continue;
        };
        models += 1;
        runs += simulate_diagnosable(&mut out, &format!("model {i}"), m, &synthesize(&est), bound);
    }
    out.detail = format!("{models} diagnosable models, {runs} runs");
    out
}

fn subsets(n: usize) -> Vec<ClassSet> {
    (0u32..1 << n)
        .map(|mask| (0..n as u32).filter(|i| mask >> i & 1 == 1).map(hydiag::ClassId).collect())
        .collect()
}

fn invariants(out: &mut Outcome, name: &str, m: &QuotientModel) {
    let est = build_estimator(m);
    out.check(est.len() as u128 <= 1u128 << m.num_classes(), || format!("{name}: {} states", est.len()));

    let actions: Vec<_> = m.external_actions().collect();
    for s in est.state_ids() {
        let members = &est.state(s).members;
        for &a in &actions {
            for o in (0..m.num_observables() as u32).map(hydiag::ObservableId) {
                let expected = delta(m, members, a, o).map(|st| st.members);
                let actual = est.successor(s, a, o).map(|t| est.state(t).members.clone());
                out.check(expected == actual, || format!("{name}: transition from {} differs from delta", m.render_set(members)));
                if est.classification(s) == Classification::Faulty {
                    if let Some(t) = est.successor(s, a, o) {
                        out.check(est.classification(t) == Classification::Faulty, || {
                            format!("{name}: faulty state {} leaves faultiness", m.render_set(members))
                        });
                    }
                }
            }
        }
    }
    let distinct: BTreeSet<&ClassSet> = est.states().iter().map(|s| &s.members).collect();
    out.check(distinct.len() == est.len(), || format!("{name}: duplicate estimator states"));

    if m.num_classes() <= 8 {
        let all = subsets(m.num_classes());
        let closed: Vec<ClassSet> = all.iter().map(|s| m.unobservable_closure(s)).collect();
        for (i, s) in all.iter().enumerate() {
            out.check(s.is_subset(&closed[i]), || format!("{name}: closure not extensive"));
            out.check(m.unobservable_closure(&closed[i]) == closed[i], || format!("{name}: closure not idempotent"));
            for (j, t) in all.iter().enumerate() {
                if s.is_subset(t) {
                    out.check(closed[i].is_subset(&closed[j]), || format!("{name}: closure not monotone"));
                }
            }
        }
    }
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();
    let models = corpus();
    for (i, m) in models.iter().enumerate() {
        invariants(&mut out, &format!("model {i}"), m);
    }
    let ta1 = region_graph(&parse_ta(fixtures::TA1_JSON).unwrap(), 1000).unwrap().model;
    for (name, m) in [("q1", fixtures::q1()), ("q2", fixtures::q2()), ("refresh", fixtures::refresh()), ("ta1", ta1)] {
        invariants(&mut out, name, &m);
    }
    out.detail = format!("{} models and 4 fixtures", models.len());
    out
}

fn region_soundness(out: &mut Outcome, name: &str, ta: &TimedAutomatonWithFaults, seed: u64) -> usize {
    let g = match region_graph(ta, 100_000) {
        Ok(g) => g,
        Err(e) => {
            out.check(false, || format!("{name}: {e}"));
            return 0;
        }
    };
    let bound = region_count_bound(ta);
    out.check(g.model.num_classes() as u128 <= bound, || format!("{name}: {} classes over bound {bound}", g.model.num_classes()));
    let v = validate_model(&g.model);
    out.check(v.ok(), || format!("{name}: {:?}", v.violations));
    let report = check_region_quotient(ta, &g, 100, seed);
    out.check(report.ok(), || format!("{name}: {}", report.violations.join("; ")));
    out.check(report.pairs >= 100 * report.classes, || format!("{name}: only {} pairs", report.pairs));
    report.pairs
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    let mut pairs = region_soundness(&mut out, "ta1", &parse_ta(fixtures::TA1_JSON).unwrap(), SEED);
    let cfg = TaGeneratorConfig::default();
    let tas = random_tas(SEED, 25, &cfg);
    for (i, ta) in tas.iter().enumerate() {
        out.check(ta.num_clocks() <= 2 && ta.ceilings().iter().all(|&c| c <= 3), || format!("ta {i}: too large"));
        pairs += region_soundness(&mut out, &format!("ta {i}"), ta, SEED + i as u64);
    }
    out.detail = format!("TA-1 and {} random automata, {pairs} pairs", tas.len());
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let quot = scratch("ta1.quot.json");
    let diag_path = scratch("ta1.diag.json");
    let (code, _) = exit_code(bin().arg("regions").arg(fixture("ta1.ta.json")).arg("-o").arg(&quot));
    out.check(code == 0, || format!("regions: exit {code}"));
    let (code, stdout) = exit_code(bin().arg("check").arg(&quot));
    out.check(code == 0, || format!("check: exit {code}\n{stdout}"));
    let (code, _) = exit_code(bin().arg("synthesize").arg(&quot).arg("-o").arg(&diag_path));
    out.check(code == 0, || format!("synthesize: exit {code}"));
    if !out.failures.is_empty() {
        return out;
    }
    let m = QuotientModel::from_json(&std::fs::read_to_string(&quot).unwrap()).unwrap();
    let diag = DiagnoserAutomaton::from_json(&std::fs::read_to_string(&diag_path).unwrap()).unwrap();
    let bound = detection_delay_bound(&build_estimator(&m)).unwrap();
    let runs = simulate_diagnosable(&mut out, "ta1", &m, &diag, bound);
    out.detail = format!("{} classes, bound {bound}, {runs} runs", m.num_classes());
    out
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("estimator verdict agrees with the twin-plant oracle", criterion_1, Duration::from_secs(60)),
        ("estimator states equal oracle reachable sets up to length 4", criterion_2, Duration::from_secs(120)),
        ("fixture verdicts and replayed witnesses", criterion_3, Duration::from_secs(60)),
        ("synthesized diagnosers win within the delay bound", criterion_4, Duration::from_secs(120)),
        ("structural invariants", criterion_5, Duration::from_secs(60)),
        ("region quotients are sound under concrete sampling", criterion_6, Duration::from_secs(60)),
        ("regions, check, synthesize pipeline on TA-1", criterion_7, Duration::from_secs(10)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if elapsed > *budget {
            outcome.failures.push(format!("took {elapsed:.2?}, budget {budget:?}"));
        }
        let status = if outcome.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} criterion {}: {name} ({}; {elapsed:.2?})", i + 1, outcome.detail);
        for f in outcome.failures.iter().take(5) {
            println!("    {f}");
        }
        if !outcome.failures.is_empty() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
