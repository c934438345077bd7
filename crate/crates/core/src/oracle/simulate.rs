//! Adversarial simulation of the environment against a diagnoser.
//!
//! The environment picks an initial class, silent moves (including when to
//! fault), and external moves; the diagnoser only sees the induced event
//! stream. A run is losing for the diagnoser if it answers `yes` before any
//! fault, or if a fault stays unannounced for `deadline` external events.

use std::collections::HashSet;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::silent_moves;
use crate::diagnoser::{Answer, DiagnoserAutomaton, ObsEvent};
use crate::estimator::StateId;
use crate::model::{ActionKind, ClassId, QuotientModel, UTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LosingKind {
    /// `yes` without a preceding fault.
    FalseAlarm,
    /// The fault was not announced within the deadline.
    LateDetection,
    /// The diagnoser rejected an event stream the model can produce.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LosingRun {
    pub kind: LosingKind,
    pub trace: UTrace,
    /// Number of external events observed before the fault, if any.
    pub fault_after: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimulationReport {
    /// Distinct (class, depth, diagnoser state, fault timing) configurations visited.
    pub configurations: usize,
    /// Runs that reached the horizon, or were cut short as losing.
    pub runs: usize,
    pub faulty_runs: usize,
    pub losing_count: usize,
    /// First few losing runs, in exploration order.
    pub losing: Vec<LosingRun>,
    /// False when the exhaustive budget was exceeded and runs were sampled.
    pub exhaustive: bool,
}

impl SimulationReport {
    pub fn winning(&self) -> bool {
        self.losing_count == 0
    }
}

const KEEP_LOSING: usize = 16;
const EXHAUSTIVE_BUDGET: usize = 2_000_000;
const RANDOM_SAMPLES: usize = 20_000;

#[derive(Clone)]
struct Node {
    class: ClassId,
    depth: usize,
    dstate: StateId,
    fault_at: Option<usize>,
    announced: bool,
    trace: UTrace,
}

enum Outcome {
    Continue(Node),
    Lost(LosingRun),
}

struct Sim<'a> {
    model: &'a QuotientModel,
    diag: &'a DiagnoserAutomaton,
    deadline: usize,
}

impl Sim<'_> {
    fn starts(&self) -> Vec<Outcome> {
        let mut out = Vec::new();
        for c in self.model.initial_classes() {
            let o = self.model.observable(c);
            let trace = UTrace::new(o);
            match self.diag.step(None, ObsEvent::Init(o)) {
                Err(_) => out.push(Outcome::Lost(LosingRun { kind: LosingKind::Inconsistent, trace, fault_after: None })),
                Ok((_, v)) if v.answer == Answer::Yes => {
                    out.push(Outcome::Lost(LosingRun { kind: LosingKind::FalseAlarm, trace, fault_after: None }))
                }
                Ok((s, _)) => out.push(Outcome::Continue(Node {
                    class: c,
                    depth: 0,
                    dstate: s,
                    fault_at: None,
                    announced: false,
                    trace,
                })),
            }
        }
        out
    }

    fn expand(&self, node: &Node) -> Vec<Outcome> {
        let mut out = Vec::new();
        for (x, faulted) in silent_moves(self.model, node.class, node.fault_at.is_some()) {
            let fault_at = if faulted { node.fault_at.or(Some(node.depth)) } else { None };
            for e in self.model.edges_from(x) {
                if self.model.action(e.action).kind != ActionKind::External {
                    continue;
                }
                let obs = self.model.observable(e.dst);
                let trace = node.trace.extended(e.action, obs);
                let depth = node.depth + 1;
                let (dstate, verdict) = match self.diag.step(Some(node.dstate), ObsEvent::Step { action: e.action, obs }) {
                    Ok(r) => r,
                    Err(_) => {
                        out.push(Outcome::Lost(LosingRun { kind: LosingKind::Inconsistent, trace, fault_after: fault_at }));
                        continue;
                    }
                };
                let yes = verdict.answer == Answer::Yes;
                if yes && fault_at.is_none() {
                    out.push(Outcome::Lost(LosingRun { kind: LosingKind::FalseAlarm, trace, fault_after: None }));
                    continue;
                }
                let announced = node.announced || yes;
                if let Some(f) = fault_at {
                    if !announced && depth - f >= self.deadline {
                        out.push(Outcome::Lost(LosingRun {
                            kind: LosingKind::LateDetection,
                            trace,
                            fault_after: Some(f),
                        }));
                        continue;
                    }
                }
                out.push(Outcome::Continue(Node { class: e.dst, depth, dstate, fault_at, announced, trace }));
            }
        }
        out
    }
}

fn record(report: &mut SimulationReport, lost: LosingRun) {
    report.runs += 1;
    if lost.fault_after.is_some() {
        report.faulty_runs += 1;
    }
    report.losing_count += 1;
    if report.losing.len() < KEEP_LOSING {
        report.losing.push(lost);
    }
}

/// Plays every environment behaviour with at most `k` external events against
/// `diag`. `deadline` bounds the events allowed between a fault and `yes`;
/// when `None`, the horizon `k` is used.
///
/// Exploration is exhaustive up to a fixed configuration budget, after which
/// it restarts as seeded random sampling and reports `exhaustive = false`.
pub fn simulate_runs(
    model: &QuotientModel,
    diag: &DiagnoserAutomaton,
    k: usize,
    deadline: Option<usize>,
) -> SimulationReport {
    let sim = Sim { model, diag, deadline: deadline.unwrap_or(k).max(1) };
    let mut report = SimulationReport { exhaustive: true, ..Default::default() };
    let mut seen: HashSet<(ClassId, usize, StateId, Option<usize>, bool)> = HashSet::new();
    let mut stack: Vec<Node> = Vec::new();
    for o in sim.starts() {
        match o {
            Outcome::Continue(n) => stack.push(n),
            Outcome::Lost(l) => record(&mut report, l),
        }
    }
    while let Some(node) = stack.pop() {
        // outcome depends only on events since the fault, not its absolute time
        let key = (node.class, node.depth, node.dstate, node.fault_at.map(|f| node.depth - f), node.announced);
        if !seen.insert(key) {
            continue;
        }
        report.configurations += 1;
        if report.configurations > EXHAUSTIVE_BUDGET {
            return sample_runs(&sim, k);
        }
        if node.depth == k {
            report.runs += 1;
            if node.fault_at.is_some() {
                report.faulty_runs += 1;
            }
            continue;
        }
        for o in sim.expand(&node) {
            match o {
                Outcome::Continue(n) => stack.push(n),
                Outcome::Lost(l) => record(&mut report, l),
            }
        }
    }
    report
}

fn sample_runs(sim: &Sim<'_>, k: usize) -> SimulationReport {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut report = SimulationReport { exhaustive: false, ..Default::default() };
    let starts = sim.starts();
    for _ in 0..RANDOM_SAMPLES {
        let Some(start) = starts.choose(&mut rng) else { break };
        let mut node = match start {
            Outcome::Lost(l) => {
                record(&mut report, l.clone());
                continue;
            }
            Outcome::Continue(n) => n.clone(),
        };
        loop {
            report.configurations += 1;
            if node.depth == k {
                report.runs += 1;
                report.faulty_runs += usize::from(node.fault_at.is_some());
                break;
            }
            let next = sim.expand(&node);
            match next.choose(&mut rng) {
                None => break,
                Some(Outcome::Lost(l)) => {
                    record(&mut report, l.clone());
                    break;
                }
                Some(Outcome::Continue(n)) => node = n.clone(),
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnosability::detection_delay_bound;
    use crate::diagnoser::synthesize;
    use crate::estimator::build_estimator;
    use crate::fixtures;
    use crate::model::{ActionKind, ModelBuilder};

    #[test]
    fn q1_diagnoser_wins() {
        let q1 = fixtures::q1();
        let est = build_estimator(&q1);
        let bound = detection_delay_bound(&est).unwrap();
        let report = simulate_runs(&q1, &synthesize(&est), 6, Some(bound));
        assert!(report.winning(), "{report:?}");
        assert!(report.exhaustive);
        assert!(report.faulty_runs > 0);
    }

    #[test]
    fn q2_diagnoser_loses() {
        let q2 = fixtures::q2();
        let est = build_estimator(&q2);
        let report = simulate_runs(&q2, &synthesize(&est), 6, None);
        assert!(!report.winning());
        let late = report.losing.iter().find(|l| l.kind == LosingKind::LateDetection).unwrap();
        assert_eq!(late.fault_after, Some(0));
        assert_eq!(late.trace.len(), 6);
    }

    #[test]
    fn fault_free_model_is_never_alarmed() {
        // the fault exists (D1) but every faulty class is unreachable after a
        // dead-end guard; with deadline k nothing is late
        let m = ModelBuilder::new()
            .class("n0", false, true, 0)
            .class("f0", true, false, 1)
            .action("f", ActionKind::Fault)
            .action("tick", ActionKind::External)
            .edge("n0", "tick", "n0")
            .edge("n0", "f", "f0")
            .edge("f0", "tick", "f0")
            .build()
            .unwrap();
        let est = build_estimator(&m);
        let report = simulate_runs(&m, &synthesize(&est), 4, Some(1));
        assert!(report.winning(), "{report:?}");
        assert!(report.runs > report.faulty_runs);
    }

    #[test]
    fn too_tight_deadline_is_caught() {
        let m = fixtures::refresh();
        let est = build_estimator(&m);
        let d = synthesize(&est);
        assert!(simulate_runs(&m, &d, 6, Some(2)).winning());
        let report = simulate_runs(&m, &d, 6, Some(1));
        assert!(report.losing.iter().all(|l| l.kind == LosingKind::LateDetection));
        assert!(!report.winning());
    }

    #[test]
    fn foreign_diagnoser_is_inconsistent() {
        // starts in o1, which no initial class of Q1 carries
        let m = ModelBuilder::new()
            .class("n0", false, true, 1)
            .class("f0", true, false, 0)
            .action("f", ActionKind::Fault)
            .action("tick", ActionKind::External)
            .edge("n0", "tick", "n0")
            .edge("n0", "f", "f0")
            .edge("f0", "tick", "f0")
            .build()
            .unwrap();
        let d1 = synthesize(&build_estimator(&fixtures::q1()));
        let report = simulate_runs(&m, &d1, 3, None);
        assert_eq!(report.losing[0].kind, LosingKind::Inconsistent);
    }
}
