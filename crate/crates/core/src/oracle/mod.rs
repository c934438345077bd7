//! Brute-force reference procedures.
//!
//! Everything here works on individual executions of the quotient rather than
//! on sets of classes, and does not use the estimator. It serves as the
//! ground truth the estimator-based procedures are tested against.

mod generate;
mod regions;
mod simulate;
mod traces;
mod twin;

pub use generate::{random_model, random_models, random_ta, random_tas, GeneratorConfig, TaGeneratorConfig};
pub use regions::{check_region_quotient, RegionCheckReport};
pub use simulate::{simulate_runs, LosingKind, LosingRun, SimulationReport};
pub use traces::{enumerate_utraces, TraceInfo};
pub use twin::{brute_force_diagnosable, twin_product, CounterExample, OracleVerdict, TwinGraph, TwinState};

use thiserror::Error;

use crate::model::{ActionKind, ClassId, QuotientModel};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration exceeds {0} entries")]
    CapExceeded(usize),
}

/// Classes reachable from `c` by silent moves, each paired with whether a
/// fault has occurred (starting from `faulty`). Uses the raw edge lists.
pub(crate) fn silent_moves(model: &QuotientModel, c: ClassId, faulty: bool) -> Vec<(ClassId, bool)> {
    let fault = model.fault_action();
    let mut seen = std::collections::BTreeSet::new();
    let mut stack = vec![(c, faulty)];
    seen.insert((c, faulty));
    while let Some((x, fl)) = stack.pop() {
        let mut push = |y: ClassId, f: bool| {
            if seen.insert((y, f)) {
                stack.push((y, f));
            }
        };
        for e in model.edges_from(x) {
            match model.action(e.action).kind {
                ActionKind::External => {}
                _ => push(e.dst, fl || e.action == fault),
            }
        }
        for t in model.time_from(x) {
            push(t.dst, fl);
        }
    }
    seen.into_iter().collect()
}
