//! Small reference models shipped with the crate.
//!
//! * `Q1`: two non-faulty classes alternating observables under `tick`;
//!   faulty classes tick in place, so a fault shows up as a repeated
//!   observable. Diagnosable.
//! * `Q2`: same non-faulty part, but the faulty classes alternate exactly like
//!   the non-faulty ones. Not diagnosable.
//! * `REFRESH`: diagnosable model whose estimator nevertheless has a loop of
//!   indeterminate states (faults keep being re-hypothesised but are always
//!   revealed two steps later).
//! * `TA1`: one-clock timed automaton with a fault edge into a leak location.

use crate::model::{ActionKind, ModelBuilder, QuotientModel};

pub const Q1_JSON: &str = include_str!("../../../fixtures/q1.quot.json");
pub const Q2_JSON: &str = include_str!("../../../fixtures/q2.quot.json");
pub const BAD_D1_JSON: &str = include_str!("../../../fixtures/bad-d1.quot.json");
pub const REFRESH_JSON: &str = include_str!("../../../fixtures/refresh.quot.json");
pub const TA1_JSON: &str = include_str!("../../../fixtures/ta1.ta.json");

pub fn q1() -> QuotientModel {
    QuotientModel::from_json(Q1_JSON).expect("q1 fixture parses")
}

pub fn q2() -> QuotientModel {
    QuotientModel::from_json(Q2_JSON).expect("q2 fixture parses")
}

pub fn refresh() -> QuotientModel {
    QuotientModel::from_json(REFRESH_JSON).expect("refresh fixture parses")
}

/// Q1 as a builder, for tests that add edges.
pub fn q1_builder() -> ModelBuilder {
    ModelBuilder::new()
        .class("n0", false, true, 0)
        .class("n1", false, false, 1)
        .class("f0", true, false, 0)
        .class("f1", true, false, 1)
        .action("f", ActionKind::Fault)
        .action("tick", ActionKind::External)
        .edge("n0", "tick", "n1")
        .edge("n1", "tick", "n0")
        .edge("n0", "f", "f0")
        .edge("n1", "f", "f1")
        .edge("f0", "tick", "f0")
        .edge("f1", "tick", "f1")
}
