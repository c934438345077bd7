//! Time-abstract fault diagnosis for hybrid automata.
//!
//! The crate works on finite time-abstract bisimulation quotients
//! ([`model::QuotientModel`]), either supplied directly or computed from a
//! timed automaton by region construction ([`ta`]). From a quotient it builds
//! the deterministic state estimator ([`estimator`]), decides diagnosability
//! ([`diagnosability`]), and synthesizes an executable diagnoser
//! ([`diagnoser`]). The [`oracle`] module is an independent brute-force
//! decision procedure used for cross-checking.

pub mod cli;
pub mod diagnosability;
pub mod diagnoser;
pub mod estimator;
pub mod fixtures;
pub mod format;
mod graph;
pub mod model;
pub mod oracle;
pub mod ta;

pub use estimator::{build_estimator, Classification, EstimatorGraph, EstimatorState, StateId};
pub use model::{
    validate_model, ActionId, ActionKind, ActionLabel, ClassId, ClassSet, ObservableId,
    QuotientModel, UTrace,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/timed-automata.md")]
    mod timed_automata {}
    #[doc = include_str!("../../../book/src/estimator.md")]
    mod estimator {}
    #[doc = include_str!("../../../book/src/diagnosability.md")]
    mod diagnosability {}
    #[doc = include_str!("../../../book/src/diagnoser.md")]
    mod diagnoser {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
