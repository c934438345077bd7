//! Timed automata with faults and their region quotient.
//!
//! A [`TimedAutomatonWithFaults`] is read from a JSON file by [`parse_ta`],
//! which also checks the fault axioms and that the observation predicates
//! partition the external-clock space. [`region_quotient`] turns it into a
//! [`QuotientModel`](crate::model::QuotientModel) whose classes are the
//! reachable (location, region) pairs.
//!
//! Per-clock ceilings include the constants of the observation predicates,
//! so plain region equivalence already respects the observation.

pub mod concrete;
mod parse;
mod quotient;
mod region;
mod syntax;

pub use parse::{parse_ta, TaFile};
pub use quotient::{region_count_bound, region_graph, region_quotient, RegionGraph, DEFAULT_MAX_CLASSES};
pub use region::{enumerate_regions, IntPart, Region};
pub use syntax::{parse_constraint, parse_pred, SyntaxError, SyntaxErrorKind};

use thiserror::Error;

use crate::model::{ActionId, ActionLabel, ObservableId, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockId(pub u32);

impl ClockId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clock {
    pub name: String,
    pub external: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn holds<T: Ord>(self, lhs: T, rhs: T) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

/// `clock op bound` with a natural-number bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockConstraint {
    pub clock: ClockId,
    pub op: CmpOp,
    pub bound: u32,
}

/// Boolean combination of clock constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pred {
    True,
    False,
    Atom(ClockConstraint),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

impl Pred {
    /// Evaluates the predicate given a truth value for each atom.
    pub fn eval(&self, atom: &mut impl FnMut(&ClockConstraint) -> bool) -> bool {
        match self {
            Pred::True => true,
            Pred::False => false,
            Pred::Atom(c) => atom(c),
            Pred::Not(p) => !p.eval(atom),
            Pred::And(a, b) => a.eval(atom) && b.eval(atom),
            Pred::Or(a, b) => a.eval(atom) || b.eval(atom),
        }
    }

    pub fn atoms(&self) -> Vec<ClockConstraint> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<ClockConstraint>) {
        match self {
            Pred::True | Pred::False => {}
            Pred::Atom(c) => out.push(*c),
            Pred::Not(p) => p.collect_atoms(out),
            Pred::And(a, b) | Pred::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub faulty: bool,
    pub initial: bool,
    pub invariant: Vec<ClockConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaEdge {
    pub src: usize,
    pub dst: usize,
    pub action: ActionId,
    pub guard: Vec<ClockConstraint>,
    pub resets: Vec<ClockId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationCell {
    pub id: ObservableId,
    pub pred: Pred,
}

/// A syntactically valid timed automaton with a single fault action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedAutomatonWithFaults {
    pub locations: Vec<Location>,
    /// External clocks first, then internal ones, each in file order.
    pub clocks: Vec<Clock>,
    pub actions: Vec<ActionLabel>,
    pub edges: Vec<TaEdge>,
    /// Sorted by id; ids are `0..len`.
    pub observation: Vec<ObservationCell>,
}

impl TimedAutomatonWithFaults {
    pub fn num_clocks(&self) -> usize {
        self.clocks.len()
    }

    pub fn clock_name(&self, c: ClockId) -> &str {
        &self.clocks[c.index()].name
    }

    pub fn external_clocks(&self) -> Vec<ClockId> {
        (0..self.clocks.len() as u32).map(ClockId).filter(|c| self.clocks[c.index()].external).collect()
    }

    /// Largest constant compared against each clock anywhere in the automaton.
    pub fn ceilings(&self) -> Vec<u32> {
        let mut ceil = vec![0u32; self.clocks.len()];
        let mut bump = |c: &ClockConstraint| {
            let slot = &mut ceil[c.clock.index()];
            *slot = (*slot).max(c.bound);
        };
        self.locations.iter().flat_map(|l| &l.invariant).for_each(&mut bump);
        self.edges.iter().flat_map(|e| &e.guard).for_each(&mut bump);
        self.observation.iter().flat_map(|o| o.pred.atoms()).for_each(|c| bump(&c));
        ceil
    }

    pub fn render_constraint(&self, c: &ClockConstraint) -> String {
        format!("{}{}{}", self.clock_name(c.clock), c.op.symbol(), c.bound)
    }

    pub fn render_pred(&self, p: &Pred) -> String {
        syntax::render_pred(p, &|c| self.clock_name(c).to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaError {
    #[error("{line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{line}:{column}: non-integral constant in `{text}`")]
    NonIntegral { line: usize, column: usize, text: String },
    #[error("rule {rule}: {message}")]
    Rule { rule: Rule, message: String },
    #[error("observation cells do not partition the external clock space: {problem} at {witness}")]
    Partition { witness: String, problem: String },
    #[error("region quotient exceeds {cap} classes")]
    TooManyClasses { cap: usize },
}
