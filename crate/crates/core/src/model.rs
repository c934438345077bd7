//! Finite time-abstract bisimulation quotients of hybrid automata with faults.
//!
//! A [`QuotientModel`] is a labeled transition system over equivalence
//! classes. Every class is either faulty or non-faulty, carries exactly one
//! observable, and may be initial. Discrete edges are labeled by actions
//! (external, internal, or the single fault action); continuous evolution is
//! abstracted into *time edges*, which are kept reflexively and transitively
//! closed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of one equivalence class of the quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassId(pub u32);

impl ClassId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index into the model's action table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A cell of the observation partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObservableId(pub u32);

impl ObservableId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ObservableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

impl std::str::FromStr for ObservableId {
    type Err = std::num::ParseIntError;

    /// Accepts both `o3` and `3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.strip_prefix('o').unwrap_or(s);
        digits.parse().map(ObservableId)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    External,
    Internal,
    Fault,
}

impl ActionKind {
    /// Internal and fault actions are invisible to the diagnoser.
    pub fn is_silent(self) -> bool {
        !matches!(self, ActionKind::External)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionLabel {
    pub name: String,
    pub kind: ActionKind,
}

impl ActionLabel {
    pub fn new(name: impl Into<String>, kind: ActionKind) -> Self {
        ActionLabel { name: name.into(), kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Class {
    pub name: String,
    pub faulty: bool,
    pub initial: bool,
    pub observable: ObservableId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiscreteEdge {
    pub src: ClassId,
    pub action: ActionId,
    pub dst: ClassId,
}

/// A time-abstract trajectory successor. `divergent` is only meaningful on
/// self-loops and marks a class in which time can elapse forever.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeEdge {
    pub src: ClassId,
    pub dst: ClassId,
    pub divergent: bool,
}

/// Canonical (sorted, duplicate-free) set of classes.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassSet(Vec<ClassId>);

impl ClassSet {
    pub fn new() -> Self {
        ClassSet(Vec::new())
    }

    pub fn singleton(c: ClassId) -> Self {
        ClassSet(vec![c])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: ClassId) -> bool {
        self.0.binary_search(&c).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[ClassId] {
        &self.0
    }

    pub fn is_subset(&self, other: &ClassSet) -> bool {
        self.iter().all(|c| other.contains(c))
    }
}

impl FromIterator<ClassId> for ClassSet {
    fn from_iter<I: IntoIterator<Item = ClassId>>(iter: I) -> Self {
        let mut v: Vec<ClassId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ClassSet(v)
    }
}

impl<'a> IntoIterator for &'a ClassSet {
    type Item = &'a ClassId;
    type IntoIter = std::slice::Iter<'a, ClassId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// One observed step of an untimed observation trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub action: ActionId,
    pub obs: ObservableId,
}

/// Untimed observation trace `O0 a0 O1 a1 ...` (finite).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UTrace {
    pub head: ObservableId,
    pub steps: Vec<Step>,
}

impl UTrace {
    pub fn new(head: ObservableId) -> Self {
        UTrace { head, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, action: ActionId, obs: ObservableId) {
        self.steps.push(Step { action, obs });
    }

    pub fn extended(&self, action: ActionId, obs: ObservableId) -> UTrace {
        let mut t = self.clone();
        t.push(action, obs);
        t
    }

    /// The observable seen last.
    pub fn last_obs(&self) -> ObservableId {
        self.steps.last().map_or(self.head, |s| s.obs)
    }
}

/// Structural errors: the input cannot even be represented as a model.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("class index {0} out of range")]
    ClassOutOfRange(u32),
    #[error("action index {0} out of range")]
    ActionOutOfRange(u32),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("duplicate class `{0}`")]
    DuplicateClass(String),
    #[error("duplicate action `{0}`")]
    DuplicateAction(String),
    #[error("expected exactly one fault action, found {0}")]
    FaultActionCount(usize),
    #[error("time edge {0} -> {1} marked divergent but is not a self-loop")]
    DivergentNonLoop(String, String),
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    D1,
    D2,
    D3,
    T1,
    InitNonFaulty,
    ObsTotal,
    Nonempty,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subject {
    Model,
    Class(ClassId),
    Edge(DiscreteEdge),
    Time(ClassId, ClassId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub subject: Subject,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

/// A finite time-abstract quotient of a hybrid automaton with faults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientModel {
    classes: Vec<Class>,
    actions: Vec<ActionLabel>,
    fault: ActionId,
    edges: Vec<DiscreteEdge>,
    time: Vec<TimeEdge>,
    out_edges: Vec<Vec<usize>>,
    out_time: Vec<Vec<usize>>,
}

impl QuotientModel {
    /// Builds a model, closing the time relation reflexively and transitively.
    ///
    /// Fails only on structural problems (dangling indices, duplicate names,
    /// not exactly one fault action). Axiom violations are reported by
    /// [`validate_model`].
    pub fn new(
        classes: Vec<Class>,
        actions: Vec<ActionLabel>,
        edges: Vec<DiscreteEdge>,
        time: Vec<TimeEdge>,
    ) -> Result<Self, ModelError> {
        let n = classes.len();
        let mut names = BTreeSet::new();
        for c in &classes {
            if !names.insert(c.name.as_str()) {
                return Err(ModelError::DuplicateClass(c.name.clone()));
            }
        }
        let mut action_names = BTreeSet::new();
        for a in &actions {
            if !action_names.insert(a.name.as_str()) {
                return Err(ModelError::DuplicateAction(a.name.clone()));
            }
        }
        let faults: Vec<usize> = actions
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == ActionKind::Fault)
            .map(|(i, _)| i)
            .collect();
        if faults.len() != 1 {
            return Err(ModelError::FaultActionCount(faults.len()));
        }
        let fault = ActionId(faults[0] as u32);

        let check_class = |c: ClassId| {
            if c.index() < n {
                Ok(())
            } else {
                Err(ModelError::ClassOutOfRange(c.0))
            }
        };
        for e in &edges {
            check_class(e.src)?;
            check_class(e.dst)?;
            if e.action.index() >= actions.len() {
                return Err(ModelError::ActionOutOfRange(e.action.0));
            }
        }
        for t in &time {
            check_class(t.src)?;
            check_class(t.dst)?;
            if t.divergent && t.src != t.dst {
                return Err(ModelError::DivergentNonLoop(
                    classes[t.src.index()].name.clone(),
                    classes[t.dst.index()].name.clone(),
                ));
            }
        }

        let mut edges = edges;
        edges.sort_unstable();
        edges.dedup();

        let time = close_time(n, &time);

        let mut out_edges = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.src.index()].push(i);
        }
        let mut out_time = vec![Vec::new(); n];
        for (i, t) in time.iter().enumerate() {
            out_time[t.src.index()].push(i);
        }

        Ok(QuotientModel { classes, actions, fault, edges, time, out_edges, out_time })
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_ids(&self) -> impl Iterator<Item = ClassId> {
        (0..self.classes.len() as u32).map(ClassId)
    }

    pub fn class(&self, c: ClassId) -> &Class {
        &self.classes[c.index()]
    }

    pub fn classes(&self) -> &[Class] {
        &self.classes
    }

    pub fn is_faulty(&self, c: ClassId) -> bool {
        self.classes[c.index()].faulty
    }

    pub fn observable(&self, c: ClassId) -> ObservableId {
        self.classes[c.index()].observable
    }

    pub fn actions(&self) -> &[ActionLabel] {
        &self.actions
    }

    pub fn action(&self, a: ActionId) -> &ActionLabel {
        &self.actions[a.index()]
    }

    pub fn fault_action(&self) -> ActionId {
        self.fault
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a.name == name).map(|i| ActionId(i as u32))
    }

    pub fn class_by_name(&self, name: &str) -> Option<ClassId> {
        self.classes.iter().position(|c| c.name == name).map(|i| ClassId(i as u32))
    }

    pub fn external_actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        self.actions
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == ActionKind::External)
            .map(|(i, _)| ActionId(i as u32))
    }

    /// Number of observables, i.e. one past the largest observable index used.
    pub fn num_observables(&self) -> usize {
        self.classes.iter().map(|c| c.observable.index() + 1).max().unwrap_or(0)
    }

    pub fn initial_classes(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.class_ids().filter(|c| self.classes[c.index()].initial)
    }

    pub fn edges(&self) -> &[DiscreteEdge] {
        &self.edges
    }

    /// The closed time relation.
    pub fn time_edges(&self) -> &[TimeEdge] {
        &self.time
    }

    pub fn edges_from(&self, c: ClassId) -> impl Iterator<Item = &DiscreteEdge> + '_ {
        self.out_edges[c.index()].iter().map(move |&i| &self.edges[i])
    }

    pub fn time_from(&self, c: ClassId) -> impl Iterator<Item = &TimeEdge> + '_ {
        self.out_time[c.index()].iter().map(move |&i| &self.time[i])
    }

    /// Least superset of `s` closed under time edges and silent (internal or
    /// fault) discrete edges.
    pub fn unobservable_closure(&self, s: &ClassSet) -> ClassSet {
        let mut seen = vec![false; self.classes.len()];
        let mut stack: Vec<ClassId> = Vec::new();
        for c in s.iter() {
            if !seen[c.index()] {
                seen[c.index()] = true;
                stack.push(c);
            }
        }
        while let Some(c) = stack.pop() {
            let silent = self
                .edges_from(c)
                .filter(|e| self.actions[e.action.index()].kind.is_silent())
                .map(|e| e.dst);
            let timed = self.time_from(c).map(|t| t.dst);
            for d in silent.chain(timed) {
                if !seen[d.index()] {
                    seen[d.index()] = true;
                    stack.push(d);
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| ClassId(i as u32))
            .collect()
    }

    /// Classes reachable from the closure of `s` by one `a`-edge that land in
    /// observable `o`.
    pub fn external_successors(&self, s: &ClassSet, a: ActionId, o: ObservableId) -> ClassSet {
        debug_assert_eq!(self.action(a).kind, ActionKind::External);
        let closure = self.unobservable_closure(s);
        closure
            .iter()
            .flat_map(|c| self.edges_from(c))
            .filter(|e| e.action == a && self.observable(e.dst) == o)
            .map(|e| e.dst)
            .collect()
    }

    /// All nonempty external successor sets of `s`, keyed by `(action, observable)`.
    pub fn external_moves(&self, s: &ClassSet) -> BTreeMap<(ActionId, ObservableId), ClassSet> {
        let closure = self.unobservable_closure(s);
        let mut buckets: BTreeMap<(ActionId, ObservableId), Vec<ClassId>> = BTreeMap::new();
        for c in closure.iter() {
            for e in self.edges_from(c) {
                if self.actions[e.action.index()].kind == ActionKind::External {
                    buckets.entry((e.action, self.observable(e.dst))).or_default().push(e.dst);
                }
            }
        }
        buckets.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect()
    }

    /// Classes reachable from the initial classes along any edge.
    pub fn reachable_classes(&self) -> Vec<bool> {
        let mut seen = vec![false; self.classes.len()];
        let mut stack: Vec<ClassId> = self.initial_classes().collect();
        for c in &stack {
            seen[c.index()] = true;
        }
        while let Some(c) = stack.pop() {
            let next = self.edges_from(c).map(|e| e.dst).chain(self.time_from(c).map(|t| t.dst));
            for d in next {
                if !seen[d.index()] {
                    seen[d.index()] = true;
                    stack.push(d);
                }
            }
        }
        seen
    }

    pub fn class_name(&self, c: ClassId) -> &str {
        &self.classes[c.index()].name
    }

    pub fn render_trace(&self, t: &UTrace) -> String {
        let mut out = t.head.to_string();
        for s in &t.steps {
            out.push(' ');
            out.push_str(&self.action(s.action).name);
            out.push(' ');
            out.push_str(&s.obs.to_string());
        }
        out
    }

    /// Renders a class set as `{a,b,c}` using class names.
    pub fn render_set(&self, s: &ClassSet) -> String {
        let names: Vec<&str> = s.iter().map(|c| self.class_name(c)).collect();
        format!("{{{}}}", names.join(","))
    }
}

fn close_time(n: usize, time: &[TimeEdge]) -> Vec<TimeEdge> {
    let mut adj = vec![Vec::new(); n];
    let mut divergent = vec![false; n];
    for t in time {
        if t.src == t.dst {
            divergent[t.src.index()] |= t.divergent;
        } else {
            adj[t.src.index()].push(t.dst);
        }
    }
    let mut closed = Vec::new();
    let mut seen = vec![usize::MAX; n];
    for src in 0..n {
        let mut stack = vec![ClassId(src as u32)];
        seen[src] = src;
        while let Some(c) = stack.pop() {
            closed.push(TimeEdge {
                src: ClassId(src as u32),
                dst: c,
                divergent: c.index() == src && divergent[src],
            });
            for &d in &adj[c.index()] {
                if seen[d.index()] != src {
                    seen[d.index()] = src;
                    stack.push(d);
                }
            }
        }
    }
    closed.sort_unstable();
    closed
}

/// Checks the fault axioms D1-D3, T1 and the conditions on initial classes.
pub fn validate_model(model: &QuotientModel) -> ValidationReport {
    let mut violations = Vec::new();
    let name = |c: ClassId| model.class_name(c).to_string();

    if model.num_classes() == 0 {
        violations.push(Violation {
            rule: Rule::Nonempty,
            subject: Subject::Model,
            message: "model has no classes".into(),
        });
    } else if model.initial_classes().next().is_none() {
        violations.push(Violation {
            rule: Rule::Nonempty,
            subject: Subject::Model,
            message: "model has no initial class".into(),
        });
    }

    for c in model.class_ids() {
        let class = model.class(c);
        if class.initial && class.faulty {
            violations.push(Violation {
                rule: Rule::InitNonFaulty,
                subject: Subject::Class(c),
                message: format!("initial class {} is faulty", name(c)),
            });
        }
        if !class.faulty && !model.edges_from(c).any(|e| e.action == model.fault) {
            violations.push(Violation {
                rule: Rule::D1,
                subject: Subject::Class(c),
                message: format!("non-faulty class {} has no outgoing fault edge", name(c)),
            });
        }
    }

    let used: BTreeSet<ObservableId> = model.classes.iter().map(|c| c.observable).collect();
    for o in 0..model.num_observables() as u32 {
        if !used.contains(&ObservableId(o)) {
            violations.push(Violation {
                rule: Rule::ObsTotal,
                subject: Subject::Model,
                message: format!("observable {} is not carried by any class", ObservableId(o)),
            });
        }
    }

    for e in model.edges() {
        let (sf, df) = (model.is_faulty(e.src), model.is_faulty(e.dst));
        let act = &model.action(e.action).name;
        if e.action == model.fault {
            if sf || !df {
                violations.push(Violation {
                    rule: Rule::D2,
                    subject: Subject::Edge(*e),
                    message: format!(
                        "fault edge {} -{}-> {} must go from a non-faulty to a faulty class",
                        name(e.src),
                        act,
                        name(e.dst)
                    ),
                });
            }
        } else if sf != df {
            violations.push(Violation {
                rule: Rule::D3,
                subject: Subject::Edge(*e),
                message: format!(
                    "edge {} -{}-> {} changes the faulty flag",
                    name(e.src),
                    act,
                    name(e.dst)
                ),
            });
        }
    }

    for t in model.time_edges() {
        if model.is_faulty(t.src) != model.is_faulty(t.dst) {
            violations.push(Violation {
                rule: Rule::T1,
                subject: Subject::Time(t.src, t.dst),
                message: format!(
                    "time edge {} -> {} changes the faulty flag",
                    name(t.src),
                    name(t.dst)
                ),
            });
        }
    }

    ValidationReport { violations }
}

/// Free-function form of [`QuotientModel::unobservable_closure`].
pub fn unobservable_closure(model: &QuotientModel, s: &ClassSet) -> ClassSet {
    model.unobservable_closure(s)
}

/// Free-function form of [`QuotientModel::external_successors`].
pub fn external_successors(
    model: &QuotientModel,
    s: &ClassSet,
    a: ActionId,
    o: ObservableId,
) -> ClassSet {
    model.external_successors(s, a, o)
}

/// Incremental construction by name; handy for fixtures and tests.
#[derive(Debug, Default)]
pub struct ModelBuilder {
    classes: Vec<Class>,
    actions: Vec<ActionLabel>,
    edges: Vec<(String, String, String)>,
    time: Vec<(String, String, bool)>,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn class(mut self, name: &str, faulty: bool, initial: bool, obs: u32) -> Self {
        self.classes.push(Class {
            name: name.into(),
            faulty,
            initial,
            observable: ObservableId(obs),
        });
        self
    }

    pub fn action(mut self, name: &str, kind: ActionKind) -> Self {
        self.actions.push(ActionLabel::new(name, kind));
        self
    }

    pub fn edge(mut self, src: &str, action: &str, dst: &str) -> Self {
        self.edges.push((src.into(), action.into(), dst.into()));
        self
    }

    pub fn time(mut self, src: &str, dst: &str) -> Self {
        self.time.push((src.into(), dst.into(), false));
        self
    }

    pub fn divergent(mut self, class: &str) -> Self {
        self.time.push((class.into(), class.into(), true));
        self
    }

    pub fn build(self) -> Result<QuotientModel, ModelError> {
        let class_idx: BTreeMap<&str, ClassId> = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.name.as_str(), ClassId(i as u32)))
            .collect();
        let action_idx: BTreeMap<&str, ActionId> = self
            .actions
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name.as_str(), ActionId(i as u32)))
            .collect();
        let lookup_class = |n: &str| {
            class_idx.get(n).copied().ok_or_else(|| ModelError::UnknownClass(n.into()))
        };
        let lookup_action = |n: &str| {
            action_idx.get(n).copied().ok_or_else(|| ModelError::UnknownAction(n.into()))
        };
        let edges = self
            .edges
            .iter()
            .map(|(s, a, d)| {
                Ok(DiscreteEdge { src: lookup_class(s)?, action: lookup_action(a)?, dst: lookup_class(d)? })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        let time = self
            .time
            .iter()
            .map(|(s, d, div)| Ok(TimeEdge { src: lookup_class(s)?, dst: lookup_class(d)?, divergent: *div }))
            .collect::<Result<Vec<_>, ModelError>>()?;
        QuotientModel::new(self.classes, self.actions, edges, time)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::fixtures;

    fn set(m: &QuotientModel, names: &[&str]) -> ClassSet {
        names.iter().map(|n| m.class_by_name(n).unwrap()).collect()
    }

    #[test]
    fn q1_is_valid() {
        let report = validate_model(&fixtures::q1());
        assert!(report.ok(), "{:?}", report);
    }

    #[test]
    fn missing_fault_edge_violates_d1() {
        let m = ModelBuilder::new()
            .class("n0", false, true, 0)
            .class("n1", false, false, 1)
            .class("f0", true, false, 0)
            .class("f1", true, false, 1)
            .action("f", ActionKind::Fault)
            .action("tick", ActionKind::External)
            .edge("n0", "tick", "n1")
            .edge("n1", "tick", "n0")
            .edge("n0", "f", "f0")
            .edge("f0", "tick", "f0")
            .edge("f1", "tick", "f1")
            .build()
            .unwrap();
        let report = validate_model(&m);
        assert_eq!(report.violations.len(), 1, "{report:?}");
        assert_eq!(report.violations[0].rule, Rule::D1);
        assert_eq!(report.violations[0].subject, Subject::Class(m.class_by_name("n1").unwrap()));
    }

    #[test]
    fn flag_changing_tick_violates_d3() {
        let m = fixtures::q1_builder().edge("f0", "tick", "n0").build().unwrap();
        let report = validate_model(&m);
        assert!(report.has(Rule::D3));
        assert!(!report.has(Rule::D1));
    }

    #[test]
    fn other_axioms_are_reported() {
        let m = ModelBuilder::new()
            .class("n0", false, true, 0)
            .class("f0", true, true, 0)
            .class("f1", true, false, 2)
            .action("f", ActionKind::Fault)
            .action("tick", ActionKind::External)
            .edge("n0", "f", "f0")
            .edge("f0", "f", "f1")
            .time("f1", "n0")
            .build()
            .unwrap();
        let report = validate_model(&m);
        for rule in [Rule::D2, Rule::T1, Rule::InitNonFaulty, Rule::ObsTotal] {
            assert!(report.has(rule), "missing {rule}: {report:?}");
        }

        let empty = ModelBuilder::new().action("f", ActionKind::Fault).build().unwrap();
        assert!(validate_model(&empty).has(Rule::Nonempty));
    }

    #[test]
    fn structural_errors() {
        let two_faults = ModelBuilder::new()
            .action("f", ActionKind::Fault)
            .action("g", ActionKind::Fault)
            .build();
        assert!(matches!(two_faults, Err(ModelError::FaultActionCount(2))));
        let dangling = ModelBuilder::new()
            .class("a", false, true, 0)
            .action("f", ActionKind::Fault)
            .edge("a", "f", "b")
            .build();
        assert!(matches!(dangling, Err(ModelError::UnknownClass(_))));
        let dup = ModelBuilder::new()
            .class("a", false, true, 0)
            .class("a", false, true, 0)
            .action("f", ActionKind::Fault)
            .build();
        assert!(matches!(dup, Err(ModelError::DuplicateClass(_))));
    }

    #[test]
    fn time_relation_is_closed() {
        let m = ModelBuilder::new()
            .class("a", false, true, 0)
            .class("b", false, false, 0)
            .class("c", false, false, 0)
            .action("f", ActionKind::Fault)
            .time("a", "b")
            .time("b", "c")
            .build()
            .unwrap();
        let pairs: Vec<(u32, u32)> = m.time_edges().iter().map(|t| (t.src.0, t.dst.0)).collect();
        assert_eq!(pairs, vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]);
    }

    #[test]
    fn closure_examples() {
        let q1 = fixtures::q1();
        assert_eq!(q1.unobservable_closure(&set(&q1, &["n0"])), set(&q1, &["n0", "f0"]));
        assert_eq!(q1.unobservable_closure(&ClassSet::new()), ClassSet::new());
        assert_eq!(q1.unobservable_closure(&set(&q1, &["f1"])), set(&q1, &["f1"]));
    }

    #[test]
    fn successor_examples() {
        let q1 = fixtures::q1();
        let tick = q1.action_by_name("tick").unwrap();
        let n0 = set(&q1, &["n0"]);
        assert_eq!(q1.external_successors(&n0, tick, ObservableId(1)), set(&q1, &["n1"]));
        assert_eq!(q1.external_successors(&n0, tick, ObservableId(0)), set(&q1, &["f0"]));
        assert!(q1.external_successors(&ClassSet::new(), tick, ObservableId(0)).is_empty());
    }

    #[test]
    fn observable_parses_both_forms() {
        assert_eq!("o3".parse::<ObservableId>().unwrap(), ObservableId(3));
        assert_eq!("3".parse::<ObservableId>().unwrap(), ObservableId(3));
        assert!("x".parse::<ObservableId>().is_err());
    }
}
