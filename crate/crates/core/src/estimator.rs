//! Deterministic state estimator built by subset construction over a quotient.
//!
//! An estimator state is the set of classes the system may occupy right after
//! the last observed external action, given everything observed so far. Only
//! the fragment reachable from the initial estimates is constructed.

use std::collections::{BTreeMap, VecDeque};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ActionId, ClassId, ClassSet, ObservableId, QuotientModel, UTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Faulty,
    #[serde(rename = "nonfaulty")]
    NonFaulty,
    Indeterminate,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Faulty => "faulty",
            Classification::NonFaulty => "nonfaulty",
            Classification::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EstimatorState {
    pub members: ClassSet,
    pub classification: Classification,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EstimatorError {
    #[error("cannot classify an empty set of classes")]
    EmptySet,
    #[error("estimator exceeds {0} states")]
    TooManyStates(usize),
}

/// Faulty iff every member is faulty, non-faulty iff none is.
pub fn classify(s: &ClassSet, model: &QuotientModel) -> Result<Classification, EstimatorError> {
    if s.is_empty() {
        return Err(EstimatorError::EmptySet);
    }
    let faulty = s.iter().filter(|&c| model.is_faulty(c)).count();
    Ok(if faulty == s.len() {
        Classification::Faulty
    } else if faulty == 0 {
        Classification::NonFaulty
    } else {
        Classification::Indeterminate
    })
}

fn wrap(model: &QuotientModel, members: ClassSet) -> Option<EstimatorState> {
    let classification = classify(&members, model).ok()?;
    Some(EstimatorState { members, classification })
}

/// One estimate per observable that some initial class carries.
pub fn initial_estimates(model: &QuotientModel) -> BTreeMap<ObservableId, EstimatorState> {
    let mut by_obs: BTreeMap<ObservableId, Vec<ClassId>> = BTreeMap::new();
    for c in model.initial_classes() {
        by_obs.entry(model.observable(c)).or_default().push(c);
    }
    by_obs
        .into_iter()
        .filter_map(|(o, cs)| wrap(model, cs.into_iter().collect()).map(|s| (o, s)))
        .collect()
}

/// Estimator transition; `None` when no execution is consistent with `(a, o)`.
pub fn delta(
    model: &QuotientModel,
    s: &ClassSet,
    a: ActionId,
    o: ObservableId,
) -> Option<EstimatorState> {
    wrap(model, model.external_successors(s, a, o))
}

#[derive(Debug, Clone)]
pub struct EstimatorGraph {
    model: Arc<QuotientModel>,
    states: Vec<EstimatorState>,
    initials: BTreeMap<ObservableId, StateId>,
    transitions: BTreeMap<(StateId, ActionId, ObservableId), StateId>,
}

impl EstimatorGraph {
    pub fn model(&self) -> &QuotientModel {
        &self.model
    }

    pub fn model_arc(&self) -> Arc<QuotientModel> {
        Arc::clone(&self.model)
    }

    pub fn states(&self) -> &[EstimatorState] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> &EstimatorState {
        &self.states[id.index()]
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initials(&self) -> &BTreeMap<ObservableId, StateId> {
        &self.initials
    }

    pub fn initial(&self, o: ObservableId) -> Option<StateId> {
        self.initials.get(&o).copied()
    }

    pub fn transitions(&self) -> &BTreeMap<(StateId, ActionId, ObservableId), StateId> {
        &self.transitions
    }

    pub fn successor(&self, s: StateId, a: ActionId, o: ObservableId) -> Option<StateId> {
        self.transitions.get(&(s, a, o)).copied()
    }

    /// Outgoing transitions of `s` as `(action, observable, target)`.
    pub fn transitions_from(
        &self,
        s: StateId,
    ) -> impl Iterator<Item = (ActionId, ObservableId, StateId)> + '_ {
        let lo = (s, ActionId(0), ObservableId(0));
        let hi = (StateId(s.0 + 1), ActionId(0), ObservableId(0));
        self.transitions.range(lo..hi).map(|(&(_, a, o), &d)| (a, o, d))
    }

    pub fn classification(&self, s: StateId) -> Classification {
        self.states[s.index()].classification
    }

    /// State sequence visited by `trace`, or `None` if the trace leaves the
    /// estimator.
    pub fn run(&self, trace: &UTrace) -> Option<Vec<StateId>> {
        let mut cur = self.initial(trace.head)?;
        let mut out = vec![cur];
        for step in &trace.steps {
            cur = self.successor(cur, step.action, step.obs)?;
            out.push(cur);
        }
        Some(out)
    }

    pub fn find(&self, members: &ClassSet) -> Option<StateId> {
        self.states.iter().position(|s| &s.members == members).map(|i| StateId(i as u32))
    }
}

/// Breadth-first subset construction of the reachable estimator.
pub fn build_estimator(model: &QuotientModel) -> EstimatorGraph {
    build_estimator_capped(model, usize::MAX).expect("uncapped construction cannot overflow")
}

pub fn build_estimator_capped(
    model: &QuotientModel,
    max_states: usize,
) -> Result<EstimatorGraph, EstimatorError> {
    let mut states: Vec<EstimatorState> = Vec::new();
    let mut index: HashMap<ClassSet, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |s: EstimatorState, states: &mut Vec<EstimatorState>, queue: &mut VecDeque<StateId>| {
        if let Some(&id) = index.get(&s.members) {
            return Ok(id);
        }
        if states.len() >= max_states {
            return Err(EstimatorError::TooManyStates(max_states));
        }
        let id = StateId(states.len() as u32);
        index.insert(s.members.clone(), id);
        states.push(s);
        queue.push_back(id);
        Ok(id)
    };

    let mut initials = BTreeMap::new();
    for (o, s) in initial_estimates(model) {
        let id = intern(s, &mut states, &mut queue)?;
        initials.insert(o, id);
    }

    let mut transitions = BTreeMap::new();
    while let Some(id) = queue.pop_front() {
        let moves = model.external_moves(&states[id.index()].members);
        for ((a, o), members) in moves {
            let next = wrap(model, members).expect("external_moves yields nonempty sets");
            let dst = intern(next, &mut states, &mut queue)?;
            transitions.insert((id, a, o), dst);
        }
    }

    Ok(EstimatorGraph { model: Arc::new(model.clone()), states, initials, transitions })
}

/// Serialized estimator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorFile {
    pub states: Vec<StateEntry>,
    pub initials: BTreeMap<String, u32>,
    pub transitions: Vec<TransitionEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub id: u32,
    pub members: Vec<String>,
    pub class: Classification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub src: u32,
    pub action: String,
    pub obs: u32,
    pub dst: u32,
}

impl EstimatorGraph {
    pub fn to_file(&self) -> EstimatorFile {
        let m = self.model();
        EstimatorFile {
            states: self
                .states
                .iter()
                .enumerate()
                .map(|(i, s)| StateEntry {
                    id: i as u32,
                    members: s.members.iter().map(|c| m.class_name(c).to_string()).collect(),
                    class: s.classification,
                })
                .collect(),
            initials: self.initials.iter().map(|(o, s)| (o.to_string(), s.0)).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|(&(s, a, o), &d)| TransitionEntry {
                    src: s.0,
                    action: m.action(a).name.clone(),
                    obs: o.0,
                    dst: d.0,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("estimator serializes")
    }
}
