//! Executable diagnoser: a Moore machine over estimator states.
//!
//! The machine answers `yes` exactly in estimator states whose members are all
//! faulty. Indeterminate states answer `no`; the [`Status`] carried by each
//! verdict still exposes the indeterminacy to callers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimator::{Classification, EstimatorFile, EstimatorGraph, StateEntry, StateId, TransitionEntry};
use crate::model::{ActionId, ObservableId, UTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    DeterminateFaulty,
    DeterminateNonFaulty,
    Indeterminate,
}

impl From<Classification> for Status {
    fn from(c: Classification) -> Self {
        match c {
            Classification::Faulty => Status::DeterminateFaulty,
            Classification::NonFaulty => Status::DeterminateNonFaulty,
            Classification::Indeterminate => Status::Indeterminate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Verdict {
    pub answer: Answer,
    pub status: Status,
}

impl Verdict {
    fn of(status: Status) -> Self {
        let answer = if status == Status::DeterminateFaulty { Answer::Yes } else { Answer::No };
        Verdict { answer, status }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let answer = match self.answer {
            Answer::Yes => "yes",
            Answer::No => "no",
        };
        let status = match self.status {
            Status::DeterminateFaulty => "determinate-faulty",
            Status::DeterminateNonFaulty => "determinate-nonfaulty",
            Status::Indeterminate => "indeterminate",
        };
        write!(f, "{answer} {status}")
    }
}

/// One observation delivered to the diagnoser.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObsEvent {
    Init(ObservableId),
    Step { action: ActionId, obs: ObservableId },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("no execution of the model is consistent with the observations")]
    NoConsistentExecution,
    #[error("init event after the stream has started")]
    InitNotFirst,
    #[error("stream must begin with an init event")]
    MissingInit,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("event {index}: {source}")]
pub struct RunError {
    /// Position of the failing event; 0 is the initial observable.
    pub index: usize,
    pub source: StepError,
}

#[derive(Debug, Error)]
pub enum DiagnoserFileError {
    #[error("malformed diagnoser file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("diagnoser file refers to unknown state {0}")]
    UnknownState(u32),
    #[error("diagnoser file refers to unknown action `{0}`")]
    UnknownAction(String),
    #[error("bad observable `{0}`")]
    BadObservable(String),
    #[error("state {0} has output {1:?} inconsistent with its class")]
    InconsistentOutput(u32, Answer),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EventParseError {
    #[error("empty event line")]
    Empty,
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("bad observable `{0}`")]
    BadObservable(String),
    #[error("expected `init <obs>` or `<action> <obs>`, got `{0}`")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnoserAutomaton {
    actions: Vec<String>,
    members: Vec<Vec<String>>,
    status: Vec<Status>,
    initials: BTreeMap<ObservableId, StateId>,
    transitions: BTreeMap<(StateId, ActionId, ObservableId), StateId>,
}

/// Builds the diagnoser from an estimator; well-defined whether or not the
/// model is diagnosable.
pub fn synthesize(est: &EstimatorGraph) -> DiagnoserAutomaton {
    let model = est.model();
    DiagnoserAutomaton {
        actions: model.actions().iter().map(|a| a.name.clone()).collect(),
        members: est
            .states()
            .iter()
            .map(|s| s.members.iter().map(|c| model.class_name(c).to_string()).collect())
            .collect(),
        status: est.states().iter().map(|s| s.classification.into()).collect(),
        initials: est.initials().clone(),
        transitions: est.transitions().clone(),
    }
}

impl DiagnoserAutomaton {
    pub fn num_states(&self) -> usize {
        self.status.len()
    }

    pub fn output(&self, s: StateId) -> Answer {
        Verdict::of(self.status[s.index()]).answer
    }

    pub fn verdict(&self, s: StateId) -> Verdict {
        Verdict::of(self.status[s.index()])
    }

    pub fn initials(&self) -> &BTreeMap<ObservableId, StateId> {
        &self.initials
    }

    pub fn transitions(&self) -> &BTreeMap<(StateId, ActionId, ObservableId), StateId> {
        &self.transitions
    }

    pub fn members(&self, s: StateId) -> &[String] {
        &self.members[s.index()]
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name).map(|i| ActionId(i as u32))
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.index()]
    }

    /// Advances the machine. `current` is `None` before the first event.
    pub fn step(&self, current: Option<StateId>, ev: ObsEvent) -> Result<(StateId, Verdict), StepError> {
        let next = match (current, ev) {
            (None, ObsEvent::Init(o)) => self.initials.get(&o).copied(),
            (Some(_), ObsEvent::Init(_)) => return Err(StepError::InitNotFirst),
            (None, ObsEvent::Step { .. }) => return Err(StepError::MissingInit),
            (Some(s), ObsEvent::Step { action, obs }) => self.transitions.get(&(s, action, obs)).copied(),
        };
        let next = next.ok_or(StepError::NoConsistentExecution)?;
        Ok((next, self.verdict(next)))
    }

    /// Verdict after the initial observable and after every step of `trace`.
    pub fn run_trace(&self, trace: &UTrace) -> Result<Vec<Verdict>, RunError> {
        let (mut cur, v) = self
            .step(None, ObsEvent::Init(trace.head))
            .map_err(|source| RunError { index: 0, source })?;
        let mut out = vec![v];
        for (i, s) in trace.steps.iter().enumerate() {
            let (next, v) = self
                .step(Some(cur), ObsEvent::Step { action: s.action, obs: s.obs })
                .map_err(|source| RunError { index: i + 1, source })?;
            cur = next;
            out.push(v);
        }
        Ok(out)
    }

    /// Parses one line of the event stream: `init <obs>` or `<action> <obs>`.
    pub fn parse_event(&self, line: &str) -> Result<ObsEvent, EventParseError> {
        let mut words = line.split_whitespace();
        let (Some(head), Some(obs), None) = (words.next(), words.next(), words.next()) else {
            return Err(if line.trim().is_empty() {
                EventParseError::Empty
            } else {
                EventParseError::Malformed(line.trim().to_string())
            });
        };
        let obs: ObservableId = obs.parse().map_err(|_| EventParseError::BadObservable(obs.to_string()))?;
        if head == "init" {
            return Ok(ObsEvent::Init(obs));
        }
        let action = self.action_id(head).ok_or_else(|| EventParseError::UnknownAction(head.to_string()))?;
        Ok(ObsEvent::Step { action, obs })
    }
}

/// Serialized diagnoser: the estimator schema plus the action table and the
/// Moore output of every state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoserFile {
    pub actions: Vec<String>,
    pub states: Vec<StateEntry>,
    pub initials: BTreeMap<String, u32>,
    pub transitions: Vec<TransitionEntry>,
    pub output: BTreeMap<u32, Answer>,
}

impl DiagnoserAutomaton {
    pub fn to_file(&self) -> DiagnoserFile {
        let est = EstimatorFile {
            states: self
                .status
                .iter()
                .enumerate()
                .map(|(i, st)| StateEntry {
                    id: i as u32,
                    members: self.members[i].clone(),
                    class: match st {
                        Status::DeterminateFaulty => Classification::Faulty,
                        Status::DeterminateNonFaulty => Classification::NonFaulty,
                        Status::Indeterminate => Classification::Indeterminate,
                    },
                })
                .collect(),
            initials: self.initials.iter().map(|(o, s)| (o.to_string(), s.0)).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|(&(s, a, o), &d)| TransitionEntry {
                    src: s.0,
                    action: self.actions[a.index()].clone(),
                    obs: o.0,
                    dst: d.0,
                })
                .collect(),
        };
        DiagnoserFile {
            actions: self.actions.clone(),
            states: est.states,
            initials: est.initials,
            transitions: est.transitions,
            output: (0..self.num_states() as u32).map(|i| (i, self.output(StateId(i)))).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("diagnoser serializes")
    }

    pub fn from_file(file: DiagnoserFile) -> Result<Self, DiagnoserFileError> {
        let n = file.states.len() as u32;
        let state = |id: u32| if id < n { Ok(StateId(id)) } else { Err(DiagnoserFileError::UnknownState(id)) };
        let mut members = vec![Vec::new(); n as usize];
        let mut status = vec![Status::Indeterminate; n as usize];
        for s in &file.states {
            let id = state(s.id)?;
            members[id.index()] = s.members.clone();
            status[id.index()] = s.class.into();
        }
        for (&id, &answer) in &file.output {
            let expected = Verdict::of(status[state(id)?.index()]).answer;
            if expected != answer {
                return Err(DiagnoserFileError::InconsistentOutput(id, answer));
            }
        }
        let mut initials = BTreeMap::new();
        for (o, &s) in &file.initials {
            let o: ObservableId = o.parse().map_err(|_| DiagnoserFileError::BadObservable(o.clone()))?;
            initials.insert(o, state(s)?);
        }
        let mut transitions = BTreeMap::new();
        for t in &file.transitions {
            let a = file
                .actions
                .iter()
                .position(|x| x == &t.action)
                .ok_or_else(|| DiagnoserFileError::UnknownAction(t.action.clone()))?;
            transitions.insert((state(t.src)?, ActionId(a as u32), ObservableId(t.obs)), state(t.dst)?);
        }
        Ok(DiagnoserAutomaton { actions: file.actions, members, status, initials, transitions })
    }

    pub fn from_json(text: &str) -> Result<Self, DiagnoserFileError> {
        Self::from_file(serde_json::from_str(text)?)
    }
}
