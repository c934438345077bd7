//! JSON model file format.
//!
//! ```json
//! {
//!   "classes": [{"id": "n0", "faulty": false, "initial": true, "obs": 0}],
//!   "actions": [{"name": "f", "kind": "fault"}, {"name": "tick", "kind": "external"}],
//!   "edges":   [{"src": "n0", "action": "f", "dst": "f0"}],
//!   "time":    [{"src": "n0", "dst": "n1"}, {"src": "x", "dst": "x", "divergent": true}]
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{
    ActionId, ActionKind, ActionLabel, Class, ClassId, DiscreteEdge, ModelError, ObservableId,
    QuotientModel, TimeEdge,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub classes: Vec<ClassEntry>,
    pub actions: Vec<ActionEntry>,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
    #[serde(default)]
    pub time: Vec<TimeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassEntry {
    pub id: String,
    pub faulty: bool,
    pub initial: bool,
    pub obs: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntry {
    pub name: String,
    pub kind: ActionKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub src: String,
    pub action: String,
    pub dst: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeEntry {
    pub src: String,
    pub dst: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub divergent: bool,
}

impl ModelFile {
    pub fn into_model(self) -> Result<QuotientModel, ModelError> {
        let class_idx: BTreeMap<&str, ClassId> = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.as_str(), ClassId(i as u32)))
            .collect();
        let action_idx: BTreeMap<&str, ActionId> = self
            .actions
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name.as_str(), ActionId(i as u32)))
            .collect();
        let class = |n: &str| class_idx.get(n).copied().ok_or_else(|| ModelError::UnknownClass(n.into()));
        let action =
            |n: &str| action_idx.get(n).copied().ok_or_else(|| ModelError::UnknownAction(n.into()));

        let edges = self
            .edges
            .iter()
            .map(|e| Ok(DiscreteEdge { src: class(&e.src)?, action: action(&e.action)?, dst: class(&e.dst)? }))
            .collect::<Result<Vec<_>, ModelError>>()?;
        let time = self
            .time
            .iter()
            .map(|t| Ok(TimeEdge { src: class(&t.src)?, dst: class(&t.dst)?, divergent: t.divergent }))
            .collect::<Result<Vec<_>, ModelError>>()?;
        let classes = self
            .classes
            .iter()
            .map(|c| Class {
                name: c.id.clone(),
                faulty: c.faulty,
                initial: c.initial,
                observable: ObservableId(c.obs),
            })
            .collect();
        let actions = self.actions.iter().map(|a| ActionLabel::new(a.name.clone(), a.kind)).collect();
        QuotientModel::new(classes, actions, edges, time)
    }

    pub fn from_model(model: &QuotientModel) -> Self {
        let name = |c: ClassId| model.class_name(c).to_string();
        ModelFile {
            classes: model
                .classes()
                .iter()
                .map(|c| ClassEntry {
                    id: c.name.clone(),
                    faulty: c.faulty,
                    initial: c.initial,
                    obs: c.observable.0,
                })
                .collect(),
            actions: model
                .actions()
                .iter()
                .map(|a| ActionEntry { name: a.name.clone(), kind: a.kind })
                .collect(),
            edges: model
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    src: name(e.src),
                    action: model.action(e.action).name.clone(),
                    dst: name(e.dst),
                })
                .collect(),
            time: model
                .time_edges()
                .iter()
                .map(|t| TimeEntry { src: name(t.src), dst: name(t.dst), divergent: t.divergent })
                .collect(),
        }
    }
}

impl QuotientModel {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.into_model()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from_model(self)).expect("model file serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"classes": [], "actions": [{"name": "f", "kind": "fault"}], "extra": 1}"#;
        assert!(matches!(QuotientModel::from_json(text), Err(ModelError::Json(_))));
        let text = r#"{"classes": [{"id": "a", "faulty": false, "initial": true, "obs": 0, "x": 1}],
                       "actions": [{"name": "f", "kind": "fault"}]}"#;
        assert!(QuotientModel::from_json(text).is_err());
    }

    #[test]
    fn bad_kind_is_rejected() {
        let text = r#"{"classes": [], "actions": [{"name": "f", "kind": "silent"}]}"#;
        assert!(QuotientModel::from_json(text).is_err());
    }

    #[test]
    fn json_round_trip_preserves_model() {
        for m in [fixtures::q1(), fixtures::q2()] {
            let back = QuotientModel::from_json(&m.to_json()).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn divergent_flag_survives() {
        let text = r#"{"classes": [{"id": "a", "faulty": false, "initial": true, "obs": 0}],
                       "actions": [{"name": "f", "kind": "fault"}],
                       "time": [{"src": "a", "dst": "a", "divergent": true}]}"#;
        let m = QuotientModel::from_json(text).unwrap();
        assert!(m.time_edges()[0].divergent);
        assert!(m.to_json().contains("\"divergent\": true"));
    }
}
