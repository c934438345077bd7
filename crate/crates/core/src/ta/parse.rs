//! TA file format and syntactic validation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::concrete;
use super::region::enumerate_regions;
use super::syntax::{parse_constraint, parse_pred, SyntaxError, SyntaxErrorKind};
use super::{
    Clock, ClockConstraint, ClockId, Location, ObservationCell, TaEdge, TaError,
    TimedAutomatonWithFaults,
};
use crate::model::{ActionId, ActionKind, ActionLabel, ObservableId, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaFile {
    pub locations: Vec<LocationEntry>,
    pub clocks: ClocksEntry,
    pub edges: Vec<EdgeEntry>,
    pub observation: Vec<ObservationEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationEntry {
    pub name: String,
    pub faulty: bool,
    pub initial: bool,
    #[serde(default)]
    pub invariant: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClocksEntry {
    #[serde(default)]
    pub internal: Vec<String>,
    #[serde(default)]
    pub external: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub src: String,
    pub dst: String,
    pub action: String,
    pub kind: ActionKind,
    #[serde(default)]
    pub guard: Vec<String>,
    #[serde(default)]
    pub resets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationEntry {
    pub id: u32,
    pub pred: String,
}

/// 1-based line and column of the first occurrence of the JSON string
/// literal `s` in `text`, pointing just inside the opening quote.
fn locate(text: &str, s: &str) -> (usize, usize) {
    let quoted = serde_json::to_string(s).unwrap_or_default();
    let Some(at) = text.find(&quoted) else { return (0, 0) };
    let before = &text[..at + 1];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn error(&self, anchor: &str, message: String) -> TaError {
        let (line, column) = locate(self.text, anchor);
        TaError::Parse { line, column, message }
    }

    fn syntax(&self, src: &str, e: SyntaxError, internal: &[String]) -> TaError {
        let (line, column) = locate(self.text, src);
        let column = column + e.offset;
        match e.kind {
            SyntaxErrorKind::NonIntegral(_) => TaError::NonIntegral { line, column, text: src.to_string() },
            SyntaxErrorKind::UnknownClock(name) if internal.contains(&name) => TaError::Parse {
                line,
                column,
                message: format!("clock `{name}` is internal and cannot appear in an observation"),
            },
            kind => TaError::Parse { line, column, message: format!("in `{src}`: {kind}") },
        }
    }
}

fn rule(rule: Rule, message: String) -> TaError {
    TaError::Rule { rule, message }
}

/// Reads a TA file and checks it: names resolve, constants are natural
/// numbers, the fault axioms hold syntactically, and the observation cells
/// partition the external-clock space.
pub fn parse_ta(text: &str) -> Result<TimedAutomatonWithFaults, TaError> {
    let file: TaFile = serde_json::from_str(text).map_err(|e| TaError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.resolve(text)
}

impl TaFile {
    fn resolve(self, text: &str) -> Result<TimedAutomatonWithFaults, TaError> {
        let ctx = Ctx { text };

        let mut clocks: Vec<Clock> = Vec::new();
        for (names, external) in [(&self.clocks.external, true), (&self.clocks.internal, false)] {
            for name in names {
                if clocks.iter().any(|c| &c.name == name) {
                    return Err(ctx.error(name, format!("duplicate clock `{name}`")));
                }
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(ctx.error(name, format!("invalid clock name `{name}`")));
                }
                clocks.push(Clock { name: name.clone(), external });
            }
        }
        let clock_index = |n: &str| clocks.iter().position(|c| c.name == n).map(|i| ClockId(i as u32));
        let external_index =
            |n: &str| clocks.iter().position(|c| c.name == n && c.external).map(|i| ClockId(i as u32));
        let none: Vec<String> = Vec::new();
        let conj = |items: &[String]| -> Result<Vec<ClockConstraint>, TaError> {
            items
                .iter()
                .map(|s| parse_constraint(s, &clock_index).map_err(|e| ctx.syntax(s, e, &none)))
                .collect()
        };

        let mut locations = Vec::new();
        let mut loc_index: BTreeMap<&str, usize> = BTreeMap::new();
        for l in &self.locations {
            if loc_index.insert(&l.name, locations.len()).is_some() {
                return Err(ctx.error(&l.name, format!("duplicate location `{}`", l.name)));
            }
            locations.push(Location {
                name: l.name.clone(),
                faulty: l.faulty,
                initial: l.initial,
                invariant: conj(&l.invariant)?,
            });
        }

        let mut actions: Vec<ActionLabel> = Vec::new();
        let mut edges = Vec::new();
        for e in &self.edges {
            let loc = |n: &str| {
                loc_index.get(n).copied().ok_or_else(|| ctx.error(n, format!("unknown location `{n}`")))
            };
            let (src, dst) = (loc(&e.src)?, loc(&e.dst)?);
            let action = match actions.iter().position(|a| a.name == e.action) {
                Some(i) if actions[i].kind != e.kind => {
                    return Err(ctx.error(
                        &e.action,
                        format!("action `{}` used with kinds {:?} and {:?}", e.action, actions[i].kind, e.kind),
                    ))
                }
                Some(i) => ActionId(i as u32),
                None => {
                    actions.push(ActionLabel::new(e.action.clone(), e.kind));
                    ActionId(actions.len() as u32 - 1)
                }
            };
            let mut resets = Vec::new();
            for r in &e.resets {
                let c = clock_index(r).ok_or_else(|| ctx.error(r, format!("unknown clock `{r}` in resets")))?;
                if !resets.contains(&c) {
                    resets.push(c);
                }
            }
            resets.sort();
            edges.push(TaEdge { src, dst, action, guard: conj(&e.guard)?, resets });
        }

        if let Some(second) = actions.iter().filter(|a| a.kind == ActionKind::Fault).nth(1) {
            return Err(ctx.error(&second.name, format!("second fault action `{}`; exactly one is allowed", second.name)));
        }

        let internal: Vec<String> = self.clocks.internal.clone();
        let mut observation = Vec::new();
        for o in &self.observation {
            let pred = parse_pred(&o.pred, &external_index).map_err(|e| ctx.syntax(&o.pred, e, &internal))?;
            observation.push(ObservationCell { id: ObservableId(o.id), pred });
        }
        observation.sort_by_key(|o| o.id);

        let ta = TimedAutomatonWithFaults { locations, clocks, actions, edges, observation };
        check_axioms(&ta)?;
        check_partition(&ta)?;
        Ok(ta)
    }
}

fn check_axioms(ta: &TimedAutomatonWithFaults) -> Result<(), TaError> {
    if ta.locations.is_empty() {
        return Err(rule(Rule::Nonempty, "automaton has no locations".into()));
    }
    if !ta.locations.iter().any(|l| l.initial) {
        return Err(rule(Rule::Nonempty, "automaton has no initial location".into()));
    }
    if let Some(l) = ta.locations.iter().find(|l| l.initial && l.faulty) {
        return Err(rule(Rule::InitNonFaulty, format!("initial location {} is faulty", l.name)));
    }
    let name = |i: usize| ta.locations[i].name.as_str();
    for e in &ta.edges {
        let (sf, df) = (ta.locations[e.src].faulty, ta.locations[e.dst].faulty);
        let act = &ta.actions[e.action.index()];
        if act.kind == ActionKind::Fault {
            if sf || !df {
                return Err(rule(
                    Rule::D2,
                    format!(
                        "fault edge {} -{}-> {} must go from a non-faulty to a faulty location",
                        name(e.src),
                        act.name,
                        name(e.dst)
                    ),
                ));
            }
        } else if sf != df {
            return Err(rule(
                Rule::D3,
                format!("edge {} -{}-> {} changes the faulty flag", name(e.src), act.name, name(e.dst)),
            ));
        }
    }
    for (i, l) in ta.locations.iter().enumerate() {
        if !l.faulty && !ta.has_fault_edge(i) {
            return Err(rule(Rule::D1, format!("non-faulty location {} has no outgoing fault edge", l.name)));
        }
    }
    if ta.observation.is_empty() {
        return Err(rule(Rule::ObsTotal, "observation has no cells".into()));
    }
    for (i, o) in ta.observation.iter().enumerate() {
        if o.id.index() != i {
            return Err(rule(Rule::ObsTotal, format!("observation ids must be 0..{} without gaps or repeats", ta.observation.len())));
        }
    }
    Ok(())
}

/// Every region of the external clocks must satisfy exactly one cell.
fn check_partition(ta: &TimedAutomatonWithFaults) -> Result<(), TaError> {
    let ext = ta.external_clocks();
    let all_ceil = ta.ceilings();
    let ext_ceil: Vec<u32> = ext.iter().map(|c| all_ceil[c.index()]).collect();
    let n = ta.num_clocks();
    for r in enumerate_regions(&ext_ceil) {
        let full = r.embed(&ext, n);
        let holding: Vec<&ObservationCell> = ta.observation.iter().filter(|o| full.eval(&o.pred)).collect();
        if holding.len() == 1 {
            continue;
        }
        let point = concrete::representative(&r, &ext_ceil);
        let witness = concrete::render(&point, &|c| ta.clock_name(ext[c.index()]).to_string());
        let problem = if holding.is_empty() {
            "no cell holds".to_string()
        } else {
            let ids: Vec<String> = holding.iter().map(|o| o.id.to_string()).collect();
            format!("cells {} overlap", ids.join(" and "))
        };
        return Err(TaError::Partition { witness, problem });
    }
    Ok(())
}

impl TimedAutomatonWithFaults {
    pub fn to_file(&self) -> TaFile {
        let conj = |cs: &[ClockConstraint]| cs.iter().map(|c| self.render_constraint(c)).collect();
        let names = |external: bool| self.clocks.iter().filter(|c| c.external == external).map(|c| c.name.clone()).collect();
        TaFile {
            locations: self
                .locations
                .iter()
                .map(|l| LocationEntry {
                    name: l.name.clone(),
                    faulty: l.faulty,
                    initial: l.initial,
                    invariant: conj(&l.invariant),
                })
                .collect(),
            clocks: ClocksEntry { internal: names(false), external: names(true) },
            edges: self
                .edges
                .iter()
                .map(|e| EdgeEntry {
                    src: self.locations[e.src].name.clone(),
                    dst: self.locations[e.dst].name.clone(),
                    action: self.actions[e.action.index()].name.clone(),
                    kind: self.actions[e.action.index()].kind,
                    guard: conj(&e.guard),
                    resets: e.resets.iter().map(|&c| self.clock_name(c).to_string()).collect(),
                })
                .collect(),
            observation: self
                .observation
                .iter()
                .map(|o| ObservationEntry { id: o.id.0, pred: self.render_pred(&o.pred) })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("TA file serializes")
    }

    /// Whether some fault edge leaves `loc`.
    pub fn has_fault_edge(&self, loc: usize) -> bool {
        self.edges.iter().any(|e| e.src == loc && self.actions[e.action.index()].kind == ActionKind::Fault)
    }
}
