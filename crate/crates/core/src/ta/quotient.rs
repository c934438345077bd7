//! Region quotient of a timed automaton.

use std::collections::{HashMap, VecDeque};

use super::region::Region;
use super::{TaError, TimedAutomatonWithFaults};
use crate::model::{Class, ClassId, DiscreteEdge, ObservableId, QuotientModel, TimeEdge};

pub const DEFAULT_MAX_CLASSES: usize = 100_000;

/// A region quotient together with the (location, region) behind each class.
#[derive(Debug, Clone)]
pub struct RegionGraph {
    pub model: QuotientModel,
    /// Indexed by class id.
    pub states: Vec<(usize, Region)>,
    pub ceilings: Vec<u32>,
}

/// Reachable (location, region) pairs from the initial locations with all
/// clocks zero, explored breadth-first so numbering is deterministic.
///
/// Time edges link each region to its immediate successor while the location
/// invariant holds; unbounded regions get a divergent self-loop. A discrete
/// edge exists when the guard holds and the reset region satisfies the
/// target invariant.
pub fn region_graph(ta: &TimedAutomatonWithFaults, max_classes: usize) -> Result<RegionGraph, TaError> {
    let ceilings = ta.ceilings();
    let n = ta.num_clocks();
    let mut states: Vec<(usize, Region)> = Vec::new();
    let mut index: HashMap<(usize, Region), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut edges = Vec::new();
    let mut time = Vec::new();

    let mut intern = |s: (usize, Region), states: &mut Vec<(usize, Region)>, queue: &mut VecDeque<usize>| {
        if let Some(&i) = index.get(&s) {
            return Ok(i);
        }
        if states.len() >= max_classes {
            return Err(TaError::TooManyClasses { cap: max_classes });
        }
        index.insert(s.clone(), states.len());
        states.push(s);
        queue.push_back(states.len() - 1);
        Ok(states.len() - 1)
    };

    let zero = Region::zero(n);
    for (l, loc) in ta.locations.iter().enumerate() {
        if loc.initial && zero.satisfies_all(&loc.invariant) {
            intern((l, zero.clone()), &mut states, &mut queue)?;
        }
    }

    while let Some(i) = queue.pop_front() {
        let (l, r) = states[i].clone();
        let loc = &ta.locations[l];
        match r.successor(&ceilings) {
            Some(next) if next.satisfies_all(&loc.invariant) => {
                let j = intern((l, next), &mut states, &mut queue)?;
                time.push(TimeEdge { src: ClassId(i as u32), dst: ClassId(j as u32), divergent: false });
            }
            Some(_) => {}
            None => time.push(TimeEdge { src: ClassId(i as u32), dst: ClassId(i as u32), divergent: true }),
        }
        for e in ta.edges.iter().filter(|e| e.src == l) {
            if !r.satisfies_all(&e.guard) {
                continue;
            }
            let target = r.reset(&e.resets);
            if !target.satisfies_all(&ta.locations[e.dst].invariant) {
                continue;
            }
            let j = intern((e.dst, target), &mut states, &mut queue)?;
            edges.push(DiscreteEdge { src: ClassId(i as u32), action: e.action, dst: ClassId(j as u32) });
        }
    }

    let clock_name = |c: super::ClockId| ta.clock_name(c).to_string();
    let mut classes = Vec::with_capacity(states.len());
    for (l, r) in &states {
        let loc = &ta.locations[*l];
        let holding: Vec<ObservableId> = ta.observation.iter().filter(|o| r.eval(&o.pred)).map(|o| o.id).collect();
        let [obs] = holding[..] else {
            return Err(TaError::Partition {
                witness: format!("region {}", r.render(&clock_name, &ceilings)),
                problem: format!("{} cells hold", holding.len()),
            });
        };
        let name = if n == 0 { loc.name.clone() } else { format!("{}({})", loc.name, r.render(&clock_name, &ceilings)) };
        classes.push(Class { name, faulty: loc.faulty, initial: loc.initial && *r == zero, observable: obs });
    }

    let model = QuotientModel::new(classes, ta.actions.clone(), edges, time)
        .expect("region quotient is structurally sound");
    Ok(RegionGraph { model, states, ceilings })
}

/// Region quotient with the default class cap.
pub fn region_quotient(ta: &TimedAutomatonWithFaults) -> Result<QuotientModel, TaError> {
    region_graph(ta, DEFAULT_MAX_CLASSES).map(|g| g.model)
}

/// `|Loc| · ∏(2c+2) · n! · 2^n` over clocks with ceiling `c`, saturating.
pub fn region_count_bound(ta: &TimedAutomatonWithFaults) -> u128 {
    let n = ta.num_clocks() as u128;
    let mut bound = ta.locations.len() as u128;
    for c in ta.ceilings() {
        bound = bound.saturating_mul(2 * u128::from(c) + 2);
    }
    for k in 1..=n {
        bound = bound.saturating_mul(k);
    }
    bound.saturating_mul(1u128.checked_shl(n as u32).unwrap_or(u128::MAX))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::TA1_JSON;
    use crate::model::validate_model;
    use crate::ta::{enumerate_regions, parse_ta};

    #[test]
    fn ta1_quotient() {
        let ta = parse_ta(TA1_JSON).unwrap();
        let g = region_graph(&ta, 100).unwrap();
        let names: Vec<&str> = g.model.classes().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(
            names,
            ["ok(x=0)", "ok(0<x<1)", "leak(x=0)", "ok(x=1)", "leak(0<x<1)", "leak(x=1)"]
        );
        assert_eq!(g.model.num_classes(), 6);
        assert_eq!(region_count_bound(&ta), 16);
        assert!(validate_model(&g.model).ok());
        let obs: Vec<u32> = g.model.classes().iter().map(|c| c.observable.0).collect();
        assert_eq!(obs, [0, 0, 0, 1, 0, 1]);
        assert!(!g.model.time_edges().iter().any(|t| t.divergent));
    }

    #[test]
    fn cap_is_enforced() {
        let ta = parse_ta(TA1_JSON).unwrap();
        assert_eq!(region_graph(&ta, 5).unwrap_err(), TaError::TooManyClasses { cap: 5 });
        assert!(region_graph(&ta, 6).is_ok());
    }

    #[test]
    fn one_location_bound_matches_formula() {
        let text = r#"{
          "locations": [{"name": "a", "faulty": false, "initial": true},
                        {"name": "b", "faulty": true, "initial": false}],
          "clocks": {"external": ["x"]},
          "edges": [{"src": "a", "dst": "b", "action": "f", "kind": "fault"}],
          "observation": [{"id": 0, "pred": "x<1"}, {"id": 1, "pred": "x>=1"}]
        }"#;
        let ta = parse_ta(text).unwrap();
        assert_eq!(region_count_bound(&ta), 16);
        // per location, all four one-clock regions are reachable
        assert_eq!(region_quotient(&ta).unwrap().num_classes(), 8);
        assert_eq!(enumerate_regions(&[1]).len() * 2, 8);
    }

    #[test]
    fn zero_clocks_gives_location_graph() {
        let text = r#"{
          "locations": [{"name": "a", "faulty": false, "initial": true},
                        {"name": "b", "faulty": true, "initial": false}],
          "clocks": {},
          "edges": [{"src": "a", "dst": "b", "action": "f", "kind": "fault"},
                    {"src": "a", "dst": "a", "action": "go", "kind": "external"},
                    {"src": "b", "dst": "b", "action": "go", "kind": "external"}],
          "observation": [{"id": 0, "pred": "true"}]
        }"#;
        let ta = parse_ta(text).unwrap();
        assert_eq!(region_count_bound(&ta), 2);
        let m = region_quotient(&ta).unwrap();
        let names: Vec<&str> = m.classes().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["a", "b"]);
        assert_eq!(m.edges().len(), 3);
        assert!(m.time_edges().iter().all(|t| t.src == t.dst && t.divergent));
    }
}
