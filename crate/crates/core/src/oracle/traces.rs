//! Bounded enumeration of untimed observation traces.

use std::collections::{BTreeMap, BTreeSet};

use super::{silent_moves, OracleError};
use crate::model::{ActionKind, ClassId, ClassSet, QuotientModel, UTrace};

/// Everything reachable right after the last observation of one trace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceInfo {
    /// Landed classes, each with whether the execution reaching it faulted.
    pub reached: BTreeSet<(ClassId, bool)>,
}

impl TraceInfo {
    pub fn classes(&self) -> ClassSet {
        self.reached.iter().map(|&(c, _)| c).collect()
    }
}

/// All untimed traces with at most `k` external steps realizable from the
/// initial classes, each mapped to the classes executions with that trace end
/// in. Fails once more than `cap` (trace, class) pairs have been produced.
pub fn enumerate_utraces(
    model: &QuotientModel,
    k: usize,
    cap: usize,
) -> Result<BTreeMap<UTrace, TraceInfo>, OracleError> {
    let mut all: BTreeMap<UTrace, TraceInfo> = BTreeMap::new();
    let mut produced = 0usize;
    let mut level: BTreeMap<UTrace, TraceInfo> = BTreeMap::new();
    for c in model.initial_classes() {
        level.entry(UTrace::new(model.observable(c))).or_default().reached.insert((c, false));
        produced += 1;
    }

    for _ in 0..k {
        let mut next: BTreeMap<UTrace, TraceInfo> = BTreeMap::new();
        for (trace, info) in &level {
            for &(c, faulty) in &info.reached {
                for (x, fl) in silent_moves(model, c, faulty) {
                    for e in model.edges_from(x) {
                        if model.action(e.action).kind != ActionKind::External {
                            continue;
                        }
                        let t = trace.extended(e.action, model.observable(e.dst));
                        if next.entry(t).or_default().reached.insert((e.dst, fl)) {
                            produced += 1;
                            if produced > cap {
                                return Err(OracleError::CapExceeded(cap));
                            }
                        }
                    }
                }
            }
        }
        all.append(&mut level);
        level = next;
    }
    all.append(&mut level);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::ObservableId;

    fn render(m: &QuotientModel, map: &BTreeMap<UTrace, TraceInfo>) -> Vec<(String, String)> {
        map.iter().map(|(t, i)| (m.render_trace(t), m.render_set(&i.classes()))).collect()
    }

    #[test]
    fn q1_depth_one() {
        let q1 = fixtures::q1();
        let map = enumerate_utraces(&q1, 1, 1000).unwrap();
        let mut got = render(&q1, &map);
        got.sort();
        assert_eq!(
            got,
            vec![
                ("o0".to_string(), "{n0}".to_string()),
                ("o0 tick o0".to_string(), "{f0}".to_string()),
                ("o0 tick o1".to_string(), "{n1}".to_string()),
            ]
        );
    }

    #[test]
    fn depth_zero_groups_initials() {
        let q1 = fixtures::q1();
        let map = enumerate_utraces(&q1, 0, 1000).unwrap();
        assert_eq!(map.len(), 1);
        assert_eq!(map[&UTrace::new(ObservableId(0))].classes(), ClassSet::singleton(q1.class_by_name("n0").unwrap()));
    }

    #[test]
    fn q2_depth_one_mixes_faults() {
        let q2 = fixtures::q2();
        let map = enumerate_utraces(&q2, 1, 1000).unwrap();
        let tick = q2.action_by_name("tick").unwrap();
        let info = &map[&UTrace::new(ObservableId(0)).extended(tick, ObservableId(1))];
        assert_eq!(q2.render_set(&info.classes()), "{n1,f1}");
        let f1 = q2.class_by_name("f1").unwrap();
        assert!(info.reached.contains(&(f1, true)));
    }

    #[test]
    fn cap_is_reported() {
        assert_eq!(enumerate_utraces(&fixtures::q1(), 10, 5), Err(OracleError::CapExceeded(5)));
    }
}
