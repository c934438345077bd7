//! Twin-plant product: two copies of the quotient that observe the same
//! untimed trace.

use std::collections::{HashMap, VecDeque};

use super::silent_moves;
use crate::model::{ActionKind, ClassId, QuotientModel, Step, UTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwinState {
    pub left: ClassId,
    pub right: ClassId,
    /// The left run has performed the fault action.
    pub left_faulty: bool,
    pub right_faulty: bool,
}

/// Reachable fragment of the twin product.
#[derive(Debug, Clone)]
pub struct TwinGraph {
    pub states: Vec<TwinState>,
    pub initial: Vec<usize>,
    pub succ: Vec<Vec<(Step, usize)>>,
}

pub fn twin_product(model: &QuotientModel) -> TwinGraph {
    let mut states = Vec::new();
    let mut index: HashMap<TwinState, usize> = HashMap::new();
    let mut succ: Vec<Vec<(Step, usize)>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |t: TwinState, states: &mut Vec<TwinState>, succ: &mut Vec<Vec<(Step, usize)>>, queue: &mut VecDeque<usize>| {
        *index.entry(t).or_insert_with(|| {
            states.push(t);
            succ.push(Vec::new());
            queue.push_back(states.len() - 1);
            states.len() - 1
        })
    };

    let inits: Vec<ClassId> = model.initial_classes().collect();
    let mut initial = Vec::new();
    for &l in &inits {
        for &r in &inits {
            if model.observable(l) == model.observable(r) {
                let t = TwinState { left: l, right: r, left_faulty: false, right_faulty: false };
                initial.push(intern(t, &mut states, &mut succ, &mut queue));
            }
        }
    }

    // one external step of a single copy: (action, landed class, fault flag)
    let one_side = |c: ClassId, faulty: bool| -> Vec<(Step, ClassId, bool)> {
        let mut out = Vec::new();
        for (x, fl) in silent_moves(model, c, faulty) {
            for e in model.edges_from(x) {
                if model.action(e.action).kind == ActionKind::External {
                    out.push((Step { action: e.action, obs: model.observable(e.dst) }, e.dst, fl));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    };

    while let Some(i) = queue.pop_front() {
        let t = states[i];
        let left = one_side(t.left, t.left_faulty);
        let right = one_side(t.right, t.right_faulty);
        let mut edges = Vec::new();
        for &(ls, l, lf) in &left {
            for &(rs, r, rf) in &right {
                if ls == rs {
                    let next = TwinState { left: l, right: r, left_faulty: lf, right_faulty: rf };
                    edges.push((ls, intern(next, &mut states, &mut succ, &mut queue)));
                }
            }
        }
        edges.sort();
        edges.dedup();
        succ[i] = edges;
    }

    TwinGraph { states, initial, succ }
}

/// A faulty and a non-faulty execution sharing the untimed trace
/// `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterExample {
    pub prefix: UTrace,
    pub cycle: Vec<Step>,
    /// Landed class after each observation of `prefix · cycle`; the last entry
    /// equals the entry at index `prefix.len()`.
    pub left_run: Vec<ClassId>,
    pub right_run: Vec<ClassId>,
}

impl CounterExample {
    /// Checks that both runs are executions of `model` with the shared trace,
    /// that the left run can contain the fault and the right run can avoid it.
    pub fn replays(&self, model: &QuotientModel) -> bool {
        let steps: Vec<Step> = self.prefix.steps.iter().chain(&self.cycle).copied().collect();
        let loop_at = self.prefix.len();
        // fault flags achievable at the end of the run over all realizations
        let check = |run: &[ClassId]| -> Option<Vec<bool>> {
            if run.len() != steps.len() + 1 || run[loop_at] != run[steps.len()] {
                return None;
            }
            let first = run[0];
            if !model.class(first).initial || model.observable(first) != self.prefix.head {
                return None;
            }
            let mut flags = vec![false];
            for (i, step) in steps.iter().enumerate() {
                let (from, to) = (run[i], run[i + 1]);
                if model.observable(to) != step.obs {
                    return None;
                }
                let mut next: Vec<bool> = flags
                    .iter()
                    .flat_map(|&f| silent_moves(model, from, f))
                    .filter(|&(x, _)| model.edges_from(x).any(|e| e.action == step.action && e.dst == to))
                    .map(|(_, fl)| fl)
                    .collect();
                next.sort();
                next.dedup();
                if next.is_empty() {
                    return None;
                }
                flags = next;
            }
            Some(flags)
        };
        let (Some(lf), Some(rf)) = (check(&self.left_run), check(&self.right_run)) else {
            return false;
        };
        !self.cycle.is_empty() && lf.contains(&true) && rf.contains(&false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub diagnosable: bool,
    pub counterexample: Option<CounterExample>,
}

/// Not diagnosable iff the twin product has a reachable cycle through states
/// where only the left copy has faulted.
pub fn brute_force_diagnosable(model: &QuotientModel) -> OracleVerdict {
    let g = twin_product(model);
    let n = g.states.len();
    let bad = |i: usize| g.states[i].left_faulty && !g.states[i].right_faulty;

    // BFS tree over the whole reachable product
    let mut parent: Vec<Option<(usize, Step)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &i in &g.initial {
        if !seen[i] {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for &(s, j) in &g.succ[i] {
            if !seen[j] {
                seen[j] = true;
                parent[j] = Some((i, s));
                queue.push_back(j);
            }
        }
    }

    for &v in order.iter().filter(|&&v| bad(v)) {
        // does some bad path lead from v back to v?
        let mut back: Vec<Option<(usize, Step)>> = vec![None; n];
        let mut visited = vec![false; n];
        let mut queue = VecDeque::new();
        let mut closing = None;
        'search: for &(s, w) in &g.succ[v] {
            if w == v {
                closing = Some((v, s));
                break 'search;
            }
            if bad(w) && !visited[w] {
                visited[w] = true;
                back[w] = Some((v, s));
                queue.push_back(w);
            }
        }
        while closing.is_none() {
            let Some(u) = queue.pop_front() else { break };
            for &(s, w) in &g.succ[u] {
                if w == v {
                    closing = Some((u, s));
                    break;
                }
                if bad(w) && !visited[w] {
                    visited[w] = true;
                    back[w] = Some((u, s));
                    queue.push_back(w);
                }
            }
        }
        let Some((last, last_step)) = closing else { continue };

        let mut cycle_nodes = vec![v];
        let mut cycle = vec![last_step];
        let mut cur = last;
        while cur != v {
            cycle_nodes.push(cur);
            let (p, s) = back[cur].expect("cycle path");
            cycle.push(s);
            cur = p;
        }
        // cycle_nodes: v, last, ..., first-after-v ; reverse the tail
        cycle_nodes[1..].reverse();
        cycle.reverse();

        let mut prefix_nodes = vec![v];
        let mut prefix_steps = Vec::new();
        let mut cur = v;
        while let Some((p, s)) = parent[cur] {
            prefix_nodes.push(p);
            prefix_steps.push(s);
            cur = p;
        }
        prefix_nodes.reverse();
        prefix_steps.reverse();

        let nodes: Vec<usize> = prefix_nodes.iter().chain(&cycle_nodes[1..]).chain([&v]).copied().collect();
        let head = model.observable(g.states[prefix_nodes[0]].left);
        return OracleVerdict {
            diagnosable: false,
            counterexample: Some(CounterExample {
                prefix: UTrace { head, steps: prefix_steps },
                cycle,
                left_run: nodes.iter().map(|&i| g.states[i].left).collect(),
                right_run: nodes.iter().map(|&i| g.states[i].right).collect(),
            }),
        };
    }

    OracleVerdict { diagnosable: true, counterexample: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{ActionKind, ModelBuilder};

    fn has_bad_cycle(g: &TwinGraph) -> bool {
        // brute force: a bad node reaches itself through bad nodes
        let bad = |i: usize| g.states[i].left_faulty && !g.states[i].right_faulty;
        (0..g.states.len()).filter(|&i| bad(i)).any(|v| {
            let mut stack: Vec<usize> = g.succ[v].iter().map(|&(_, w)| w).filter(|&w| bad(w)).collect();
            let mut seen = vec![false; g.states.len()];
            while let Some(u) = stack.pop() {
                if u == v {
                    return true;
                }
                if !std::mem::replace(&mut seen[u], true) {
                    stack.extend(g.succ[u].iter().map(|&(_, w)| w).filter(|&w| bad(w)));
                }
            }
            false
        })
    }

    #[test]
    fn q1_twin_has_no_bad_cycle() {
        let g = twin_product(&fixtures::q1());
        assert!(!has_bad_cycle(&g));
        assert!(brute_force_diagnosable(&fixtures::q1()).diagnosable);
    }

    #[test]
    fn q2_twin_has_bad_cycle() {
        let q2 = fixtures::q2();
        let g = twin_product(&q2);
        assert!(has_bad_cycle(&g));
        let v = brute_force_diagnosable(&q2);
        assert!(!v.diagnosable);
        let cex = v.counterexample.unwrap();
        assert_eq!(cex.cycle.len(), 2);
        assert!(cex.replays(&q2));
    }

    #[test]
    fn diagonal_initial_states() {
        let q1 = fixtures::q1();
        let g = twin_product(&q1);
        let n0 = q1.class_by_name("n0").unwrap();
        let diag = TwinState { left: n0, right: n0, left_faulty: false, right_faulty: false };
        assert!(g.initial.iter().any(|&i| g.states[i] == diag));
    }

    #[test]
    fn refresh_model_is_diagnosable() {
        assert!(brute_force_diagnosable(&fixtures::refresh()).diagnosable);
    }

    #[test]
    fn immediately_revealed_fault_is_diagnosable() {
        let m = ModelBuilder::new()
            .class("n0", false, true, 0)
            .class("f0", true, false, 1)
            .action("f", ActionKind::Fault)
            .action("tick", ActionKind::External)
            .edge("n0", "tick", "n0")
            .edge("n0", "f", "f0")
            .edge("f0", "tick", "f0")
            .build()
            .unwrap();
        assert!(brute_force_diagnosable(&m).diagnosable);
    }

    #[test]
    fn tampered_counterexample_fails_replay() {
        let q2 = fixtures::q2();
        let mut cex = brute_force_diagnosable(&q2).counterexample.unwrap();
        assert!(cex.replays(&q2));
        std::mem::swap(&mut cex.left_run, &mut cex.right_run);
        assert!(!cex.replays(&q2));
    }
}
