//! Progressiveness and time-abstract diagnosability.
//!
//! Diagnosability is decided on the estimator. A system is *not* diagnosable
//! exactly when some reachable loop of indeterminate estimator states carries
//! a faulty class that persists around the loop: following the loop forever
//! then yields a faulty execution, and a non-faulty execution with the same
//! observations always exists alongside it (non-faulty classes can only be
//! reached from non-faulty classes, so they never die out along a loop of
//! indeterminate states).
//!
//! A bare loop of indeterminate states is not enough. Faulty members can be
//! replaced at every step by freshly hypothesised faults that are revealed a
//! few steps later; [`has_indeterminate_loop`] reports such loops, but they do
//! not make the system undiagnosable. The `refresh` fixture is the smallest
//! example.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::estimator::{Classification, EstimatorGraph, StateId};
use crate::graph;
use crate::model::{ActionId, ClassId, ClassSet, ObservableId, QuotientModel, Step, UTrace};

/// How a class is left in a progressiveness witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Action(ActionId),
    Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgressWitness {
    /// A reachable class with no way to continue.
    Deadlock { class: ClassId },
    /// A reachable cycle of silent moves; each entry is a class and the move
    /// taken out of it.
    SilentCycle { cycle: Vec<(ClassId, Move)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressReport {
    pub progressive: bool,
    pub witness: Option<ProgressWitness>,
}

impl ProgressReport {
    pub fn render(&self, model: &QuotientModel) -> String {
        match &self.witness {
            None => "progressive".to_string(),
            Some(ProgressWitness::Deadlock { class }) => {
                format!("not progressive: deadlock in class {}", model.class_name(*class))
            }
            Some(ProgressWitness::SilentCycle { cycle }) => {
                let mut out = String::from("not progressive: silent cycle");
                for (c, mv) in cycle {
                    let label = match mv {
                        Move::Action(a) => model.action(*a).name.as_str(),
                        Move::Time => "time",
                    };
                    out.push_str(&format!(" {} -{}->", model.class_name(*c), label));
                }
                out.push_str(&format!(" {}", model.class_name(cycle[0].0)));
                out
            }
        }
    }
}

/// Checks that every maximal execution from the initial classes performs
/// infinitely many external actions.
///
/// Fails on a reachable dead end, or on a reachable cycle of internal, fault,
/// or time moves. Reflexive time self-loops are ignored unless marked
/// divergent.
pub fn check_progressive(model: &QuotientModel) -> ProgressReport {
    let reachable = model.reachable_classes();

    for c in model.class_ids().filter(|c| reachable[c.index()]) {
        let discrete = model.edges_from(c).next().is_some();
        let timed = model.time_from(c).any(|t| t.dst != c || t.divergent);
        if !discrete && !timed {
            return ProgressReport {
                progressive: false,
                witness: Some(ProgressWitness::Deadlock { class: c }),
            };
        }
    }

    // silent graph over reachable classes, remembering one label per edge
    let n = model.num_classes();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut label: HashMap<(usize, usize), Move> = HashMap::new();
    for c in model.class_ids().filter(|c| reachable[c.index()]) {
        for e in model.edges_from(c) {
            if model.action(e.action).kind.is_silent() {
                adj[c.index()].push(e.dst.index());
                label.entry((c.index(), e.dst.index())).or_insert(Move::Action(e.action));
            }
        }
        for t in model.time_from(c) {
            if t.dst != c || t.divergent {
                adj[c.index()].push(t.dst.index());
                label.entry((c.index(), t.dst.index())).or_insert(Move::Time);
            }
        }
    }
    let mut cyclic: Vec<Vec<usize>> = graph::tarjan_scc(&adj)
        .into_iter()
        .filter(|comp| graph::is_cyclic(comp, &adj))
        .collect();
    cyclic.sort();
    if let Some(comp) = cyclic.first() {
        let start = comp[0];
        let nodes = graph::shortest_cycle(&adj, start, |v| comp.binary_search(&v).is_ok())
            .expect("cyclic component has a cycle through each node");
        let cycle = nodes
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let w = nodes[(i + 1) % nodes.len()];
                (ClassId(v as u32), label[&(v, w)])
            })
            .collect();
        return ProgressReport {
            progressive: false,
            witness: Some(ProgressWitness::SilentCycle { cycle }),
        };
    }

    ProgressReport { progressive: true, witness: None }
}

/// Infinite observation behaviour `prefix · cycle^ω` through the estimator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: UTrace,
    pub cycle: Vec<Step>,
    /// Estimator state at the end of the prefix, where the cycle starts and ends.
    pub entry: StateId,
    /// Faulty class occupied at each cycle position, starting at `entry`.
    pub faulty_cycle: Vec<ClassId>,
}

impl Lasso {
    /// The cycle as a trace starting at the observable the prefix ends in.
    pub fn cycle_trace(&self) -> UTrace {
        UTrace { head: self.prefix.last_obs(), steps: self.cycle.clone() }
    }

    /// Replays the lasso: the prefix must reach `entry`, every state on the
    /// cycle must be indeterminate, and the cycle must return to `entry`.
    pub fn replays(&self, est: &EstimatorGraph) -> bool {
        let Some(states) = est.run(&self.prefix) else {
            return false;
        };
        if states.last() != Some(&self.entry) || self.cycle.is_empty() {
            return false;
        }
        let mut cur = self.entry;
        for step in &self.cycle {
            if est.classification(cur) != Classification::Indeterminate {
                return false;
            }
            match est.successor(cur, step.action, step.obs) {
                Some(next) => cur = next,
                None => return false,
            }
        }
        cur == self.entry
    }

    pub fn render(&self, model: &QuotientModel) -> String {
        let cycle: Vec<String> = self
            .cycle
            .iter()
            .map(|s| format!("{} {}", model.action(s.action).name, s.obs))
            .collect();
        format!("prefix: {}\ncycle: {}", model.render_trace(&self.prefix), cycle.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosabilityVerdict {
    pub diagnosable: bool,
    pub witness: Option<Lasso>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagnosabilityError {
    #[error("model is not diagnosable")]
    NotDiagnosable,
}

/// Nodes are (indeterminate estimator state, faulty member); an edge follows
/// an estimator transition between indeterminate states together with a
/// class-level move of the faulty member.
struct FaultTrackingGraph {
    nodes: Vec<(StateId, ClassId)>,
    adj: Vec<Vec<usize>>,
    labels: HashMap<(usize, usize), (ActionId, ObservableId)>,
}

impl FaultTrackingGraph {
    fn build(est: &EstimatorGraph) -> Self {
        let model = est.model();
        let mut nodes = Vec::new();
        let mut index: HashMap<(StateId, ClassId), usize> = HashMap::new();
        for s in est.state_ids() {
            if est.classification(s) != Classification::Indeterminate {
                continue;
            }
            for c in est.state(s).members.iter().filter(|&c| model.is_faulty(c)) {
                index.insert((s, c), nodes.len());
                nodes.push((s, c));
            }
        }

        let mut moves: HashMap<ClassId, BTreeMap<(ActionId, ObservableId), ClassSet>> = HashMap::new();
        let mut adj = vec![Vec::new(); nodes.len()];
        let mut labels = HashMap::new();
        for (i, &(s, c)) in nodes.iter().enumerate() {
            let class_moves = moves
                .entry(c)
                .or_insert_with(|| model.external_moves(&ClassSet::singleton(c)));
            for (&(a, o), targets) in class_moves.iter() {
                let Some(d) = est.successor(s, a, o) else {
                    continue;
                };
                if est.classification(d) != Classification::Indeterminate {
                    continue;
                }
                for c2 in targets.iter() {
                    let j = index[&(d, c2)];
                    if !adj[i].contains(&j) {
                        adj[i].push(j);
                        labels.insert((i, j), (a, o));
                    }
                }
            }
        }
        FaultTrackingGraph { nodes, adj, labels }
    }
}

type BfsTree = (Vec<usize>, Vec<Option<(StateId, Step)>>, BTreeMap<StateId, ObservableId>);

/// Shortest paths in the estimator from the initial states: for every state,
/// its BFS parent and the step taken.
fn estimator_bfs(est: &EstimatorGraph) -> BfsTree {
    let mut dist = vec![usize::MAX; est.len()];
    let mut parent = vec![None; est.len()];
    let mut roots = BTreeMap::new();
    let mut queue = VecDeque::new();
    for (&o, &s) in est.initials() {
        if dist[s.index()] == usize::MAX {
            dist[s.index()] = 0;
            roots.insert(s, o);
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        for (a, o, d) in est.transitions_from(s) {
            if dist[d.index()] == usize::MAX {
                dist[d.index()] = dist[s.index()] + 1;
                parent[d.index()] = Some((s, Step { action: a, obs: o }));
                queue.push_back(d);
            }
        }
    }
    (dist, parent, roots)
}

/// Decides diagnosability of the model behind `est`; on failure returns a
/// lasso with the shortest prefix and the shortest cycle through its entry.
pub fn check_diagnosable(est: &EstimatorGraph) -> DiagnosabilityVerdict {
    let g = FaultTrackingGraph::build(est);
    let cyclic: Vec<Vec<usize>> = graph::tarjan_scc(&g.adj)
        .into_iter()
        .filter(|comp| graph::is_cyclic(comp, &g.adj))
        .collect();
    if cyclic.is_empty() {
        return DiagnosabilityVerdict { diagnosable: true, witness: None };
    }

    let (dist, parent, roots) = estimator_bfs(est);
    let mut component_of = vec![usize::MAX; g.nodes.len()];
    for (k, comp) in cyclic.iter().enumerate() {
        for &v in comp {
            component_of[v] = k;
        }
    }
    let start = (0..g.nodes.len())
        .filter(|&v| component_of[v] != usize::MAX)
        .min_by_key(|&v| (dist[g.nodes[v].0.index()], g.nodes[v]))
        .expect("some node lies on a cycle");
    let comp = component_of[start];
    let cycle_nodes = graph::shortest_cycle(&g.adj, start, |v| component_of[v] == comp)
        .expect("node in a cyclic component lies on a cycle");

    let entry = g.nodes[start].0;
    let mut steps = Vec::new();
    let mut cur = entry;
    while let Some((prev, step)) = parent[cur.index()] {
        steps.push(step);
        cur = prev;
    }
    steps.reverse();
    let prefix = UTrace { head: roots[&cur], steps };

    let cycle = cycle_nodes
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let w = cycle_nodes[(i + 1) % cycle_nodes.len()];
            let (action, obs) = g.labels[&(v, w)];
            Step { action, obs }
        })
        .collect();
    let faulty_cycle = cycle_nodes.iter().map(|&v| g.nodes[v].1).collect();

    DiagnosabilityVerdict {
        diagnosable: false,
        witness: Some(Lasso { prefix, cycle, entry, faulty_cycle }),
    }
}

/// Whether the estimator has a reachable loop made only of indeterminate
/// states. Necessary for non-diagnosability, not sufficient (see module docs).
pub fn has_indeterminate_loop(est: &EstimatorGraph) -> bool {
    let indeterminate = |s: StateId| est.classification(s) == Classification::Indeterminate;
    let adj: Vec<Vec<usize>> = est
        .state_ids()
        .map(|s| {
            if !indeterminate(s) {
                return Vec::new();
            }
            est.transitions_from(s)
                .filter(|&(_, _, d)| indeterminate(d))
                .map(|(_, _, d)| d.index())
                .collect()
        })
        .collect();
    graph::tarjan_scc(&adj).iter().any(|comp| graph::is_cyclic(comp, &adj))
}

/// Upper bound on the number of external events between a fault and the
/// diagnoser's `yes`.
pub fn detection_delay_bound(est: &EstimatorGraph) -> Result<usize, DiagnosabilityError> {
    let g = FaultTrackingGraph::build(est);
    if graph::tarjan_scc(&g.adj).iter().any(|comp| graph::is_cyclic(comp, &g.adj)) {
        return Err(DiagnosabilityError::NotDiagnosable);
    }
    Ok(graph::longest_path_nodes(&g.adj) + 1)
}

impl fmt::Display for DiagnosabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.diagnosable { "diagnosable" } else { "not diagnosable" })
    }
}
