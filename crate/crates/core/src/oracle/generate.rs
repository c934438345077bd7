//! Seeded random generation of small valid, progressive quotients.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::diagnosability::check_progressive;
use crate::ta::{Clock, ClockConstraint, ClockId, CmpOp, Location, ObservationCell, Pred, TaEdge, TimedAutomatonWithFaults};
use crate::model::{
    validate_model, ActionId, ActionKind, ActionLabel, Class, ClassId, DiscreteEdge, ObservableId,
    QuotientModel, TimeEdge,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub max_classes: usize,
    pub max_external: usize,
    pub max_observables: usize,
    /// Probability of each optional edge being present.
    pub density: f64,
    /// Whether an internal action may be generated.
    pub internal: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig { max_classes: 6, max_external: 2, max_observables: 2, density: 0.25, internal: true }
    }
}

/// Draws one model. Classes are ordered non-faulty first, and every silent
/// edge points forward in that order, so silent cycles cannot arise; every
/// class gets an external edge, so there are no deadlocks.
pub fn random_model<R: Rng>(rng: &mut R, cfg: &GeneratorConfig) -> QuotientModel {
    loop {
        let m = draw(rng, cfg);
        if validate_model(&m).ok() && check_progressive(&m).progressive {
            return m;
        }
    }
}

/// `count` models from a fixed seed.
pub fn random_models(seed: u64, count: usize, cfg: &GeneratorConfig) -> Vec<QuotientModel> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| random_model(&mut rng, cfg)).collect()
}

fn draw<R: Rng>(rng: &mut R, cfg: &GeneratorConfig) -> QuotientModel {
    let n = rng.gen_range(2..=cfg.max_classes.max(2));
    let nonfaulty = rng.gen_range(1..n);
    let n_ext = rng.gen_range(1..=cfg.max_external.max(1));
    let n_obs = rng.gen_range(1..=cfg.max_observables.max(1));

    let mut actions = vec![ActionLabel::new("f", ActionKind::Fault)];
    for i in 0..n_ext {
        actions.push(ActionLabel::new(["a", "b", "c", "d"].get(i).copied().unwrap_or("e"), ActionKind::External));
    }
    let internal = cfg.internal && rng.gen_bool(0.5);
    if internal {
        actions.push(ActionLabel::new("u", ActionKind::Internal));
    }
    let fault = ActionId(0);
    let externals: Vec<ActionId> = (1..=n_ext as u32).map(ActionId).collect();

    let raw_obs: Vec<u32> = (0..n).map(|_| rng.gen_range(0..n_obs as u32)).collect();
    let mut dense: BTreeMap<u32, u32> = BTreeMap::new();
    for &o in &raw_obs {
        let next = dense.len() as u32;
        dense.entry(o).or_insert(next);
    }

    let classes: Vec<Class> = (0..n)
        .map(|i| {
            let faulty = i >= nonfaulty;
            Class {
                name: format!("{}{}", if faulty { "f" } else { "n" }, i),
                faulty,
                initial: !faulty && (i == 0 || rng.gen_bool(0.3)),
                observable: ObservableId(dense[&raw_obs[i]]),
            }
        })
        .collect();

    let same_side = |i: usize| if i < nonfaulty { 0..nonfaulty } else { nonfaulty..n };
    let mut edges = Vec::new();
    let mut time = Vec::new();
    for i in 0..n {
        let c = ClassId(i as u32);
        let side = same_side(i);
        // mandatory external successor
        let a = externals[rng.gen_range(0..externals.len())];
        edges.push(DiscreteEdge { src: c, action: a, dst: ClassId(rng.gen_range(side.clone()) as u32) });
        for &a in &externals {
            for j in side.clone() {
                if rng.gen_bool(cfg.density) {
                    edges.push(DiscreteEdge { src: c, action: a, dst: ClassId(j as u32) });
                }
            }
        }
        if i < nonfaulty {
            edges.push(DiscreteEdge { src: c, action: fault, dst: ClassId(rng.gen_range(nonfaulty..n) as u32) });
            for j in nonfaulty..n {
                if rng.gen_bool(cfg.density / 2.0) {
                    edges.push(DiscreteEdge { src: c, action: fault, dst: ClassId(j as u32) });
                }
            }
        }
        for j in (i + 1)..side.end {
            if internal && rng.gen_bool(cfg.density / 2.0) {
                edges.push(DiscreteEdge { src: c, action: ActionId(n_ext as u32 + 1), dst: ClassId(j as u32) });
            }
            if rng.gen_bool(cfg.density / 2.0) {
                time.push(TimeEdge { src: c, dst: ClassId(j as u32), divergent: false });
            }
        }
    }

    QuotientModel::new(classes, actions, edges, time).expect("generated model is structurally sound")
}

/// Shape of random timed automata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaGeneratorConfig {
    pub max_locations: usize,
    pub max_clocks: usize,
    pub max_constant: u32,
    pub density: f64,
}

impl Default for TaGeneratorConfig {
    fn default() -> Self {
        TaGeneratorConfig { max_locations: 4, max_clocks: 2, max_constant: 3, density: 0.3 }
    }
}

/// Draws one timed automaton that passes [`parse_ta`](crate::ta::parse_ta).
///
/// The first clock is external and the observation splits on it at a
/// threshold the initial location can reach; fault edges are unguarded and
/// faulty locations carry no invariant, so every non-faulty region can fault.
pub fn random_ta<R: Rng>(rng: &mut R, cfg: &TaGeneratorConfig) -> TimedAutomatonWithFaults {
    let k = cfg.max_constant.max(1);
    let n_loc = rng.gen_range(2..=cfg.max_locations.max(2));
    let nonfaulty = rng.gen_range(1..n_loc);
    let n_clocks = rng.gen_range(1..=cfg.max_clocks.max(1));
    // external clocks first, matching the order the parser assigns
    let mut external: Vec<bool> = (0..n_clocks).map(|i| i == 0 || rng.gen_bool(0.5)).collect();
    external.sort_by(|a, b| b.cmp(a));
    let clocks: Vec<Clock> = external
        .iter()
        .enumerate()
        .map(|(i, &external)| Clock { name: ["x", "y", "z"].get(i).map_or(format!("c{i}"), |s| s.to_string()), external })
        .collect();
    let clock = |i: usize| ClockId(i as u32);
    let ops = [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt];

    let locations: Vec<Location> = (0..n_loc)
        .map(|i| {
            let faulty = i >= nonfaulty;
            let invariant = if faulty || i == 0 {
                Vec::new()
            } else {
                let mut inv = Vec::new();
                for c in 0..n_clocks {
                    if rng.gen_bool(0.5) {
                        inv.push(ClockConstraint { clock: clock(c), op: CmpOp::Le, bound: rng.gen_range(1..=k) });
                    }
                }
                inv
            };
            Location { name: format!("{}{}", if faulty { "f" } else { "l" }, i), faulty, initial: i == 0, invariant }
        })
        .collect();

    let mut actions = vec![ActionLabel::new("f", ActionKind::Fault), ActionLabel::new("a", ActionKind::External)];
    if rng.gen_bool(0.5) {
        actions.push(ActionLabel::new("b", ActionKind::External));
    }
    if rng.gen_bool(0.3) {
        actions.push(ActionLabel::new("u", ActionKind::Internal));
    }
    let mut edges = Vec::new();
    let resets = |rng: &mut R| (0..n_clocks).filter(|_| rng.gen_bool(0.4)).map(clock).collect::<Vec<_>>();
    for src in 0..n_loc {
        let side = if src < nonfaulty { 0..nonfaulty } else { nonfaulty..n_loc };
        if src < nonfaulty {
            let dst = rng.gen_range(nonfaulty..n_loc);
            edges.push(TaEdge { src, dst, action: ActionId(0), guard: Vec::new(), resets: resets(rng) });
        }
        for a in 1..actions.len() {
            for dst in side.clone() {
                if !rng.gen_bool(cfg.density) {
                    continue;
                }
                let guard = (0..rng.gen_range(0..=2))
                    .map(|_| ClockConstraint {
                        clock: clock(rng.gen_range(0..n_clocks)),
                        op: ops[rng.gen_range(0..ops.len())],
                        bound: rng.gen_range(0..=k),
                    })
                    .collect();
                edges.push(TaEdge { src, dst, action: ActionId(a as u32), guard, resets: resets(rng) });
            }
        }
    }

    let x = ClockConstraint { clock: clock(0), op: if rng.gen_bool(0.5) { CmpOp::Lt } else { CmpOp::Le }, bound: rng.gen_range(1..=k) };
    let mut low = Pred::Atom(x);
    let ext: Vec<usize> = (1..n_clocks).filter(|&i| clocks[i].external).collect();
    if let Some(&y) = ext.first() {
        if rng.gen_bool(0.5) {
            let other = Pred::Atom(ClockConstraint { clock: clock(y), op: CmpOp::Lt, bound: rng.gen_range(1..=k) });
            low = Pred::And(Box::new(low), Box::new(other));
        }
    }
    let observation = if rng.gen_bool(0.15) {
        vec![ObservationCell { id: ObservableId(0), pred: Pred::True }]
    } else {
        vec![
            ObservationCell { id: ObservableId(0), pred: low.clone() },
            ObservationCell { id: ObservableId(1), pred: Pred::Not(Box::new(low)) },
        ]
    };

    // drop actions no edge uses, keeping first-use order as the parser does
    let mut order: Vec<ActionId> = Vec::new();
    for e in &edges {
        if !order.contains(&e.action) {
            order.push(e.action);
        }
    }
    for e in &mut edges {
        e.action = ActionId(order.iter().position(|&a| a == e.action).unwrap() as u32);
    }
    let actions = order.iter().map(|a| actions[a.index()].clone()).collect();

    TimedAutomatonWithFaults { locations, clocks, actions, edges, observation }
}

/// `count` timed automata from a fixed seed.
pub fn random_tas(seed: u64, count: usize, cfg: &TaGeneratorConfig) -> Vec<TimedAutomatonWithFaults> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| random_ta(&mut rng, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let cfg = GeneratorConfig::default();
        assert_eq!(random_models(7, 20, &cfg), random_models(7, 20, &cfg));
    }

    #[test]
    fn generated_models_respect_limits() {
        let cfg = GeneratorConfig::default();
        for m in random_models(1, 200, &cfg) {
            assert!(m.num_classes() <= cfg.max_classes);
            assert!(m.num_observables() <= cfg.max_observables);
            assert!(m.external_actions().count() <= cfg.max_external);
            assert!(validate_model(&m).ok());
            assert!(check_progressive(&m).progressive);
        }
    }

    #[test]
    fn random_tas_parse_back() {
        let cfg = TaGeneratorConfig::default();
        for ta in random_tas(11, 100, &cfg) {
            let text = ta.to_json();
            let parsed = crate::ta::parse_ta(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
            assert_eq!(parsed, ta);
            assert!(ta.num_clocks() <= cfg.max_clocks);
            assert!(ta.ceilings().iter().all(|&c| c <= cfg.max_constant));
        }
    }
}
