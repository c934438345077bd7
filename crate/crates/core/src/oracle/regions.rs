//! Concrete-sampling check of a region quotient.
//!
//! For every class, pairs of clock valuations are drawn inside its region and
//! the behaviour of each is computed with exact arithmetic: which cell is
//! observed, which edges can fire and into which class, which classes are
//! visited by letting time pass, and whether time can pass forever. Both
//! samples must agree with each other and with the quotient.

use std::collections::{BTreeSet, HashMap};

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::model::{ActionId, ClassId, ObservableId};
use crate::ta::concrete::{self, Valuation, Value};
use crate::ta::{Region, RegionGraph, TimedAutomatonWithFaults};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegionCheckReport {
    pub classes: usize,
    pub pairs: usize,
    pub violations: Vec<String>,
}

impl RegionCheckReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Signature {
    region: Region,
    observed: Vec<ObservableId>,
    moves: BTreeSet<(ActionId, Option<ClassId>)>,
    delays: BTreeSet<Option<ClassId>>,
    divergent: bool,
}

struct Checker<'a> {
    ta: &'a TimedAutomatonWithFaults,
    g: &'a RegionGraph,
    index: HashMap<(usize, &'a Region), ClassId>,
}

impl Checker<'_> {
    fn class_of(&self, loc: usize, v: &[Value]) -> Option<ClassId> {
        let r = concrete::region_of(v, &self.g.ceilings);
        self.index.get(&(loc, &r)).copied()
    }

    fn signature(&self, loc: usize, v: &Valuation) -> Signature {
        let ta = self.ta;
        let observed = ta.observation.iter().filter(|o| concrete::eval(v, &o.pred)).map(|o| o.id).collect();
        let mut moves = BTreeSet::new();
        for e in ta.edges.iter().filter(|e| e.src == loc) {
            if !concrete::satisfies_all(v, &e.guard) {
                continue;
            }
            let after = concrete::reset(v, &e.resets);
            if concrete::satisfies_all(&after, &ta.locations[e.dst].invariant) {
                moves.insert((e.action, self.class_of(e.dst, &after)));
            }
        }
        let inv = &ta.locations[loc].invariant;
        let mut delays = BTreeSet::new();
        let points = concrete::delay_points(v, &self.g.ceilings);
        let mut all_hold = true;
        for p in &points {
            if !concrete::satisfies_all(p, inv) {
                all_hold = false;
                break;
            }
            delays.insert(self.class_of(loc, p));
        }
        let last = points.last().expect("at least the start point");
        let divergent = points.len() == 1 && all_hold && concrete::region_of(last, &self.g.ceilings).is_unbounded();
        Signature { region: concrete::region_of(v, &self.g.ceilings), observed, moves, delays, divergent }
    }

    fn abstract_signature(&self, c: ClassId) -> Signature {
        let m = &self.g.model;
        let (_, region) = &self.g.states[c.index()];
        Signature {
            region: region.clone(),
            observed: vec![m.observable(c)],
            moves: m.edges_from(c).map(|e| (e.action, Some(e.dst))).collect(),
            delays: m.time_from(c).map(|t| Some(t.dst)).collect(),
            divergent: m.time_from(c).any(|t| t.divergent),
        }
    }
}

/// Samples `pairs_per_class` valuation pairs in every class of `g` and
/// reports each disagreement.
pub fn check_region_quotient(
    ta: &TimedAutomatonWithFaults,
    g: &RegionGraph,
    pairs_per_class: usize,
    seed: u64,
) -> RegionCheckReport {
    let index = g.states.iter().enumerate().map(|(i, (l, r))| ((*l, r), ClassId(i as u32))).collect();
    let checker = Checker { ta, g, index };
    let mut rng = StdRng::seed_from_u64(seed);
    let mut report = RegionCheckReport { classes: g.states.len(), ..Default::default() };
    for (i, (loc, region)) in g.states.iter().enumerate() {
        let c = ClassId(i as u32);
        let expected = checker.abstract_signature(c);
        for _ in 0..pairs_per_class {
            let v1 = concrete::sample(region, &g.ceilings, &mut rng, 60);
            let v2 = concrete::sample(region, &g.ceilings, &mut rng, 60);
            let (s1, s2) = (checker.signature(*loc, &v1), checker.signature(*loc, &v2));
            report.pairs += 1;
            if s1 != s2 || s1 != expected {
                let name = |x| ta.clock_name(x).to_string();
                report.violations.push(format!(
                    "class {}: {} gives {:?}, {} gives {:?}, quotient has {:?}",
                    g.model.class_name(c),
                    concrete::render(&v1, &name),
                    s1,
                    concrete::render(&v2, &name),
                    s2,
                    expected
                ));
                break;
            }
        }
    }
    report
}
