//! Concrete clock valuations with exact rational arithmetic.
//!
//! Used to cross-check the region abstraction: every region can be sampled,
//! and every valuation mapped back to its region.

use num_rational::Ratio;
use rand::Rng;

use super::region::{IntPart, Region};
use super::{ClockConstraint, ClockId, Pred};

pub type Value = Ratio<i64>;
pub type Valuation = Vec<Value>;

fn frac(v: Value) -> Value {
    v - v.floor()
}

pub fn satisfies(v: &[Value], cc: &ClockConstraint) -> bool {
    cc.op.holds(v[cc.clock.index()], Value::from_integer(i64::from(cc.bound)))
}

pub fn satisfies_all(v: &[Value], ccs: &[ClockConstraint]) -> bool {
    ccs.iter().all(|c| satisfies(v, c))
}

pub fn eval(v: &[Value], p: &Pred) -> bool {
    p.eval(&mut |c| satisfies(v, c))
}

pub fn delay(v: &[Value], d: Value) -> Valuation {
    v.iter().map(|&x| x + d).collect()
}

pub fn reset(v: &[Value], clocks: &[ClockId]) -> Valuation {
    let mut out = v.to_vec();
    for c in clocks {
        out[c.index()] = Value::from_integer(0);
    }
    out
}

/// The region containing `v`.
pub fn region_of(v: &[Value], ceilings: &[u32]) -> Region {
    let ints: Vec<IntPart> = v
        .iter()
        .zip(ceilings)
        .map(|(&x, &c)| {
            if x > Value::from_integer(i64::from(c)) {
                IntPart::Above
            } else {
                IntPart::Bounded(x.floor().to_integer() as u32)
            }
        })
        .collect();
    let mut open: Vec<(Value, ClockId)> = (0..v.len())
        .filter(|&i| ints[i] != IntPart::Above && !frac(v[i]).is_integer())
        .map(|i| (frac(v[i]), ClockId(i as u32)))
        .collect();
    open.sort();
    let mut groups: Vec<Vec<ClockId>> = Vec::new();
    let mut last: Option<Value> = None;
    for (f, c) in open {
        match (last, groups.last_mut()) {
            (Some(l), Some(g)) if l == f => g.push(c),
            _ => groups.push(vec![c]),
        }
        last = Some(f);
    }
    Region::from_parts(ints, groups, ceilings).expect("valuation maps to a canonical region")
}

/// A fixed point inside `r`: open groups get fractions 1/(g+1), 2/(g+1), ...
/// and unbounded clocks get their ceiling plus one.
pub fn representative(r: &Region, ceilings: &[u32]) -> Valuation {
    let g = r.frac_groups().len() as i64;
    place(r, ceilings, |i| Value::new(i as i64 + 1, g + 1), |c| Value::from_integer(i64::from(c) + 1))
}

/// A uniformly drawn point inside `r` with denominators up to `resolution`.
pub fn sample<R: Rng>(r: &Region, ceilings: &[u32], rng: &mut R, resolution: i64) -> Valuation {
    let groups = r.frac_groups().len();
    let mut fracs: Vec<i64> = Vec::new();
    while fracs.len() < groups {
        let f = rng.gen_range(1..resolution);
        if !fracs.contains(&f) {
            fracs.push(f);
        }
    }
    fracs.sort_unstable();
    let above: Vec<Value> = (0..r.num_clocks())
        .map(|_| Value::new(rng.gen_range(1..=3 * resolution), resolution))
        .collect();
    let mut k = 0;
    place(
        r,
        ceilings,
        |i| Value::new(fracs[i], resolution),
        |c| {
            k += 1;
            Value::from_integer(i64::from(c)) + above[k - 1]
        },
    )
}

fn place(
    r: &Region,
    ceilings: &[u32],
    group_frac: impl Fn(usize) -> Value,
    mut above: impl FnMut(u32) -> Value,
) -> Valuation {
    (0..r.num_clocks())
        .map(|i| {
            let c = ClockId(i as u32);
            match r.int_part(c) {
                IntPart::Above => above(ceilings[i]),
                IntPart::Bounded(n) => {
                    let base = Value::from_integer(i64::from(n));
                    match r.frac_groups().iter().position(|g| g.contains(&c)) {
                        Some(gi) => base + group_frac(gi),
                        None => base,
                    }
                }
            }
        })
        .collect()
}

/// One valuation for each region visited, in order and without repetition,
/// as time elapses from `v` until every clock exceeds its ceiling.
pub fn delay_points(v: &[Value], ceilings: &[u32]) -> Vec<Valuation> {
    let mut points: Vec<Value> = Vec::new();
    for (&x, &c) in v.iter().zip(ceilings) {
        let mut k = x.floor() + 1;
        while k <= Value::from_integer(i64::from(c)) {
            points.push(k - x);
            k += 1;
        }
    }
    points.sort();
    points.dedup();

    let mut delays = Vec::new();
    let mut prev = Value::from_integer(0);
    for &p in &points {
        delays.push((prev + p) / 2);
        delays.push(p);
        prev = p;
    }
    delays.push(prev + Value::new(1, 2));

    let mut out = vec![v.to_vec()];
    let mut last = region_of(v, ceilings);
    for d in delays {
        let p = delay(v, d);
        let r = region_of(&p, ceilings);
        if r != last {
            out.push(p);
            last = r;
        }
    }
    out
}

/// Regions of [`delay_points`].
pub fn delay_regions(v: &[Value], ceilings: &[u32]) -> Vec<Region> {
    delay_points(v, ceilings).iter().map(|p| region_of(p, ceilings)).collect()
}

/// E.g. `x=1, y=1/2`.
pub fn render(v: &[Value], name: &dyn Fn(ClockId) -> String) -> String {
    v.iter()
        .enumerate()
        .map(|(i, x)| format!("{}={}", name(ClockId(i as u32)), x))
        .collect::<Vec<_>>()
        .join(", ")
}
