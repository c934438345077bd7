//! Clock regions.

use super::{ClockConstraint, ClockId, CmpOp, Pred};

/// Integer part of a clock value, or `Above` once it exceeds the clock's
/// ceiling (the exact value is then irrelevant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IntPart {
    Bounded(u32),
    Above,
}

/// Canonical region: per-clock integer parts, plus the bounded clocks with a
/// nonzero fractional part grouped by equal fraction in ascending order.
/// Bounded clocks in no group have fraction zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Region {
    ints: Vec<IntPart>,
    frac: Vec<Vec<ClockId>>,
}

impl Region {
    /// All clocks zero.
    pub fn zero(clocks: usize) -> Region {
        Region { ints: vec![IntPart::Bounded(0); clocks], frac: Vec::new() }
    }

    /// Builds a region from its parts, or `None` if they are not canonical
    /// for `ceilings`.
    pub fn from_parts(ints: Vec<IntPart>, frac: Vec<Vec<ClockId>>, ceilings: &[u32]) -> Option<Region> {
        if ints.len() != ceilings.len() {
            return None;
        }
        let mut seen = vec![false; ints.len()];
        for group in &frac {
            if group.is_empty() || group.windows(2).any(|w| w[0] >= w[1]) {
                return None;
            }
            for c in group {
                if c.index() >= ints.len() || std::mem::replace(&mut seen[c.index()], true) {
                    return None;
                }
                match ints[c.index()] {
                    IntPart::Bounded(n) if n < ceilings[c.index()] => {}
                    _ => return None,
                }
            }
        }
        let in_range = ints.iter().zip(ceilings).all(|(i, &c)| match i {
            IntPart::Bounded(n) => *n <= c,
            IntPart::Above => true,
        });
        in_range.then_some(Region { ints, frac })
    }

    pub fn num_clocks(&self) -> usize {
        self.ints.len()
    }

    pub fn int_part(&self, c: ClockId) -> IntPart {
        self.ints[c.index()]
    }

    pub fn frac_groups(&self) -> &[Vec<ClockId>] {
        &self.frac
    }

    /// Whether the clock is bounded with a nonzero fractional part.
    pub fn is_open(&self, c: ClockId) -> bool {
        self.frac.iter().any(|g| g.contains(&c))
    }

    /// Every clock is above its ceiling, so letting time pass stays here.
    pub fn is_unbounded(&self) -> bool {
        self.ints.iter().all(|i| *i == IntPart::Above)
    }

    pub fn satisfies(&self, cc: &ClockConstraint) -> bool {
        let k = cc.bound;
        match self.ints[cc.clock.index()] {
            IntPart::Above => matches!(cc.op, CmpOp::Gt | CmpOp::Ge),
            IntPart::Bounded(n) if !self.is_open(cc.clock) => cc.op.holds(n, k),
            // value strictly between n and n + 1
            IntPart::Bounded(n) => match cc.op {
                CmpOp::Lt | CmpOp::Le => n < k,
                CmpOp::Eq => false,
                CmpOp::Gt | CmpOp::Ge => n >= k,
            },
        }
    }

    pub fn satisfies_all(&self, ccs: &[ClockConstraint]) -> bool {
        ccs.iter().all(|c| self.satisfies(c))
    }

    pub fn eval(&self, p: &Pred) -> bool {
        p.eval(&mut |c| self.satisfies(c))
    }

    /// Immediate time successor, or `None` for an unbounded region.
    pub fn successor(&self, ceilings: &[u32]) -> Option<Region> {
        if self.is_unbounded() {
            return None;
        }
        let mut next = self.clone();
        let zero: Vec<ClockId> = (0..self.ints.len() as u32)
            .map(ClockId)
            .filter(|&c| matches!(self.int_part(c), IntPart::Bounded(_)) && !self.is_open(c))
            .collect();
        if zero.is_empty() {
            let top = next.frac.pop().expect("bounded clocks are open when none is zero");
            for c in top {
                if let IntPart::Bounded(n) = next.ints[c.index()] {
                    next.ints[c.index()] = IntPart::Bounded(n + 1);
                }
            }
        } else {
            let mut group = Vec::new();
            for c in zero {
                match next.ints[c.index()] {
                    IntPart::Bounded(n) if n >= ceilings[c.index()] => next.ints[c.index()] = IntPart::Above,
                    _ => group.push(c),
                }
            }
            if !group.is_empty() {
                next.frac.insert(0, group);
            }
        }
        Some(next)
    }

    /// Sets the given clocks to zero.
    pub fn reset(&self, clocks: &[ClockId]) -> Region {
        let mut next = self.clone();
        for &c in clocks {
            next.ints[c.index()] = IntPart::Bounded(0);
        }
        for g in &mut next.frac {
            g.retain(|c| !clocks.contains(c));
        }
        next.frac.retain(|g| !g.is_empty());
        next
    }

    /// Places this region's clocks at `positions` in a region over `clocks`
    /// clocks; the remaining clocks are zero.
    pub fn embed(&self, positions: &[ClockId], clocks: usize) -> Region {
        let mut ints = vec![IntPart::Bounded(0); clocks];
        for (i, &p) in positions.iter().enumerate() {
            ints[p.index()] = self.ints[i];
        }
        let frac = self
            .frac
            .iter()
            .map(|g| {
                let mut g: Vec<ClockId> = g.iter().map(|c| positions[c.index()]).collect();
                g.sort();
                g
            })
            .collect();
        Region { ints, frac }
    }

    /// E.g. `x=0, 1<y<2, z>3; y<z` (the fractional order is listed only when
    /// at least two clocks have a nonzero fraction).
    pub fn render(&self, name: &dyn Fn(ClockId) -> String, ceilings: &[u32]) -> String {
        let mut parts = Vec::new();
        for (i, ip) in self.ints.iter().enumerate() {
            let c = ClockId(i as u32);
            parts.push(match ip {
                IntPart::Above => format!("{}>{}", name(c), ceilings[i]),
                IntPart::Bounded(n) if self.is_open(c) => format!("{}<{}<{}", n, name(c), n + 1),
                IntPart::Bounded(n) => format!("{}={}", name(c), n),
            });
        }
        let mut out = parts.join(", ");
        if self.frac.iter().map(Vec::len).sum::<usize>() >= 2 {
            let groups: Vec<String> = self
                .frac
                .iter()
                .map(|g| g.iter().map(|&c| name(c)).collect::<Vec<_>>().join("="))
                .collect();
            out.push_str("; ");
            out.push_str(&groups.join("<"));
        }
        out
    }
}

/// Every region for the given ceilings, in a fixed order.
pub fn enumerate_regions(ceilings: &[u32]) -> Vec<Region> {
    let n = ceilings.len();
    // per clock: Some((int, open)) or None for Above
    let choices: Vec<Vec<Option<(u32, bool)>>> = ceilings
        .iter()
        .map(|&c| {
            let mut v: Vec<Option<(u32, bool)>> = Vec::new();
            for k in 0..=c {
                v.push(Some((k, false)));
                if k < c {
                    v.push(Some((k, true)));
                }
            }
            v.push(None);
            v
        })
        .collect();

    let mut out = Vec::new();
    let mut pick = vec![0usize; n];
    loop {
        let ints: Vec<IntPart> = (0..n)
            .map(|i| match choices[i][pick[i]] {
                Some((k, _)) => IntPart::Bounded(k),
                None => IntPart::Above,
            })
            .collect();
        let open: Vec<ClockId> =
            (0..n).filter(|&i| matches!(choices[i][pick[i]], Some((_, true)))).map(|i| ClockId(i as u32)).collect();
        for frac in ordered_partitions(&open) {
            out.push(Region { ints: ints.clone(), frac });
        }

        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// All ordered partitions of `items` into nonempty sorted blocks.
fn ordered_partitions(items: &[ClockId]) -> Vec<Vec<Vec<ClockId>>> {
    let k = items.len();
    let mut out = Vec::new();
    let mut rank = vec![0usize; k];
    loop {
        let blocks = rank.iter().copied().max().map_or(0, |m| m + 1);
        if (0..blocks).all(|b| rank.contains(&b)) {
            out.push((0..blocks).map(|b| (0..k).filter(|&i| rank[i] == b).map(|i| items[i]).collect()).collect());
        }
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            rank[i] += 1;
            if rank[i] < k {
                break;
            }
            rank[i] = 0;
            i += 1;
        }
    }
}
