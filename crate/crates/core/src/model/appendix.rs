//! The explicit periodic model of the grid axioms and deliberate
//! corruptions of it.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{pow2_inv, q, IntervalModel, ModelError, PeriodPattern, TaggedInterval, Zone, Q};

/// Left family anchor `1/4 + 2^-j`.
fn left(j: usize) -> Q {
    q(1, 4) + pow2_inv(j)
}

/// Right family anchor `3/4 - 2^-j`.
fn right(j: usize) -> Q {
    q(3, 4) - pow2_inv(j)
}

/// Offset of a head cell's supporting point from its zone start.
///
/// Cell 0 sits at `1/2`; cell `c > 0` closes the inside interval of the
/// right family with index `c + 2`, cell `c < 0` that of the left family
/// with index `3 - c`.
pub fn head_cell_offset(cell: i64) -> Q {
    if cell == 0 {
        q(1, 2)
    } else if cell > 0 {
        let j = cell as usize + 2;
        right(j) + pow2_inv(j + 2)
    } else {
        let j = (3 - cell) as usize;
        left(j) + pow2_inv(j + 2)
    }
}

/// Smallest depth whose zones contain cells `lo..=hi`.
pub fn required_depth_for_cells(lo: i64, hi: i64) -> usize {
    let need_left = if lo < 0 { (3 - lo) as usize } else { 0 };
    let need_right = if hi > 0 { (hi + 2) as usize } else { 0 };
    need_left.max(need_right).max(4)
}

fn state_zone(n: usize) -> Zone {
    let d = 2 * (n as i64 - 1);
    let mut intervals = Vec::with_capacity(2 * (n - 1));
    for i in 0..(n as i64 - 1) {
        intervals.push(TaggedInterval::new(q(2 * i, d), q(2 * i + 1, d), false));
        intervals.push(TaggedInterval::new(q(2 * i + 1, d), q(2 * i + 2, d), true));
    }
    Zone { intervals, accumulation: None }
}

fn integer_zone(depth: usize) -> Zone {
    let mut iv = Vec::with_capacity(4 * depth);
    iv.push(TaggedInterval::new(Q::zero(), q(1, 4), false));
    for j in (4..=depth).rev() {
        let mid = left(j) + pow2_inv(j + 2);
        iv.push(TaggedInterval::new(left(j), mid.clone(), true));
        iv.push(TaggedInterval::new(mid, left(j - 1), false));
    }
    iv.push(TaggedInterval::new(q(3, 8), q(1, 2), true));
    iv.push(TaggedInterval::new(q(1, 2), q(5, 8), false));
    for j in 3..=depth {
        let mid = right(j) + pow2_inv(j + 2);
        iv.push(TaggedInterval::new(right(j), mid.clone(), true));
        iv.push(TaggedInterval::new(mid, right(j + 1), false));
    }
    iv.push(TaggedInterval::new(q(3, 4), Q::one(), true));
    Zone { intervals: iv, accumulation: Some((q(1, 4), q(3, 4))) }
}

/// The explicit model of the grid axioms, with the alternating families
/// of the two ℤ-ordered zones generated down to index `depth`.
pub fn build_appendix_model(n: usize, depth: usize) -> Result<IntervalModel, ModelError> {
    if n < 2 {
        return Err(ModelError::TooFewBits(n));
    }
    if depth < 4 {
        return Err(ModelError::DepthTooSmall(depth));
    }
    let z = integer_zone(depth);
    let pattern = PeriodPattern::new([state_zone(n), z.clone(), z]);
    Ok(IntervalModel {
        n_bits: n,
        depth,
        origin: 0,
        prefix_inside: true,
        periods: vec![Arc::new(pattern)],
        labels: BTreeMap::new(),
        default_label: None,
    })
}

fn map_patterns(m: &IntervalModel, f: impl Fn(&PeriodPattern) -> PeriodPattern) -> IntervalModel {
    // Keep shared periods shared.
    let mut cache: Vec<(*const PeriodPattern, Arc<PeriodPattern>)> = Vec::new();
    let periods = m
        .periods
        .iter()
        .map(|p| {
            let key = Arc::as_ptr(p);
            if let Some((_, done)) = cache.iter().find(|(k, _)| *k == key) {
                return done.clone();
            }
            let new = Arc::new(f(p));
            cache.push((key, new.clone()));
            new
        })
        .collect();
    IntervalModel { periods, ..m.clone() }
}

fn rotate_zone(zone: &Zone, shift: &Q) -> Zone {
    let one = Q::one();
    let wrap = |x: Q| if x >= one { x - &one } else { x };
    let s = shift - Q::from_integer(shift.floor().to_integer());
    let mut out = Vec::with_capacity(zone.intervals.len() + 1);
    for iv in &zone.intervals {
        let (lo, hi) = (&iv.lo + &s, &iv.hi + &s);
        if lo >= one {
            out.push(TaggedInterval::new(lo - &one, hi - &one, iv.inside));
        } else if hi <= one {
            out.push(TaggedInterval::new(lo, hi, iv.inside));
        } else {
            out.push(TaggedInterval::new(lo, one.clone(), iv.inside));
            out.push(TaggedInterval::new(Q::zero(), hi - &one, iv.inside));
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    let accumulation = zone.accumulation.as_ref().map(|(b1, b2)| (wrap(b1 + &s), wrap(b2 + &s)));
    Zone { intervals: out, accumulation }
}

/// Rotates the tape-zone pattern cyclically by `shift` (taken modulo 1).
pub fn corrupt_rotate_tape_zone(m: &IntervalModel, shift: &Q) -> IntervalModel {
    map_patterns(m, |p| {
        let mut zones = p.zones.clone();
        zones[2] = rotate_zone(&zones[2], shift);
        PeriodPattern::new(zones)
    })
}

fn split_first_outside(zone: &Zone) -> Zone {
    let mut out = zone.clone();
    if let Some(first) = zone.intervals.first().filter(|iv| !iv.inside) {
        let width = &first.hi - &first.lo;
        let a = &first.lo + &width * q(1, 4);
        let b = &first.lo + &width * q(1, 2);
        out.intervals.splice(
            0..1,
            [
                TaggedInterval::new(first.lo.clone(), a.clone(), false),
                TaggedInterval::new(a, b.clone(), true),
                TaggedInterval::new(b, first.hi.clone(), false),
            ],
        );
    }
    out
}

/// Adds a supporting point inside the right margin of anchor 1 and mirrors
/// it into the tape zone, so only the confinement clause breaks.
pub fn corrupt_margin_point(m: &IntervalModel) -> IntervalModel {
    map_patterns(m, |p| {
        let mut zones = p.zones.clone();
        zones[1] = split_first_outside(&zones[1]);
        zones[2] = split_first_outside(&zones[2]);
        PeriodPattern::new(zones)
    })
}

/// Adds one supporting point between anchors 0 and 1 by splitting the first
/// inside interval of the state zone.
pub fn corrupt_extra_state_point(m: &IntervalModel) -> IntervalModel {
    map_patterns(m, |p| {
        let mut zones = p.zones.clone();
        if let Some(i) = zones[0].intervals.iter().position(|iv| iv.inside) {
            let iv = zones[0].intervals[i].clone();
            let width = &iv.hi - &iv.lo;
            let a = &iv.lo + &width * q(1, 4);
            let b = &iv.lo + &width * q(1, 2);
            zones[0].intervals.splice(
                i..=i,
                [
                    TaggedInterval::new(iv.lo.clone(), a.clone(), true),
                    TaggedInterval::new(a, b.clone(), false),
                    TaggedInterval::new(b, iv.hi.clone(), true),
                ],
            );
        }
        PeriodPattern::new(zones)
    })
}
