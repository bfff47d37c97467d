//! Symbolic models of a unary predicate over the reals.
//!
//! A model is periodic with period 3. Each period has three unit zones, and
//! each zone is a sorted list of open intervals tagged as inside or outside
//! the predicate. Endpoints are exact rationals. Stretches of a zone that no
//! interval covers are *schema gaps*: the infinite tail of an alternating
//! family that was only generated up to a finite depth. Truth values at
//! interval endpoints come from explicit labels.

mod appendix;
mod axioms;
mod dump;
mod eval;
mod intended;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use appendix::{
    build_appendix_model, corrupt_extra_state_point, corrupt_margin_point, corrupt_rotate_tape_zone, head_cell_offset,
    required_depth_for_cells,
};
pub use axioms::{check_grid_axioms, AxiomCheck, GridAxiomReport};
pub use dump::{dump_model, parse_model};
pub use eval::{bounded_evaluate, Evaluation, IntegerGridModel, PredicateModel, Verdict};
pub use intended::{
    abstraction_from_model, abstraction_from_trace, check_halt_constraints, intended_model_from_trace,
    intended_model_with_periods, required_depth, ConfigEncoding, FamilyCheck, GridAbstraction, HaltReport,
};

/// Exact coordinate on the real line.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `2^-e`.
pub fn pow2_inv(e: usize) -> Q {
    Q::new(BigInt::one(), BigInt::one() << e)
}

fn floor_i64(x: &Q) -> Option<i64> {
    x.floor().to_integer().to_i64()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model needs at least 2 state bits, got {0}")]
    TooFewBits(usize),
    #[error("generation depth must be at least 4, got {0}")]
    DepthTooSmall(usize),
    #[error("depth {got} cannot hold tape cells {lo}..={hi}; need depth {need}")]
    TraceTooWide { lo: i64, hi: i64, need: usize, got: usize },
    #[error("trace has no configurations")]
    EmptyTrace,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("free variable `{0}` has no value")]
    Unassigned(String),
    #[error("cannot evaluate atom {0}")]
    UnsupportedAtom(String),
}

/// Open interval `(lo, hi)` relative to its zone start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedInterval {
    pub lo: Q,
    pub hi: Q,
    pub inside: bool,
}

impl TaggedInterval {
    pub fn new(lo: Q, hi: Q, inside: bool) -> Self {
        debug_assert!(lo < hi);
        TaggedInterval { lo, hi, inside }
    }
}

/// One unit zone: sorted disjoint intervals within `(0, 1)` and, for the
/// ℤ-ordered zones, the two accumulation points of its supporting points.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Zone {
    pub intervals: Vec<TaggedInterval>,
    pub accumulation: Option<(Q, Q)>,
}

impl Zone {
    /// Sub-ranges of `(0, 1)` not covered by any interval.
    pub fn gaps(&self) -> Vec<(Q, Q)> {
        let mut out = Vec::new();
        let mut cursor = Q::zero();
        for iv in &self.intervals {
            if iv.lo > cursor {
                out.push((cursor.clone(), iv.lo.clone()));
            }
            cursor = iv.hi.clone();
        }
        if cursor < Q::one() {
            out.push((cursor, Q::one()));
        }
        out
    }

    /// Membership at a point strictly inside one of the intervals.
    fn member_open(&self, rel: &Q) -> Option<bool> {
        let i = self.intervals.partition_point(|iv| iv.hi <= *rel);
        self.intervals.get(i).filter(|iv| iv.lo < *rel).map(|iv| iv.inside)
    }
}

/// Position of a supporting point inside its period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GridZone {
    /// The `i`-th state-bit point, 1-based, in `[0, 1]`.
    State(usize),
    /// Head cell in `(1, 2)`; cell 0 is the first point at or right of the
    /// zone midpoint.
    Head(i64),
    /// The point at offset 2 separating the head and tape zones.
    Divider,
    /// Tape cell in `(2, 3)`, indexed like the head zone.
    Tape(i64),
}

impl fmt::Display for GridZone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridZone::State(i) => write!(f, "state bit {i}"),
            GridZone::Head(c) => write!(f, "head cell {c}"),
            GridZone::Divider => f.write_str("divider"),
            GridZone::Tape(c) => write!(f, "tape cell {c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridPoint {
    pub config_index: usize,
    pub zone: GridZone,
    pub coordinate: Q,
}

/// Zone selector for [`extract_supporting_points`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoneKind {
    State,
    Head,
    Tape,
}

/// The repeated content of one period `[3k, 3k+3)`.
#[derive(Debug, Default)]
pub struct PeriodPattern {
    pub zones: [Zone; 3],
    grid: OnceLock<Vec<(Q, GridZone)>>,
}

impl Clone for PeriodPattern {
    fn clone(&self) -> Self {
        PeriodPattern::new(self.zones.clone())
    }
}

impl PartialEq for PeriodPattern {
    fn eq(&self, other: &Self) -> bool {
        self.zones == other.zones
    }
}

impl Eq for PeriodPattern {}

impl PeriodPattern {
    pub fn new(zones: [Zone; 3]) -> Self {
        PeriodPattern { zones, grid: OnceLock::new() }
    }

    /// Intervals of all three zones in period-relative coordinates.
    pub fn intervals(&self) -> impl Iterator<Item = TaggedInterval> + '_ {
        self.zones.iter().enumerate().flat_map(|(z, zone)| {
            let off = qi(z as i64);
            zone.intervals.iter().map(move |iv| TaggedInterval {
                lo: &iv.lo + &off,
                hi: &iv.hi + &off,
                inside: iv.inside,
            })
        })
    }

    fn starts_outside(&self) -> bool {
        self.zones[0].intervals.first().is_some_and(|iv| iv.lo.is_zero() && !iv.inside)
    }

    fn ends_inside(&self) -> bool {
        self.zones[2].intervals.last().is_some_and(|iv| iv.hi.is_one() && iv.inside)
    }

    /// Supporting points in `[0, 3)` relative to the period start, assuming
    /// the predicate holds just left of offset 0.
    pub fn grid(&self) -> &[(Q, GridZone)] {
        self.grid.get_or_init(|| {
            let ivs: Vec<TaggedInterval> = self.intervals().collect();
            let mut points: Vec<Q> = Vec::new();
            if self.starts_outside() {
                points.push(Q::zero());
            }
            for w in ivs.windows(2) {
                if w[0].hi == w[1].lo && w[0].inside && !w[1].inside {
                    points.push(w[0].hi.clone());
                }
            }
            classify_points(points)
        })
    }

    /// Supporting points strictly inside zone `z` (0-based), relative to
    /// the zone start.
    fn zone_points(&self, z: usize) -> Vec<Q> {
        let (lo, hi) = (qi(z as i64), qi(z as i64 + 1));
        self.grid().iter().filter(|(r, _)| *r > lo && *r < hi).map(|(r, _)| r - &lo).collect()
    }
}

fn classify_points(points: Vec<Q>) -> Vec<(Q, GridZone)> {
    let (one, two) = (qi(1), qi(2));
    let head_mid = q(3, 2);
    let tape_mid = q(5, 2);
    let head: Vec<&Q> = points.iter().filter(|r| **r > one && **r < two).collect();
    let tape: Vec<&Q> = points.iter().filter(|r| **r > two).collect();
    let head_zero = head.iter().position(|r| **r >= head_mid).unwrap_or(head.len()) as i64;
    let tape_zero = tape.iter().position(|r| **r >= tape_mid).unwrap_or(tape.len()) as i64;
    let (mut state_i, mut head_i, mut tape_i) = (0usize, 0i64, 0i64);
    points
        .into_iter()
        .map(|r| {
            let zone = if r <= one {
                state_i += 1;
                GridZone::State(state_i)
            } else if r < two {
                head_i += 1;
                GridZone::Head(head_i - 1 - head_zero)
            } else if r == two {
                GridZone::Divider
            } else {
                tape_i += 1;
                GridZone::Tape(tape_i - 1 - tape_zero)
            };
            (r, zone)
        })
        .collect()
}

/// A predicate over ℝ: `(-∞, origin)` is uniformly inside or outside, and
/// from `origin` on the line is tiled by periods of length 3. Periods past
/// the last explicit one repeat it.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalModel {
    pub n_bits: usize,
    pub depth: usize,
    pub origin: i64,
    pub prefix_inside: bool,
    pub periods: Vec<Arc<PeriodPattern>>,
    /// Truth values at isolated points, in absolute coordinates.
    pub labels: BTreeMap<Q, bool>,
    /// Value at isolated points without a label; `None` leaves them open.
    pub default_label: Option<bool>,
}

impl IntervalModel {
    pub fn pattern(&self, k: usize) -> &Arc<PeriodPattern> {
        self.periods.get(k).or_else(|| self.periods.last()).expect("model has at least one period")
    }

    pub fn period_start(&self, k: usize) -> Q {
        qi(self.origin + 3 * k as i64)
    }

    /// Period index and offset of `x`, or `None` before the origin.
    pub fn locate(&self, x: &Q) -> Option<(usize, Q)> {
        let rel = x - qi(self.origin);
        if rel.is_negative() {
            return None;
        }
        let k = floor_i64(&(&rel / qi(3)))?;
        let k = usize::try_from(k).ok()?;
        Some((k, rel - qi(3 * k as i64)))
    }

    /// Whether the predicate holds just left of the start of period `k`.
    fn inside_before_period(&self, k: usize) -> bool {
        if k == 0 {
            self.prefix_inside
        } else {
            self.pattern(k - 1).ends_inside()
        }
    }

    /// Supporting points of period `k`, relative to its start.
    pub fn period_grid(&self, k: usize) -> Vec<(Q, GridZone)> {
        let g = self.pattern(k).grid();
        match g.first() {
            Some((r, _)) if r.is_zero() && !self.inside_before_period(k) => {
                classify_points(g[1..].iter().map(|(r, _)| r.clone()).collect())
            }
            _ => g.to_vec(),
        }
    }

    fn period_grid_has(&self, k: usize, rel: &Q) -> Option<GridZone> {
        let g = self.pattern(k).grid();
        let drops_origin = g.first().is_some_and(|(r, _)| r.is_zero()) && !self.inside_before_period(k);
        if drops_origin {
            // State indices shift when the offset-0 point is dropped.
            return self.period_grid(k).into_iter().find(|(r, _)| r == rel).map(|(_, z)| z);
        }
        g.binary_search_by(|(r, _)| r.cmp(rel)).ok().map(|i| g[i].1)
    }

    /// Maps a supporting coordinate to its configuration and zone.
    pub fn grid_index(&self, x: &Q) -> Option<GridPoint> {
        let (k, rel) = self.locate(x)?;
        let zone = self.period_grid_has(k, &rel)?;
        Some(GridPoint { config_index: k, zone, coordinate: x.clone() })
    }

    /// Absolute coordinate of a grid point, if it exists.
    pub fn coordinate_of(&self, k: usize, zone: GridZone) -> Option<Q> {
        let start = self.period_start(k);
        self.period_grid(k).into_iter().find(|(_, z)| *z == zone).map(|(r, _)| start + r)
    }

    /// Shifts every interval and label by the integer `k`.
    pub fn shifted(&self, k: i64) -> IntervalModel {
        let dk = qi(k);
        IntervalModel {
            origin: self.origin + k,
            labels: self.labels.iter().map(|(x, b)| (x + &dk, *b)).collect(),
            ..self.clone()
        }
    }

    /// Membership at `x`: `None` inside schema gaps and at unlabeled
    /// isolated points when no default is set.
    pub fn member(&self, x: &Q) -> Option<bool> {
        let Some((k, rel)) = self.locate(x) else {
            return Some(self.prefix_inside);
        };
        let pat = self.pattern(k);
        let z = floor_i64(&rel).expect("offset in [0, 3)") as usize;
        let inner = &rel - qi(z as i64);
        if !inner.is_zero() {
            if let Some(b) = pat.zones[z].member_open(&inner) {
                return Some(b);
            }
            let on_endpoint = pat.zones[z].intervals.iter().any(|iv| iv.lo == inner || iv.hi == inner);
            if !on_endpoint {
                return None;
            }
        }
        // Labels of the last explicit period repeat with it.
        let last = self.periods.len().max(1) - 1;
        let key = if k > last { x - qi(3 * (k - last) as i64) } else { x.clone() };
        self.labels.get(&key).copied().or(self.default_label)
    }

    /// Every interval endpoint in explicit periods, in absolute coordinates.
    pub fn endpoints(&self) -> Vec<Q> {
        let mut out = Vec::new();
        for k in 0..self.periods.len().max(1) {
            let start = self.period_start(k);
            out.push(start.clone());
            for iv in self.pattern(k).intervals() {
                out.push(&start + iv.lo);
                out.push(&start + iv.hi);
            }
        }
        out.push(self.period_start(self.periods.len().max(1)));
        out.sort();
        out.dedup();
        out
    }
}

/// Supporting points of one zone of period `k`, in increasing order.
pub fn extract_supporting_points(m: &IntervalModel, zone: ZoneKind, k: usize) -> Vec<Q> {
    let start = m.period_start(k);
    m.period_grid(k)
        .into_iter()
        .filter(|(_, z)| match zone {
            ZoneKind::State => matches!(z, GridZone::State(_)),
            ZoneKind::Head => matches!(z, GridZone::Head(_)),
            ZoneKind::Tape => matches!(z, GridZone::Tape(_)),
        })
        .map(|(r, _)| &start + r)
        .collect()
}

/// Finds the grid index of `x`.
pub fn grid_index(m: &IntervalModel, x: &Q) -> Option<GridPoint> {
    m.grid_index(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zone_two_neighbours_of_centre() {
        let m = build_appendix_model(3, 8).unwrap();
        let head = extract_supporting_points(&m, ZoneKind::Head, 0);
        let centre = head.iter().position(|x| *x == q(3, 2)).expect("centre is supporting");
        assert_eq!(head[centre + 1], qi(1) + q(21, 32));
        assert_eq!(head[centre - 1], qi(1) + q(21, 64));
        assert!(head.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn grid_index_examples() {
        let m = build_appendix_model(3, 8).unwrap();
        let centre = m.grid_index(&q(3, 2)).unwrap();
        assert_eq!((centre.config_index, centre.zone), (0, GridZone::Head(0)));
        assert_eq!(m.grid_index(&qi(0)).unwrap().zone, GridZone::State(1));
        assert_eq!(m.grid_index(&qi(1)).unwrap().zone, GridZone::State(3));
        assert_eq!(m.grid_index(&qi(2)).unwrap().zone, GridZone::Divider);
        assert!(m.grid_index(&q(11, 10)).is_none());
        assert!(m.grid_index(&qi(-1)).is_none());
        let next = m.grid_index(&qi(3)).unwrap();
        assert_eq!((next.config_index, next.zone), (1, GridZone::State(1)));
        let tape = m.grid_index(&q(5, 2)).unwrap();
        assert_eq!(tape.zone, GridZone::Tape(0));
    }

    #[test]
    fn grid_index_inverts_coordinates() {
        let m = build_appendix_model(4, 9).unwrap();
        for k in 0..3 {
            for (r, z) in m.period_grid(k) {
                let x = m.period_start(k) + r;
                let gp = m.grid_index(&x).unwrap();
                assert_eq!((gp.config_index, gp.zone), (k, z));
                assert_eq!(m.coordinate_of(k, z), Some(x));
            }
        }
    }

    #[test]
    fn membership() {
        let m = build_appendix_model(2, 8).unwrap();
        assert_eq!(m.member(&qi(-5)), Some(true));
        assert_eq!(m.member(&q(1, 4)), Some(false));
        assert_eq!(m.member(&q(3, 4)), Some(true));
        assert_eq!(m.member(&q(11, 10)), Some(false));
        assert_eq!(m.member(&q(29, 20)), Some(true));
        // Schema gap next to the left accumulation point.
        assert_eq!(m.member(&(qi(1) + q(1, 4) + pow2_inv(12))), None);
        // Unlabeled isolated point.
        assert_eq!(m.member(&q(3, 2)), None);
    }

    #[test]
    fn shift_moves_grid() {
        let m = build_appendix_model(3, 6).unwrap();
        let s = m.shifted(-2);
        let gp = s.grid_index(&(q(3, 2) - qi(2))).unwrap();
        assert_eq!(gp.zone, GridZone::Head(0));
    }
}
