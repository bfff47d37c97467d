//! Structural check of the seven grid axioms on an interval model.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{qi, GridZone, IntervalModel, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: usize,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridAxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl GridAxiomReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failed(&self) -> Vec<usize> {
        self.checks.iter().filter(|c| !c.ok).map(|c| c.axiom).collect()
    }

    pub fn verdicts(&self) -> Vec<bool> {
        self.checks.iter().map(|c| c.ok).collect()
    }
}

impl fmt::Display for GridAxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "AXIOM {} {}: {}", c.axiom, if c.ok { "ok" } else { "FAILED" }, c.detail)?;
        }
        Ok(())
    }
}

fn check(axiom: usize, result: Result<String, String>) -> AxiomCheck {
    match result {
        Ok(detail) => AxiomCheck { axiom, ok: true, detail },
        Err(detail) => AxiomCheck { axiom, ok: false, detail },
    }
}

/// Verifies each axiom family on the interval description.
///
/// Anchor 0 is the model origin. The ℤ-ordered zones are only generated to
/// a finite depth; their remaining points are taken as present by schema in
/// the uncovered stretches next to the accumulation points.
pub fn check_grid_axioms(m: &IntervalModel) -> GridAxiomReport {
    GridAxiomReport {
        checks: vec![
            check(1, axiom1(m)),
            check(2, axiom2(m)),
            check(3, axiom3(m)),
            check(4, axiom4(m)),
            check(5, axiom5(m)),
            check(6, axiom6(m)),
            check(7, axiom7(m)),
        ],
    }
}

fn anchor(m: &IntervalModel, i: i64) -> Q {
    qi(m.origin + i)
}

fn axiom1(m: &IntervalModel) -> Result<String, String> {
    Ok(format!("anchors at {}, {}, {}, {}", anchor(m, 0), anchor(m, 1), anchor(m, 2), anchor(m, 3)))
}

fn axiom2(m: &IntervalModel) -> Result<String, String> {
    for i in 0..3 {
        let a = anchor(m, i);
        if m.grid_index(&a).is_none() {
            return Err(format!("anchor {i} at {a} is not a supporting point"));
        }
    }
    Ok("anchors 0, 1, 2 are supporting".into())
}

fn axiom3(m: &IntervalModel) -> Result<String, String> {
    if m.prefix_inside {
        Ok(format!("(-inf, {}) inside", anchor(m, 0)))
    } else {
        Err(format!("(-inf, {}) is outside the predicate", anchor(m, 0)))
    }
}

fn axiom4(m: &IntervalModel) -> Result<String, String> {
    let inner: Vec<Q> =
        m.period_grid(0).into_iter().filter(|(r, _)| !r.is_zero() && *r < Q::one()).map(|(r, _)| r).collect();
    let want = m.n_bits - 2;
    if inner.len() == want {
        Ok(format!("{want} supporting points inside (0, 1)"))
    } else {
        Err(format!("{} supporting points inside (0, 1), expected {want}", inner.len()))
    }
}

fn axiom5(m: &IntervalModel) -> Result<String, String> {
    let pat = m.pattern(0);
    let zone = &pat.zones[1];
    let base = anchor(m, 1);
    let Some((b1, b2)) = zone.accumulation.clone() else {
        return Err("head zone has no accumulation bounds".into());
    };
    if !(b1 > Q::zero() && b1 < b2 && b2 < Q::one()) {
        return Err(format!("bounds {} < {} not inside the zone", &base + &b1, &base + &b2));
    }
    let points = pat.zone_points(1);
    if let Some(bad) = points.iter().find(|r| **r <= b1 || **r >= b2) {
        return Err(format!("supporting point {} outside ({}, {})", &base + bad, &base + &b1, &base + &b2));
    }
    let (Some(first), Some(last)) = (points.first(), points.last()) else {
        return Err("no supporting points between anchors 1 and 2".into());
    };
    // The only uncovered stretches may be the schema tails next to b1 and b2.
    let gaps = zone.gaps();
    let tails_ok = gaps.len() == 2 && gaps[0].0 == b1 && gaps[0].1 <= *first && gaps[1].0 >= *last && gaps[1].1 == b2;
    if !tails_ok {
        let shown: Vec<String> = gaps.iter().map(|(a, b)| format!("({}, {})", &base + a, &base + b)).collect();
        return Err(format!("ungenerated stretches {} do not close off at the bounds", shown.join(" ")));
    }
    Ok(format!(
        "{} generated supporting points confined to ({}, {}) with successors and predecessors",
        points.len(),
        &base + &b1,
        &base + &b2
    ))
}

fn axiom6(m: &IntervalModel) -> Result<String, String> {
    let pat = m.pattern(0);
    let (head, tape) = (pat.zone_points(1), pat.zone_points(2));
    let base = anchor(m, 1);
    for i in 0..head.len().max(tape.len()) {
        match (head.get(i), tape.get(i)) {
            (Some(h), Some(t)) if h == t => {}
            (h, t) => {
                let at = match (h, t) {
                    (Some(h), Some(t)) => h.min(t).clone(),
                    (Some(x), None) | (None, Some(x)) => x.clone(),
                    (None, None) => unreachable!(),
                };
                return Err(format!("supporting sets differ at {} / {}", &base + &at, &base + qi(1) + &at));
            }
        }
    }
    if pat.zones[1].accumulation != pat.zones[2].accumulation {
        return Err("accumulation bounds differ between head and tape zones".into());
    }
    Ok(format!("{} supporting points repeat at offset 1", head.len()))
}

fn axiom7(m: &IntervalModel) -> Result<String, String> {
    if m.prefix_inside && !m.pattern(0).grid().first().is_some_and(|(r, _)| r.is_zero()) {
        return Err("period 0 does not start on a supporting point".into());
    }
    for (k, pair) in m.periods.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        if Arc::ptr_eq(a, b) {
            continue;
        }
        let ga: Vec<&Q> = a.grid().iter().map(|(r, _)| r).collect();
        let gb: Vec<&Q> = b.grid().iter().map(|(r, _)| r).collect();
        let acc_a: Vec<_> = a.zones.iter().map(|z| &z.accumulation).collect();
        let acc_b: Vec<_> = b.zones.iter().map(|z| &z.accumulation).collect();
        if ga != gb || acc_a != acc_b {
            return Err(format!("period {} differs from period {}", k + 1, k));
        }
    }
    // Each period boundary must itself be a supporting point.
    let mut seen: Vec<*const super::PeriodPattern> = Vec::new();
    for (k, p) in m.periods.iter().enumerate() {
        if seen.contains(&Arc::as_ptr(p)) {
            continue;
        }
        seen.push(Arc::as_ptr(p));
        if !p.ends_inside() || !p.starts_outside() {
            return Err(format!("boundary {} of period {k} is not a supporting point", m.period_start(k + 1)));
        }
    }
    let zones = m.period_grid(0).iter().filter(|(_, z)| matches!(z, GridZone::State(_))).count();
    Ok(format!("{} explicit period(s) repeat with {zones} state points each", m.periods.len()))
}
