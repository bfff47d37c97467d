//! The intended model of a machine run and the halting constraints read off
//! its grid.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::appendix::{build_appendix_model, head_cell_offset, required_depth_for_cells};
use super::{q, qi, GridZone, IntervalModel, ModelError};
use crate::reduction::{state_bits, state_codes};
use crate::tm::{RunTrace, TuringMachine};

/// One configuration as stored on the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEncoding {
    pub state_bits: Vec<bool>,
    pub head_marks: BTreeSet<i64>,
    pub tape_marks: BTreeSet<i64>,
}

/// The grid contents of a model, one entry per period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridAbstraction {
    pub n_bits: usize,
    pub configs: Vec<ConfigEncoding>,
}

/// Depth needed to place every head position and tape mark of `trace`.
pub fn required_depth(trace: &RunTrace) -> usize {
    let (lo, hi) = trace.cell_span();
    required_depth_for_cells(lo, hi)
}

/// Encodes a run as grid contents.
pub fn abstraction_from_trace(m: &TuringMachine, trace: &RunTrace) -> GridAbstraction {
    let codes = state_codes(m);
    let n_bits = state_bits(m.states.len());
    let configs = trace
        .configs
        .iter()
        .map(|c| ConfigEncoding {
            state_bits: codes.get(&c.state).cloned().unwrap_or_else(|| vec![false; n_bits]),
            head_marks: [c.head].into_iter().collect(),
            tape_marks: c.tape.clone(),
        })
        .collect();
    GridAbstraction { n_bits, configs }
}

fn place(g: &GridAbstraction, depth: usize) -> Result<IntervalModel, ModelError> {
    if g.configs.is_empty() {
        return Err(ModelError::EmptyTrace);
    }
    let cells = g.configs.iter().flat_map(|c| c.head_marks.iter().chain(&c.tape_marks).copied());
    let (lo, hi) = cells.fold((0, 0), |(lo, hi), x: i64| (lo.min(x), hi.max(x)));
    let need = required_depth_for_cells(lo, hi);
    if need > depth {
        return Err(ModelError::TraceTooWide { lo, hi, need, got: depth });
    }
    let base = build_appendix_model(g.n_bits, depth)?;
    let pattern = base.periods[0].clone();
    let mut labels = BTreeMap::new();
    let last = (g.n_bits - 1) as i64;
    for (k, c) in g.configs.iter().enumerate() {
        let start = qi(3 * k as i64);
        for (i, &b) in c.state_bits.iter().enumerate() {
            if b {
                labels.insert(&start + q(i as i64, last), true);
            }
        }
        for &h in &c.head_marks {
            labels.insert(&start + qi(1) + head_cell_offset(h), true);
        }
        for &t in &c.tape_marks {
            labels.insert(&start + qi(2) + head_cell_offset(t), true);
        }
    }
    Ok(IntervalModel {
        periods: vec![Arc::clone(&pattern); g.configs.len()],
        labels,
        default_label: Some(false),
        ..base
    })
}

/// Builds the intended model of a run: one period per configuration, with
/// every period after the last repeating the last one, labels included.
pub fn intended_model_from_trace(
    m: &TuringMachine,
    trace: &RunTrace,
    depth: usize,
) -> Result<(GridAbstraction, IntervalModel), ModelError> {
    let g = abstraction_from_trace(m, trace);
    let model = place(&g, depth)?;
    Ok((g, model))
}

/// Like [`intended_model_from_trace`], padded to `periods` configurations
/// by repeating the final one.
pub fn intended_model_with_periods(
    m: &TuringMachine,
    trace: &RunTrace,
    depth: usize,
    periods: usize,
) -> Result<(GridAbstraction, IntervalModel), ModelError> {
    let mut g = abstraction_from_trace(m, trace);
    if let Some(last) = g.configs.last().cloned() {
        while g.configs.len() < periods {
            g.configs.push(last.clone());
        }
    }
    let model = place(&g, depth)?;
    Ok((g, model))
}

/// Reads the first `configs` periods of a model back as grid contents.
pub fn abstraction_from_model(model: &IntervalModel, configs: usize) -> GridAbstraction {
    let marked = |x: &super::Q| model.member(x) == Some(true);
    let configs = (0..configs)
        .map(|k| {
            let start = model.period_start(k);
            let mut enc = ConfigEncoding {
                state_bits: vec![false; model.n_bits],
                head_marks: BTreeSet::new(),
                tape_marks: BTreeSet::new(),
            };
            for (r, z) in model.period_grid(k) {
                let x = &start + r;
                if !marked(&x) {
                    continue;
                }
                match z {
                    GridZone::State(i) if i >= 1 && i <= model.n_bits => enc.state_bits[i - 1] = true,
                    GridZone::Head(c) => {
                        enc.head_marks.insert(c);
                    }
                    GridZone::Tape(c) => {
                        enc.tape_marks.insert(c);
                    }
                    _ => {}
                }
            }
            enc
        })
        .collect();
    GridAbstraction { n_bits: model.n_bits, configs }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCheck {
    pub family: &'static str,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltReport {
    pub checks: Vec<FamilyCheck>,
}

impl HaltReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn get(&self, family: &str) -> Option<&FamilyCheck> {
        self.checks.iter().find(|c| c.family == family)
    }
}

impl fmt::Display for HaltReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", c.family, if c.ok { "ok" } else { "FAILED" }, c.detail)?;
        }
        Ok(())
    }
}

fn family(family: &'static str, r: Result<String, String>) -> FamilyCheck {
    match r {
        Ok(detail) => FamilyCheck { family, ok: true, detail },
        Err(detail) => FamilyCheck { family, ok: false, detail },
    }
}

fn decode<'a>(codes: &'a BTreeMap<String, Vec<bool>>, bits: &[bool]) -> Option<&'a str> {
    codes.iter().find(|(_, c)| c.as_slice() == bits).map(|(q, _)| q.as_str())
}

/// Checks START, STEP, END and HEAD on grid contents.
///
/// STEP is required up to the first configuration carrying the halting
/// code; END asks for that configuration to exist.
pub fn check_halt_constraints(m: &TuringMachine, g: &GridAbstraction) -> HaltReport {
    let codes = state_codes(m);
    let n = state_bits(m.states.len());
    if g.n_bits != n {
        let msg = format!("grid has {} state bits, machine needs {n}", g.n_bits);
        return HaltReport {
            checks: ["START", "STEP", "END", "HEAD"]
                .into_iter()
                .map(|f| FamilyCheck { family: f, ok: false, detail: msg.clone() })
                .collect(),
        };
    }
    let halt_code = &codes[&m.halt];
    let halt_at = g.configs.iter().position(|c| &c.state_bits == halt_code);
    HaltReport {
        checks: vec![
            family("START", check_start(m, &codes, g)),
            family("STEP", check_step(m, &codes, g, halt_at)),
            family(
                "END",
                match halt_at {
                    Some(k) => Ok(format!("configuration {k} is in `{}`", m.halt)),
                    None => Err(format!("no configuration among {} is in `{}`", g.configs.len(), m.halt)),
                },
            ),
            family("HEAD", check_heads(g)),
        ],
    }
}

fn check_start(m: &TuringMachine, codes: &BTreeMap<String, Vec<bool>>, g: &GridAbstraction) -> Result<String, String> {
    let c0 = g.configs.first().ok_or("no configurations")?;
    if c0.state_bits != codes[&m.init] {
        return Err(format!("configuration 0 is not in `{}`", m.init));
    }
    if c0.head_marks.len() != 1 {
        return Err(format!("configuration 0 has {} head marks", c0.head_marks.len()));
    }
    if !c0.tape_marks.is_empty() {
        return Err(format!("configuration 0 has {} tape marks", c0.tape_marks.len()));
    }
    Ok(format!("`{}` on a blank tape", m.init))
}

fn check_step(
    m: &TuringMachine,
    codes: &BTreeMap<String, Vec<bool>>,
    g: &GridAbstraction,
    halt_at: Option<usize>,
) -> Result<String, String> {
    let upto = halt_at.unwrap_or(g.configs.len().saturating_sub(1));
    for k in 1..=upto {
        let (prev, cur) = (&g.configs[k - 1], &g.configs[k]);
        let (Some(from), Some(to)) = (decode(codes, &prev.state_bits), decode(codes, &cur.state_bits)) else {
            return Err(format!("configuration {} or {k} has no state", k - 1));
        };
        let fits = m.transitions().any(|(q, read, act)| {
            q == from
                && act.next == to
                && prev.head_marks.iter().all(|z| {
                    prev.tape_marks.contains(z) == read
                        && cur.tape_marks.contains(z) == act.write
                        && cur.head_marks.contains(&(z + act.dir.delta()))
                        && !cur.head_marks.contains(z)
                })
        });
        if !fits {
            return Err(format!("no transition takes configuration {} to {k}", k - 1));
        }
        let frame = prev.tape_marks.symmetric_difference(&cur.tape_marks).find(|c| !prev.head_marks.contains(c));
        if let Some(c) = frame {
            return Err(format!("cell {c} changes away from the head between {} and {k}", k - 1));
        }
    }
    Ok(format!("{upto} step(s) follow the transition relation"))
}

fn check_heads(g: &GridAbstraction) -> Result<String, String> {
    match g.configs.iter().position(|c| c.head_marks.len() != 1) {
        Some(k) => Err(format!("configuration {k} has {} head marks", g.configs[k].head_marks.len())),
        None => Ok(format!("{} configurations with one head each", g.configs.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_grid_axioms;
    use crate::tm::{corpus, simulate};

    #[test]
    fn m2_round_trip() {
        let m = corpus::m2();
        let t = simulate(&m, 1000).unwrap();
        let (g, model) = intended_model_from_trace(&m, &t, 8).unwrap();
        assert_eq!(abstraction_from_model(&model, g.configs.len()), g);
        assert!(check_grid_axioms(&model).all_ok());
        assert!(check_halt_constraints(&m, &g).all_ok());
        // Later periods freeze in the halting configuration.
        let frozen = abstraction_from_model(&model, g.configs.len() + 2);
        assert_eq!(frozen.configs[g.configs.len() + 1], *g.configs.last().unwrap());
    }

    #[test]
    fn looping_machine_never_ends() {
        let m = corpus::looping();
        let t = simulate(&m, 50).unwrap();
        let (g, _) = intended_model_from_trace(&m, &t, required_depth(&t)).unwrap();
        let r = check_halt_constraints(&m, &g);
        assert!(!r.get("END").unwrap().ok);
        assert!(r.get("START").unwrap().ok && r.get("STEP").unwrap().ok && r.get("HEAD").unwrap().ok);
    }

    #[test]
    fn padding_repeats_last_configuration() {
        let m = corpus::m2();
        let t = simulate(&m, 1000).unwrap();
        let (g, model) = intended_model_with_periods(&m, &t, 8, t.configs.len() + 3).unwrap();
        assert_eq!(g.configs.len(), t.configs.len() + 3);
        assert_eq!(abstraction_from_model(&model, g.configs.len()), g);
        assert!(check_halt_constraints(&m, &g).all_ok());
    }

    #[test]
    fn depth_too_small_is_reported() {
        let m = corpus::halts_in_17();
        let t = simulate(&m, 1000).unwrap();
        let need = required_depth(&t);
        if need > 4 {
            assert!(matches!(intended_model_from_trace(&m, &t, need - 1), Err(ModelError::TraceTooWide { .. })));
        }
        assert!(intended_model_from_trace(&m, &t, need).is_ok());
    }

    #[test]
    fn tampered_step_fails() {
        let m = corpus::halts_in_17();
        let t = simulate(&m, 1000).unwrap();
        let mut g = abstraction_from_trace(&m, &t);
        g.configs[3].tape_marks.insert(100);
        let r = check_halt_constraints(&m, &g);
        assert!(!r.get("STEP").unwrap().ok);
        assert!(r.get("START").unwrap().ok);
    }

    #[test]
    fn two_heads_fail_head_family() {
        let m = corpus::m2();
        let t = simulate(&m, 1000).unwrap();
        let mut g = abstraction_from_trace(&m, &t);
        g.configs[0].head_marks.insert(1);
        let r = check_halt_constraints(&m, &g);
        assert!(!r.get("HEAD").unwrap().ok);
        assert!(!r.get("START").unwrap().ok);
    }
}
