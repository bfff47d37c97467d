//! Line-oriented text form of interval models.
//!
//! ```text
//! model n=3 depth=8 origin=0 prefix=in default=0 periods=2
//! zone 0 0 1/4 out
//! accum 0 1 5/4 7/4
//! point 0 3/2 1
//! ```
//!
//! Coordinates are absolute and written as `p/q`. `zone` and `accum` lines
//! are only given for a period whose pattern differs from the one before;
//! a period without them repeats its predecessor. Blank lines and lines
//! starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use super::{floor_i64, qi, IntervalModel, ModelError, PeriodPattern, TaggedInterval, Zone, Q};

/// Renders `m` in the dump format.
pub fn dump_model(m: &IntervalModel) -> String {
    let mut out = String::new();
    let default = match m.default_label {
        None => "none",
        Some(false) => "0",
        Some(true) => "1",
    };
    let _ = writeln!(
        out,
        "model n={} depth={} origin={} prefix={} default={default} periods={}",
        m.n_bits,
        m.depth,
        m.origin,
        if m.prefix_inside { "in" } else { "out" },
        m.periods.len()
    );
    for (k, p) in m.periods.iter().enumerate() {
        let start = m.period_start(k);
        if k == 0 || !(Arc::ptr_eq(p, &m.periods[k - 1]) || **p == *m.periods[k - 1]) {
            for (z, zone) in p.zones.iter().enumerate() {
                let off = &start + qi(z as i64);
                for iv in &zone.intervals {
                    let tag = if iv.inside { "in" } else { "out" };
                    let _ = writeln!(out, "zone {k} {} {} {tag}", &off + &iv.lo, &off + &iv.hi);
                }
                if let Some((b1, b2)) = &zone.accumulation {
                    let _ = writeln!(out, "accum {k} {z} {} {}", &off + b1, &off + b2);
                }
            }
        }
        for (x, b) in m.labels.range(start.clone()..m.period_start(k + 1)) {
            let _ = writeln!(out, "point {k} {x} {}", u8::from(*b));
        }
    }
    out
}

fn err(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse { line, message: message.into() }
}

fn coord(line: usize, s: &str) -> Result<Q, ModelError> {
    Q::from_str(s).map_err(|_| err(line, format!("bad coordinate `{s}`")))
}

fn int<T: FromStr>(line: usize, s: &str) -> Result<T, ModelError> {
    s.parse().map_err(|_| err(line, format!("bad number `{s}`")))
}

/// Parses the dump format.
pub fn parse_model(text: &str) -> Result<IntervalModel, ModelError> {
    let mut header: Option<IntervalModel> = None;
    let mut n_periods = 0usize;
    let mut zones: BTreeMap<usize, [Zone; 3]> = BTreeMap::new();
    let mut labels = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks[0] == "model" {
            if header.is_some() {
                return Err(err(line, "duplicate header"));
            }
            let mut m = IntervalModel {
                n_bits: 0,
                depth: 0,
                origin: 0,
                prefix_inside: true,
                periods: Vec::new(),
                labels: BTreeMap::new(),
                default_label: None,
            };
            for kv in &toks[1..] {
                let (k, v) = kv.split_once('=').ok_or_else(|| err(line, format!("expected key=value, got `{kv}`")))?;
                match k {
                    "n" => m.n_bits = int(line, v)?,
                    "depth" => m.depth = int(line, v)?,
                    "origin" => m.origin = int(line, v)?,
                    "periods" => n_periods = int(line, v)?,
                    "prefix" => {
                        m.prefix_inside = match v {
                            "in" => true,
                            "out" => false,
                            _ => return Err(err(line, format!("prefix must be in or out, got `{v}`"))),
                        }
                    }
                    "default" => {
                        m.default_label = match v {
                            "none" => None,
                            "0" => Some(false),
                            "1" => Some(true),
                            _ => return Err(err(line, format!("default must be none, 0 or 1, got `{v}`"))),
                        }
                    }
                    _ => return Err(err(line, format!("unknown key `{k}`"))),
                }
            }
            if m.n_bits < 2 {
                return Err(err(line, "n must be at least 2"));
            }
            if n_periods == 0 {
                return Err(err(line, "periods must be positive"));
            }
            header = Some(m);
            continue;
        }
        let m = header.as_ref().ok_or_else(|| err(line, "missing model header"))?;
        let period = |s: &str| -> Result<usize, ModelError> {
            let k: usize = int(line, s)?;
            if k >= n_periods {
                return Err(err(line, format!("period {k} out of range")));
            }
            Ok(k)
        };
        match (toks[0], toks.len()) {
            ("zone", 5) => {
                let k = period(toks[1])?;
                let (lo, hi) = (coord(line, toks[2])?, coord(line, toks[3])?);
                let inside = match toks[4] {
                    "in" => true,
                    "out" => false,
                    t => return Err(err(line, format!("expected in or out, got `{t}`"))),
                };
                if lo >= hi {
                    return Err(err(line, "empty interval"));
                }
                let start = m.period_start(k);
                let rel_lo = &lo - &start;
                let z = floor_i64(&rel_lo)
                    .filter(|z| (0..3).contains(z))
                    .ok_or_else(|| err(line, "interval outside its period"))?;
                let off = &start + qi(z);
                if hi > &off + qi(1) {
                    return Err(err(line, "interval crosses a zone border"));
                }
                let zone = &mut zones.entry(k).or_default()[z as usize];
                let iv = TaggedInterval::new(lo - &off, hi - &off, inside);
                if zone.intervals.last().is_some_and(|p| p.hi > iv.lo) {
                    return Err(err(line, "intervals must be sorted and disjoint"));
                }
                zone.intervals.push(iv);
            }
            ("accum", 5) => {
                let k = period(toks[1])?;
                let z: usize = int(line, toks[2])?;
                if z > 2 {
                    return Err(err(line, format!("zone {z} out of range")));
                }
                let off = m.period_start(k) + qi(z as i64);
                let (b1, b2) = (coord(line, toks[3])? - &off, coord(line, toks[4])? - &off);
                zones.entry(k).or_default()[z].accumulation = Some((b1, b2));
            }
            ("point", 4) => {
                period(toks[1])?;
                let x = coord(line, toks[2])?;
                let b = match toks[3] {
                    "0" => false,
                    "1" => true,
                    t => return Err(err(line, format!("expected 0 or 1, got `{t}`"))),
                };
                labels.insert(x, b);
            }
            (kw, _) => return Err(err(line, format!("unexpected line starting with `{kw}`"))),
        }
    }
    let mut m = header.ok_or_else(|| err(0, "missing model header"))?;
    let mut periods: Vec<Arc<PeriodPattern>> = Vec::with_capacity(n_periods);
    for k in 0..n_periods {
        match zones.remove(&k) {
            Some(z) => periods.push(Arc::new(PeriodPattern::new(z))),
            None => match periods.last() {
                Some(p) => periods.push(p.clone()),
                None => return Err(err(0, "period 0 has no zones")),
            },
        }
    }
    m.periods = periods;
    m.labels = labels;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_appendix_model, intended_model_from_trace, q};
    use crate::tm::{corpus, simulate};

    #[test]
    fn appendix_round_trip() {
        let m = build_appendix_model(3, 6).unwrap();
        let text = dump_model(&m);
        assert!(text.starts_with("model n=3 depth=6 origin=0 prefix=in default=none periods=1\n"));
        assert!(text.contains("zone 0 1 5/4 out\n"));
        assert!(text.contains("accum 0 1 5/4 7/4\n"));
        assert_eq!(parse_model(&text).unwrap(), m);
    }

    #[test]
    fn intended_round_trip_shares_periods() {
        let m = corpus::m2();
        let t = simulate(&m, 100).unwrap();
        let (_, model) = intended_model_from_trace(&m, &t, 6).unwrap();
        let text = dump_model(&model);
        assert_eq!(text.matches("accum").count(), 2);
        assert!(text.contains(&format!("point 0 {} 1", q(3, 2))));
        let back = parse_model(&text).unwrap();
        assert_eq!(back, model);
        assert!(Arc::ptr_eq(&back.periods[0], &back.periods[1]));
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert!(matches!(parse_model("zone 0 0 1 in"), Err(ModelError::Parse { line: 1, .. })));
        let bad = "model n=2 depth=4 origin=0 prefix=in default=none periods=1\nzone 0 1/2 3/2 in\n";
        assert!(matches!(parse_model(bad), Err(ModelError::Parse { line: 2, .. })));
        let bad = "model n=2 depth=4 origin=0 prefix=maybe default=none periods=1\n";
        assert!(matches!(parse_model(bad), Err(ModelError::Parse { line: 1, .. })));
    }
}
