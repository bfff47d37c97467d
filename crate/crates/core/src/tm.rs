//! Single-tape Turing machines over the alphabet {0, 1}, started on a blank
//! (all-zero) bi-infinite tape, plus a direct simulator used as ground truth.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Tape symbol. `false` is the blank symbol 0.
pub type Bit = bool;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    L,
    R,
}

impl Dir {
    pub fn delta(self) -> i64 {
        match self {
            Dir::L => -1,
            Dir::R => 1,
        }
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::L => "L",
            Dir::R => "R",
        })
    }
}

/// Right-hand side of a transition: next state, written symbol, head move.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub next: String,
    pub write: Bit,
    pub dir: Dir,
}

/// A machine `(Q, {0,1}, q_init, q_halt, Δ)` with a functional Δ.
///
/// The fields are public so that malformed machines can be represented and
/// diagnosed by [`validate_tm`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    /// States in declaration order; the order fixes the state codes used by
    /// the reduction.
    pub states: Vec<String>,
    pub init: String,
    pub halt: String,
    pub delta: BTreeMap<(String, Bit), Action>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Error)]
pub enum TmViolation {
    #[error("no states declared")]
    NoStates,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("initial state `{0}` is not declared")]
    UnknownInit(String),
    #[error("halting state `{0}` is not declared")]
    UnknownHalt(String),
    #[error("transition mentions undeclared state `{0}`")]
    UnknownState(String),
    #[error("delta not total at ({0},{})", u8::from(*.1))]
    NotTotal(String, Bit),
    #[error("outgoing transition from halting state `{0}` on {}", u8::from(*.1))]
    HaltOutgoing(String, Bit),
}

/// Checks every machine invariant and reports all violations.
pub fn validate_tm(m: &TuringMachine) -> Result<(), Vec<TmViolation>> {
    let mut errs = BTreeSet::new();
    if m.states.is_empty() {
        errs.insert(TmViolation::NoStates);
    }
    let mut seen = BTreeSet::new();
    for s in &m.states {
        if !seen.insert(s.as_str()) {
            errs.insert(TmViolation::DuplicateState(s.clone()));
        }
    }
    if !seen.contains(m.init.as_str()) {
        errs.insert(TmViolation::UnknownInit(m.init.clone()));
    }
    if !seen.contains(m.halt.as_str()) {
        errs.insert(TmViolation::UnknownHalt(m.halt.clone()));
    }
    for ((q, bit), act) in &m.delta {
        if !seen.contains(q.as_str()) {
            errs.insert(TmViolation::UnknownState(q.clone()));
        }
        if !seen.contains(act.next.as_str()) {
            errs.insert(TmViolation::UnknownState(act.next.clone()));
        }
        if *q == m.halt {
            errs.insert(TmViolation::HaltOutgoing(q.clone(), *bit));
        }
    }
    for q in m.states.iter().filter(|q| **q != m.halt) {
        for bit in [false, true] {
            if !m.delta.contains_key(&(q.clone(), bit)) {
                errs.insert(TmViolation::NotTotal(q.clone(), bit));
            }
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.into_iter().collect())
    }
}

impl TuringMachine {
    /// Builds a machine from `(q, read, q', write, dir)` tuples and validates
    /// it. Duplicate tuples are accepted; two different actions for the same
    /// `(q, read)` are rejected.
    pub fn new(
        states: impl IntoIterator<Item = impl Into<String>>,
        init: impl Into<String>,
        halt: impl Into<String>,
        transitions: impl IntoIterator<Item = (String, Bit, String, Bit, Dir)>,
    ) -> Result<TuringMachine, TmError> {
        let mut delta = BTreeMap::new();
        for (q, read, next, write, dir) in transitions {
            let act = Action { next, write, dir };
            match delta.get(&(q.clone(), read)) {
                Some(prev) if *prev != act => {
                    return Err(TmError::Nondeterministic { state: q, read });
                }
                _ => {
                    delta.insert((q, read), act);
                }
            }
        }
        let m = TuringMachine {
            states: states.into_iter().map(Into::into).collect(),
            init: init.into(),
            halt: halt.into(),
            delta,
        };
        validate_tm(&m).map_err(TmError::Invalid)?;
        Ok(m)
    }

    pub fn state_index(&self, q: &str) -> Option<usize> {
        self.states.iter().position(|s| s == q)
    }

    /// Transitions as `(q, read, action)` in a stable order.
    pub fn transitions(&self) -> impl Iterator<Item = (&str, Bit, &Action)> {
        self.delta.iter().map(|((q, b), a)| (q.as_str(), *b, a))
    }

    pub fn initial_config(&self) -> Configuration {
        Configuration { state: self.init.clone(), tape: BTreeSet::new(), head: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TmError {
    #[error("invalid machine: {}", join(.0))]
    Invalid(Vec<TmViolation>),
    #[error("nondeterministic transition relation at ({state},{})", u8::from(*.read))]
    Nondeterministic { state: String, read: Bit },
    #[error("cannot step from the halting state `{0}`")]
    Halted(String),
    #[error("no transition for ({0},{})", u8::from(*.1))]
    Missing(String, Bit),
}

fn join(vs: &[TmViolation]) -> String {
    vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Machine configuration with a finite-support tape: `tape` holds exactly
/// the cells containing 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: String,
    pub tape: BTreeSet<i64>,
    pub head: i64,
}

impl Configuration {
    pub fn read(&self, cell: i64) -> Bit {
        self.tape.contains(&cell)
    }
}

/// One application of Δ.
pub fn step(m: &TuringMachine, c: &Configuration) -> Result<Configuration, TmError> {
    if c.state == m.halt {
        return Err(TmError::Halted(c.state.clone()));
    }
    let read = c.read(c.head);
    let act = m.delta.get(&(c.state.clone(), read)).ok_or_else(|| TmError::Missing(c.state.clone(), read))?;
    let mut tape = c.tape.clone();
    if act.write {
        tape.insert(c.head);
    } else {
        tape.remove(&c.head);
    }
    Ok(Configuration { state: act.next.clone(), tape, head: c.head + act.dir.delta() })
}

/// A finite run prefix starting from the blank-tape initial configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub configs: Vec<Configuration>,
    pub halted: bool,
}

impl RunTrace {
    /// Number of transitions taken.
    pub fn steps(&self) -> usize {
        self.configs.len() - 1
    }

    /// Smallest and largest cell touched by the head or holding a 1.
    pub fn cell_span(&self) -> (i64, i64) {
        let cells = self.configs.iter().flat_map(|c| std::iter::once(c.head).chain(c.tape.iter().copied()));
        cells.fold((0, 0), |(lo, hi), x| (lo.min(x), hi.max(x)))
    }
}

/// Runs `m` for at most `max_steps` transitions or until it halts.
pub fn simulate(m: &TuringMachine, max_steps: usize) -> Result<RunTrace, TmError> {
    let mut configs = vec![m.initial_config()];
    while configs.len() <= max_steps {
        let last = configs.last().unwrap();
        if last.state == m.halt {
            break;
        }
        let next = step(m, last)?;
        configs.push(next);
    }
    let halted = configs.last().unwrap().state == m.halt;
    Ok(RunTrace { configs, halted })
}

/// Machines used throughout the tests, benches and documentation.
pub mod corpus {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn t(q: &str, r: u8, n: &str, w: u8, d: Dir) -> (String, Bit, String, Bit, Dir) {
        (q.into(), r == 1, n.into(), w == 1, d)
    }

    /// Halts after one step whatever it reads.
    pub fn m2() -> TuringMachine {
        TuringMachine::new(["qI", "qF"], "qI", "qF", [t("qI", 0, "qF", 1, Dir::R), t("qI", 1, "qF", 1, Dir::R)])
            .unwrap()
    }

    /// Walks right forever; the halting state is unreachable.
    pub fn looping() -> TuringMachine {
        TuringMachine::new(["qI", "qF"], "qI", "qF", [t("qI", 0, "qI", 0, Dir::R), t("qI", 1, "qI", 1, Dir::R)])
            .unwrap()
    }

    /// Binary counter with three working states (plus an unreachable halting
    /// state). Cell 0 holds a sentinel 1; the counter occupies cells 1, 2, …
    /// with the least significant bit in cell 1.
    pub fn binary_counter() -> TuringMachine {
        TuringMachine::new(
            ["init", "inc", "back", "halt"],
            "init",
            "halt",
            [
                t("init", 0, "inc", 1, Dir::R),
                t("init", 1, "inc", 1, Dir::R),
                t("inc", 0, "back", 1, Dir::L),
                t("inc", 1, "inc", 0, Dir::R),
                t("back", 0, "back", 0, Dir::L),
                t("back", 1, "inc", 1, Dir::R),
            ],
        )
        .unwrap()
    }

    /// Halts after exactly 17 steps.
    pub fn halts_in_17() -> TuringMachine {
        TuringMachine::new(
            ["A", "B", "C", "H"],
            "A",
            "H",
            [
                t("A", 0, "B", 1, Dir::L),
                t("A", 1, "H", 1, Dir::R),
                t("B", 0, "C", 0, Dir::L),
                t("B", 1, "C", 0, Dir::L),
                t("C", 0, "C", 1, Dir::R),
                t("C", 1, "A", 1, Dir::R),
            ],
        )
        .unwrap()
    }

    /// Five states, so state codes need three bits.
    pub fn five_state() -> TuringMachine {
        TuringMachine::new(
            ["a", "b", "c", "d", "h"],
            "a",
            "h",
            [
                t("a", 0, "b", 1, Dir::R),
                t("a", 1, "c", 0, Dir::L),
                t("b", 0, "c", 1, Dir::R),
                t("b", 1, "d", 1, Dir::L),
                t("c", 0, "d", 1, Dir::L),
                t("c", 1, "a", 0, Dir::R),
                t("d", 0, "a", 1, Dir::L),
                t("d", 1, "h", 1, Dir::R),
            ],
        )
        .unwrap()
    }

    /// A random total machine over `working` non-halting states plus `h`,
    /// drawn from the 64-bit `seed`.
    pub fn random(seed: u64, working: usize) -> TuringMachine {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut states: Vec<String> = (0..working).map(|i| format!("s{i}")).collect();
        states.push("h".into());
        let mut trans = Vec::new();
        for q in &states[..working] {
            for read in [false, true] {
                let target = states[rng.gen_range(0..states.len())].clone();
                let write = rng.gen::<bool>();
                let dir = if rng.gen::<bool>() { Dir::L } else { Dir::R };
                trans.push((q.clone(), read, target, write, dir));
            }
        }
        TuringMachine::new(states, "s0", "h", trans).unwrap()
    }
}
