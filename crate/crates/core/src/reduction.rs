//! Compiles a Turing machine into a single-predicate difference-logic
//! formula that is satisfiable iff the machine halts from the blank tape.
//!
//! The predicate `P` lays out a grid of *supporting points* (points with a
//! true interval on the left and a false interval on the right). Each period
//! `[3k, 3k+3)` of the grid holds one configuration: `N` state-bit points in
//! `[3k, 3k+1]`, a ℤ-ordered head zone in `(3k+1, 3k+2)` and a ℤ-ordered tape
//! zone in `(3k+2, 3k+3)`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formula::{Formula, FreshVars, Pred, RelOp, Var};
use crate::tm::{validate_tm, Dir, TmError, TuringMachine};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("grid needs at least 2 state bits, got {0}")]
    TooFewBits(usize),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error(transparent)]
    Machine(#[from] TmError),
}

/// Number of bits per state code: `max(2, ⌈log₂ |Q|⌉)`.
pub fn state_bits(num_states: usize) -> usize {
    let log = if num_states <= 1 { 0 } else { (usize::BITS - (num_states - 1).leading_zeros()) as usize };
    log.max(2)
}

/// Big-endian binary of each state's declaration index.
pub fn state_codes(m: &TuringMachine) -> BTreeMap<String, Vec<bool>> {
    let n = state_bits(m.states.len());
    m.states
        .iter()
        .enumerate()
        .map(|(i, q)| (q.clone(), (0..n).map(|k| (i >> (n - 1 - k)) & 1 == 1).collect()))
        .collect()
}

#[derive(Debug, Clone)]
pub struct ReductionOptions {
    /// Unmark the previous head cell (`¬P(z+3)`) instead of the printed
    /// `¬P(z)`, which contradicts its own antecedent.
    pub head_fix: bool,
    pub pred: Pred,
    pub anchors: [Var; 4],
}

impl Default for ReductionOptions {
    fn default() -> Self {
        ReductionOptions {
            head_fix: true,
            pred: Pred::new("P"),
            anchors: [Var::new("a0"), Var::new("a1"), Var::new("a2"), Var::new("a3")],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionParts {
    pub paxioms: Formula,
    pub start: Formula,
    pub step: Formula,
    pub end: Formula,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOutput {
    pub halt: Formula,
    pub parts: ReductionParts,
    pub anchors: [Var; 4],
    pub pred_name: Pred,
    pub n_bits: usize,
    pub codes: BTreeMap<String, Vec<bool>>,
}

fn lt(a: &Var, b: &Var) -> Formula {
    Formula::lt(a.clone(), b.clone())
}

fn between(lo: &Var, mid: &Var, hi: &Var) -> Formula {
    Formula::and([lt(lo, mid), lt(mid, hi)])
}

/// Formula builder sharing one fresh-name supply, so every bound variable
/// in a compiled formula is distinct.
#[derive(Debug, Clone)]
pub struct GridBuilder {
    pub pred: Pred,
    pub anchors: [Var; 4],
    pub n_bits: usize,
    pub head_fix: bool,
    fresh: FreshVars,
}

impl GridBuilder {
    pub fn new(n_bits: usize, opts: &ReductionOptions) -> Result<Self, ReductionError> {
        if n_bits < 2 {
            return Err(ReductionError::TooFewBits(n_bits));
        }
        Ok(GridBuilder {
            pred: opts.pred.clone(),
            anchors: opts.anchors.clone(),
            n_bits,
            head_fix: opts.head_fix,
            fresh: FreshVars::avoiding(opts.anchors.iter()),
        })
    }

    /// Marks `v` as taken so no bound variable reuses it.
    pub fn reserve(&mut self, v: &Var) {
        self.fresh.avoid(v);
    }

    fn fresh(&mut self) -> Var {
        self.fresh.fresh()
    }

    fn p(&self, v: &Var) -> Formula {
        Formula::pred(self.pred.clone(), v.clone())
    }

    fn literal(&self, v: &Var, value: bool) -> Formula {
        if value {
            self.p(v)
        } else {
            Formula::not(self.p(v))
        }
    }

    /// `∃u. u - z = k ∧ (¬)P(u)`.
    fn offset_literal(&mut self, z: &Var, k: i64, value: bool) -> Formula {
        let u = self.fresh();
        let lit = self.literal(&u, value);
        Formula::exists([u.clone()], Formula::and([Formula::diff(u, z.clone(), RelOp::Eq, k), lit]))
    }

    /// `∃u. u - x = k ∧ Rel(u)`.
    fn offset_rel(&mut self, x: &Var, k: i64) -> Formula {
        let u = self.fresh();
        let rel = self.rel(&u);
        Formula::exists([u.clone()], Formula::and([Formula::diff(u, x.clone(), RelOp::Eq, k), rel]))
    }

    /// `x` is a supporting point: `P` holds on an open interval to its left
    /// and fails on one to its right.
    pub fn rel(&mut self, x: &Var) -> Formula {
        let (y1, z1, y2, z2) = (self.fresh(), self.fresh(), self.fresh(), self.fresh());
        Formula::and([
            Formula::exists(
                [y1.clone()],
                Formula::and([
                    lt(&y1, x),
                    Formula::forall([z1.clone()], Formula::implies(between(&y1, &z1, x), self.p(&z1))),
                ]),
            ),
            Formula::exists(
                [y2.clone()],
                Formula::and([
                    lt(x, &y2),
                    Formula::forall([z2.clone()], Formula::implies(between(x, &z2, &y2), Formula::not(self.p(&z2)))),
                ]),
            ),
        ])
    }

    /// `x` is the next supporting point after `y`.
    pub fn succ_sup(&mut self, x: &Var, y: &Var) -> Formula {
        let z = self.fresh();
        let (rx, ry, rz) = (self.rel(x), self.rel(y), self.rel(&z));
        Formula::and([
            lt(y, x),
            rx,
            ry,
            Formula::forall([z.clone()], Formula::implies(between(y, &z, x), Formula::not(rz))),
        ])
    }

    pub fn pred_sup(&mut self, x: &Var, y: &Var) -> Formula {
        self.succ_sup(y, x)
    }

    pub fn axiom1(&mut self) -> Formula {
        let [a0, a1, a2, a3] = self.anchors.clone();
        Formula::and([
            Formula::diff(a1.clone(), a0, RelOp::Eq, 1),
            Formula::diff(a2.clone(), a1, RelOp::Eq, 1),
            Formula::diff(a3, a2, RelOp::Eq, 1),
        ])
    }

    pub fn axiom2(&mut self) -> Formula {
        let [a0, a1, a2, _] = self.anchors.clone();
        Formula::and([self.rel(&a0), self.rel(&a1), self.rel(&a2)])
    }

    pub fn axiom3(&mut self) -> Formula {
        let x = self.fresh();
        Formula::forall([x.clone()], Formula::implies(lt(&x, &self.anchors[0]), self.p(&x)))
    }

    /// Exactly `N - 2` supporting points strictly between anchors 0 and 1.
    pub fn axiom4(&mut self) -> Formula {
        let [a0, a1, _, _] = self.anchors.clone();
        let xs = self.fresh.fresh_n(self.n_bits);
        let n = xs.len();
        let mut parts = vec![Formula::eq(xs[0].clone(), a0.clone()), Formula::eq(xs[n - 1].clone(), a1.clone())];
        for i in 0..n - 1 {
            parts.push(Formula::order(a0.clone(), RelOp::Le, xs[i].clone()));
            parts.push(lt(&xs[i], &a1));
            parts.push(self.succ_sup(&xs[i + 1], &xs[i]));
        }
        Formula::exists(xs, Formula::And(parts))
    }

    /// Supporting points in `(1, 2)` are ℤ-ordered inside some `(b1, b2)`.
    /// The witnesses `b1, b2` scope over all four clauses.
    pub fn axiom5(&mut self) -> Formula {
        let [_, a1, a2, _] = self.anchors.clone();
        let (b1, b2) = (self.fresh(), self.fresh());
        let bounds = Formula::and([lt(&a1, &b1), lt(&b1, &b2), lt(&b2, &a2)]);

        let (x, y, z) = (self.fresh(), self.fresh(), self.fresh());
        let (ry, rz) = (self.rel(&y), self.rel(&z));
        let successor = Formula::forall(
            [x.clone()],
            Formula::implies(
                between(&b1, &x, &b2),
                Formula::exists(
                    [y.clone()],
                    Formula::and([
                        lt(&x, &y),
                        lt(&y, &b2),
                        ry,
                        Formula::forall([z.clone()], Formula::implies(between(&x, &z, &y), Formula::not(rz))),
                    ]),
                ),
            ),
        );

        let (x, y, z) = (self.fresh(), self.fresh(), self.fresh());
        let (ry, rz) = (self.rel(&y), self.rel(&z));
        let predecessor = Formula::forall(
            [x.clone()],
            Formula::implies(
                between(&b1, &x, &b2),
                Formula::exists(
                    [y.clone()],
                    Formula::and([
                        lt(&b1, &y),
                        lt(&y, &x),
                        ry,
                        Formula::forall([z.clone()], Formula::implies(between(&y, &z, &x), Formula::not(rz))),
                    ]),
                ),
            ),
        );

        let x = self.fresh();
        let rx = self.rel(&x);
        let confinement = Formula::forall(
            [x.clone()],
            Formula::implies(Formula::and([lt(&a1, &x), lt(&x, &a2), rx]), between(&b1, &x, &b2)),
        );
        Formula::exists([b1, b2], Formula::and([bounds, successor, predecessor, confinement]))
    }

    pub fn axiom6(&mut self) -> Formula {
        let [_, a1, a2, _] = self.anchors.clone();
        let x = self.fresh();
        let rx = self.rel(&x);
        let shifted = self.offset_rel(&x, 1);
        Formula::forall([x.clone()], Formula::implies(between(&a1, &x, &a2), Formula::iff(rx, shifted)))
    }

    pub fn axiom7(&mut self) -> Formula {
        let a0 = self.anchors[0].clone();
        let x = self.fresh();
        let rx = self.rel(&x);
        let shifted = self.offset_rel(&x, 3);
        Formula::forall([x.clone()], Formula::implies(Formula::order(x, RelOp::Ge, a0), Formula::iff(rx, shifted)))
    }

    pub fn paxioms(&mut self) -> Formula {
        Formula::and([
            self.axiom1(),
            self.axiom2(),
            self.axiom3(),
            self.axiom4(),
            self.axiom5(),
            self.axiom6(),
            self.axiom7(),
        ])
    }

    /// No supporting point accumulates on `x` from the left.
    pub fn left_cvg(&mut self, x: &Var) -> Formula {
        let (z, y) = (self.fresh(), self.fresh());
        let (rz, ry) = (self.rel(&z), self.rel(&y));
        Formula::forall(
            [z.clone()],
            Formula::implies(
                Formula::and([lt(&z, x), rz]),
                Formula::exists([y.clone()], Formula::and([lt(&z, &y), lt(&y, x), ry])),
            ),
        )
    }

    /// `x` has a next supporting point.
    pub fn r_succ(&mut self, x: &Var) -> Formula {
        let (z, y) = (self.fresh(), self.fresh());
        let (rz, ry) = (self.rel(&z), self.rel(&y));
        Formula::exists(
            [z.clone()],
            Formula::and([
                lt(x, &z),
                rz,
                Formula::forall([y.clone()], Formula::implies(between(x, &y, &z), Formula::not(ry))),
            ]),
        )
    }

    /// `x` starts a configuration.
    pub fn start_conf(&mut self, x: &Var) -> Formula {
        Formula::and([self.rel(x), self.left_cvg(x), self.r_succ(x)])
    }

    /// The state code `bits` is written on `x` and its `N - 1` successors.
    pub fn state_code(&mut self, bits: &[bool], x: &Var) -> Formula {
        let sc = self.start_conf(x);
        let ys = self.fresh.fresh_n(self.n_bits);
        let mut parts = vec![Formula::eq(x.clone(), ys[0].clone())];
        for i in 0..ys.len() - 1 {
            parts.push(self.succ_sup(&ys[i + 1], &ys[i]));
        }
        for (y, &b) in ys.iter().zip(bits) {
            parts.push(self.literal(y, b));
        }
        Formula::and([sc, Formula::exists(ys, Formula::And(parts))])
    }

    /// `z` lies strictly between `x + 1` and `x + 2`, written as
    /// `∃a. a - x = 1 ∧ a < z ∧ z - a < 1`.
    pub fn head_zone(&mut self, z: &Var, x: &Var) -> Formula {
        let a = self.fresh();
        Formula::exists(
            [a.clone()],
            Formula::and([
                Formula::diff(a.clone(), x.clone(), RelOp::Eq, 1),
                lt(&a, z),
                Formula::diff(z.clone(), a, RelOp::Lt, 1),
            ]),
        )
    }

    fn marked_head(&mut self, z: &Var, x: &Var, marked: bool) -> Formula {
        let hz = self.head_zone(z, x);
        let rz = self.rel(z);
        Formula::and([hz, rz, self.literal(z, marked)])
    }

    /// The head cell reads `read` and gets `write`; other cells are copied.
    pub fn tape(&mut self, read: bool, write: bool, x: &Var) -> Formula {
        let z = self.fresh();
        let ante = self.marked_head(&z, x, true);
        let now = self.offset_literal(&z, 1, read);
        let next = self.offset_literal(&z, 4, write);
        let at_head = Formula::forall([z.clone()], Formula::implies(ante, Formula::and([now, next])));

        let z = self.fresh();
        let ante = self.marked_head(&z, x, false);
        let now = self.offset_literal(&z, 1, true);
        let next = self.offset_literal(&z, 4, true);
        let elsewhere = Formula::forall([z.clone()], Formula::implies(ante, Formula::iff(now, next)));
        Formula::and([at_head, elsewhere])
    }

    /// The head moves one supporting point in `dir` in the next period.
    pub fn head(&mut self, dir: Dir, x: &Var) -> Formula {
        let z = self.fresh();
        let ante = self.marked_head(&z, x, true);
        let (v, w) = (self.fresh(), self.fresh());
        let moved = match dir {
            Dir::R => self.succ_sup(&v, &w),
            Dir::L => self.pred_sup(&v, &w),
        };
        let target = Formula::exists([w.clone()], Formula::and([Formula::diff(w, z.clone(), RelOp::Eq, 3), moved]));
        let old = if self.head_fix { self.offset_literal(&z, 3, false) } else { Formula::not(self.p(&z)) };
        let cons = Formula::exists([v.clone()], Formula::and([target, self.p(&v), old]));
        Formula::forall([z.clone()], Formula::implies(ante, cons))
    }
}

/// Builds the halting formula and its parts for a machine.
#[derive(Debug, Clone)]
pub struct Reduction<'m> {
    pub machine: &'m TuringMachine,
    pub codes: BTreeMap<String, Vec<bool>>,
    pub grid: GridBuilder,
}

impl<'m> Reduction<'m> {
    pub fn new(m: &'m TuringMachine, opts: &ReductionOptions) -> Result<Self, ReductionError> {
        validate_tm(m).map_err(TmError::Invalid)?;
        let grid = GridBuilder::new(state_bits(m.states.len()), opts)?;
        Ok(Reduction { machine: m, codes: state_codes(m), grid })
    }

    pub fn state_formula(&mut self, q: &str, x: &Var) -> Result<Formula, ReductionError> {
        let bits = self.codes.get(q).ok_or_else(|| ReductionError::UnknownState(q.to_string()))?.clone();
        Ok(self.grid.state_code(&bits, x))
    }

    fn state(&mut self, q: &str, x: &Var) -> Formula {
        self.state_formula(q, x).expect("state declared in a validated machine")
    }

    pub fn start(&mut self) -> Formula {
        let [a0, a1, a2, a3] = self.grid.anchors.clone();
        let init = self.machine.init.clone();
        let st = self.state(&init, &a0);

        let (y, x) = (self.grid.fresh(), self.grid.fresh());
        let (ry, rx) = (self.grid.rel(&y), self.grid.rel(&x));
        let single_head = Formula::exists(
            [y.clone()],
            Formula::and([
                between(&a1, &y, &a2),
                ry,
                self.grid.p(&y),
                Formula::forall(
                    [x.clone()],
                    Formula::implies(
                        Formula::and([between(&a1, &x, &a2), rx, self.grid.p(&x)]),
                        Formula::eq(x.clone(), y.clone()),
                    ),
                ),
            ]),
        );

        let y = self.grid.fresh();
        let ry = self.grid.rel(&y);
        let blank = Formula::forall(
            [y.clone()],
            Formula::implies(Formula::and([between(&a2, &y, &a3), ry]), Formula::not(self.grid.p(&y))),
        );
        Formula::and([st, single_head, blank])
    }

    /// No configuration before `y` is halting.
    pub fn not_ended(&mut self, y: &Var) -> Formula {
        let x = self.grid.fresh();
        let sc = self.grid.start_conf(&x);
        let halt = self.machine.halt.clone();
        let fin = self.state(&halt, &x);
        Formula::forall([x.clone()], Formula::implies(Formula::and([lt(&x, y), sc]), Formula::not(fin)))
    }

    pub fn transition(&mut self, x: &Var, y: &Var) -> Formula {
        let rows: Vec<(String, bool, String, bool, Dir)> = self
            .machine
            .transitions()
            .map(|(q, read, a)| (q.to_string(), read, a.next.clone(), a.write, a.dir))
            .collect();
        let mut disjuncts = Vec::with_capacity(rows.len());
        for (q, read, next, write, dir) in rows {
            let sx = self.state(&q, x);
            let sy = self.state(&next, y);
            let tape = self.grid.tape(read, write, x);
            let head = self.grid.head(dir, x);
            disjuncts.push(Formula::and([sx, sy, tape, head]));
        }
        Formula::Or(disjuncts)
    }

    pub fn step(&mut self) -> Formula {
        let a0 = self.grid.anchors[0].clone();
        let y = self.grid.fresh();
        let sc = self.grid.start_conf(&y);
        let ne = self.not_ended(&y);
        let x = self.grid.fresh();
        let tr = self.transition(&x, &y);
        Formula::forall(
            [y.clone()],
            Formula::implies(
                Formula::and([Formula::order(y.clone(), RelOp::Gt, a0), sc, ne]),
                Formula::exists([x.clone()], Formula::and([Formula::diff(y, x, RelOp::Eq, 3), tr])),
            ),
        )
    }

    pub fn end(&mut self) -> Formula {
        let x = self.grid.fresh();
        let halt = self.machine.halt.clone();
        let st = self.state(&halt, &x);
        Formula::exists([x], st)
    }

    pub fn finish(mut self) -> ReductionOutput {
        let start = self.start();
        let step = self.step();
        let end = self.end();
        let paxioms = self.grid.paxioms();
        let halt = Formula::and([start.clone(), step.clone(), end.clone(), paxioms.clone()]);
        ReductionOutput {
            halt,
            parts: ReductionParts { paxioms, start, step, end },
            anchors: self.grid.anchors.clone(),
            pred_name: self.grid.pred.clone(),
            n_bits: self.grid.n_bits,
            codes: self.codes,
        }
    }
}

pub fn compile(m: &TuringMachine) -> Result<ReductionOutput, ReductionError> {
    compile_with(m, &ReductionOptions::default())
}

pub fn compile_with(m: &TuringMachine, opts: &ReductionOptions) -> Result<ReductionOutput, ReductionError> {
    Ok(Reduction::new(m, opts)?.finish())
}

fn builder_for(p: &Pred, n_bits: usize, free: &[&Var]) -> GridBuilder {
    let opts = ReductionOptions { pred: p.clone(), ..ReductionOptions::default() };
    let mut b = GridBuilder::new(n_bits, &opts).expect("two bits");
    for v in free {
        b.reserve(v);
    }
    b
}

/// Standalone supporting-point formula over `p`.
pub fn rel_def(x: &Var, p: &Pred) -> Formula {
    builder_for(p, 2, &[x]).rel(x)
}

pub fn succ_sup_def(x: &Var, y: &Var, p: &Pred) -> Formula {
    builder_for(p, 2, &[x, y]).succ_sup(x, y)
}

pub fn pred_sup_def(x: &Var, y: &Var, p: &Pred) -> Formula {
    builder_for(p, 2, &[x, y]).pred_sup(x, y)
}

/// The seven grid axioms for `n` state bits over the given anchors.
pub fn paxioms(n: usize, anchors: &[Var; 4], p: &Pred) -> Result<Formula, ReductionError> {
    let opts = ReductionOptions { pred: p.clone(), anchors: anchors.clone(), ..ReductionOptions::default() };
    Ok(GridBuilder::new(n, &opts)?.paxioms())
}
