//! Bounded three-valued evaluation of formulas over a concrete predicate.
//!
//! Quantifiers range over finitely many representatives: the model's
//! breakpoints, the values already bound, those values shifted by every
//! difference constant, midpoints between neighbours, and one point beyond
//! each end. For order formulas over a predicate given by finitely many
//! intervals this is exhaustive inside the window. Difference atoms make it
//! a heuristic, so an exhausted search there yields `Unknown`, not `false`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use super::{qi, IntervalModel, ModelError, Q};
use crate::formula::{free_vars, Atom, Formula, Pred, Var};

/// A unary predicate over the reals, read through a bounded window.
pub trait PredicateModel {
    /// Truth of `p(x)`; `None` when unknown or outside the window.
    fn member(&self, p: &Pred, x: &Q) -> Option<bool>;
    fn window(&self) -> (Q, Q);
    /// Points where some predicate may change value.
    fn breakpoints(&self) -> Vec<Q>;
}

impl PredicateModel for IntervalModel {
    fn member(&self, _p: &Pred, x: &Q) -> Option<bool> {
        let (lo, hi) = PredicateModel::window(self);
        if *x < lo || *x > hi {
            return None;
        }
        IntervalModel::member(self, x)
    }

    fn window(&self) -> (Q, Q) {
        let lo = qi(self.origin - 1);
        let hi = qi(self.origin + 3 * self.periods.len().max(1) as i64);
        (lo, hi)
    }

    fn breakpoints(&self) -> Vec<Q> {
        let (lo, hi) = PredicateModel::window(self);
        let mut out: Vec<Q> = self.endpoints().into_iter().filter(|x| *x >= lo && *x <= hi).collect();
        out.push(lo);
        out.push(hi);
        out.extend(self.labels.keys().cloned());
        out.sort();
        out.dedup();
        out
    }
}

/// `pred` holds exactly at the integers of `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerGridModel {
    pub pred: Pred,
    pub lo: i64,
    pub hi: i64,
}

impl PredicateModel for IntegerGridModel {
    fn member(&self, p: &Pred, x: &Q) -> Option<bool> {
        if *p != self.pred || *x < qi(self.lo) || *x > qi(self.hi) {
            return None;
        }
        Some(x.is_integer())
    }

    fn window(&self) -> (Q, Q) {
        (qi(self.lo), qi(self.hi))
    }

    fn breakpoints(&self) -> Vec<Q> {
        (self.lo..=self.hi).map(qi).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Falsified,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub verdict: Verdict,
    /// Assignment to the outermost quantifier block that decided the
    /// verdict: an instance for `∃`, a counterexample for `∀`.
    pub witness: Option<BTreeMap<Var, Q>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum K {
    T,
    F,
    U,
}

impl K {
    fn not(self) -> K {
        match self {
            K::T => K::F,
            K::F => K::T,
            K::U => K::U,
        }
    }

    fn from_opt(b: Option<bool>) -> K {
        match b {
            Some(true) => K::T,
            Some(false) => K::F,
            None => K::U,
        }
    }
}

fn conjuncts(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::And(fs) => fs.iter().flat_map(conjuncts).collect(),
        Formula::Atom(Atom::True) => vec![],
        _ => vec![f.clone()],
    }
}

/// Conjuncts of `¬f`.
fn negated_conjuncts(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::Implies(a, c) => {
            let mut out = conjuncts(a);
            out.extend(negated_conjuncts(c));
            out
        }
        Formula::Or(fs) => fs.iter().flat_map(negated_conjuncts).collect(),
        Formula::Not(g) => conjuncts(g),
        _ => vec![Formula::not(f.clone())],
    }
}

fn has_diff(fs: &[Formula]) -> bool {
    fs.iter().any(|f| f.atoms().iter().any(|a| matches!(a, Atom::Diff { .. })))
}

type Env = BTreeMap<Var, Q>;

struct Evaluator<'a> {
    model: &'a dyn PredicateModel,
    base: Vec<Q>,
    shifts: Vec<Q>,
}

impl Evaluator<'_> {
    fn value<'e>(&self, env: &'e Env, v: &Var) -> Result<&'e Q, ModelError> {
        env.get(v).ok_or_else(|| ModelError::Unassigned(v.to_string()))
    }

    fn atom(&self, a: &Atom, env: &Env) -> Result<K, ModelError> {
        Ok(match a {
            Atom::True => K::T,
            Atom::False => K::F,
            Atom::Order { lhs, op, rhs } => K::from_opt(Some(op.holds(self.value(env, lhs)?, self.value(env, rhs)?))),
            Atom::Diff { lhs, rhs, op, bound } => {
                let d = self.value(env, lhs)? - self.value(env, rhs)?;
                K::from_opt(Some(op.holds(&d, &qi(*bound))))
            }
            Atom::Pred { pred, var } => K::from_opt(self.model.member(pred, self.value(env, var)?)),
            Atom::PredOffset { .. } | Atom::IsInt(_) => return Err(ModelError::UnsupportedAtom(a.to_string())),
        })
    }

    fn eval(&self, f: &Formula, env: &mut Env) -> Result<K, ModelError> {
        Ok(match f {
            Formula::Atom(a) => self.atom(a, env)?,
            Formula::Not(g) => self.eval(g, env)?.not(),
            Formula::And(fs) => {
                let mut acc = K::T;
                for g in fs {
                    match self.eval(g, env)? {
                        K::F => return Ok(K::F),
                        K::U => acc = K::U,
                        K::T => {}
                    }
                }
                acc
            }
            Formula::Or(fs) => {
                let mut acc = K::F;
                for g in fs {
                    match self.eval(g, env)? {
                        K::T => return Ok(K::T),
                        K::U => acc = K::U,
                        K::F => {}
                    }
                }
                acc
            }
            Formula::Implies(a, c) => match self.eval(a, env)? {
                K::F => K::T,
                ka => match (ka, self.eval(c, env)?) {
                    (_, K::T) => K::T,
                    (K::T, kc) => kc,
                    _ => K::U,
                },
            },
            Formula::Iff(a, b) => match (self.eval(a, env)?, self.eval(b, env)?) {
                (K::U, _) | (_, K::U) => K::U,
                (x, y) => K::from_opt(Some(x == y)),
            },
            Formula::Exists(vs, body) => self.exists(vs, &conjuncts(body), env)?.0,
            Formula::Forall(vs, body) => self.exists(vs, &negated_conjuncts(body), env)?.0.not(),
        })
    }

    /// Searches for values of `vars` making every goal true.
    fn exists(&self, vars: &[Var], goals: &[Formula], env: &mut Env) -> Result<(K, Option<Env>), ModelError> {
        // A goal is checked as soon as its last quantified variable is bound.
        let mut levels: Vec<Vec<&Formula>> = vec![Vec::new(); vars.len() + 1];
        for g in goals {
            let fv = free_vars(g);
            let level = vars.iter().rposition(|v| fv.contains(v)).map_or(0, |i| i + 1);
            levels[level].push(g);
        }
        let saved: Vec<Option<Q>> = vars.iter().map(|v| env.get(v).cloned()).collect();
        let result = self.search(vars, &levels, 0, false, env);
        for (v, old) in vars.iter().zip(saved) {
            match old {
                Some(x) => env.insert(v.clone(), x),
                None => env.remove(v),
            };
        }
        let (k, witness) = result?;
        if k == K::F && has_diff(goals) {
            return Ok((K::U, None));
        }
        Ok((k, witness))
    }

    fn search(
        &self,
        vars: &[Var],
        levels: &[Vec<&Formula>],
        depth: usize,
        mut unknown: bool,
        env: &mut Env,
    ) -> Result<(K, Option<Env>), ModelError> {
        for g in &levels[depth] {
            match self.eval(g, env)? {
                K::F => return Ok((K::F, None)),
                K::U => unknown = true,
                K::T => {}
            }
        }
        if depth == vars.len() {
            if unknown {
                return Ok((K::U, None));
            }
            let w = vars.iter().map(|v| (v.clone(), env[v].clone())).collect();
            return Ok((K::T, Some(w)));
        }
        let mut best = K::F;
        for x in self.candidates(env) {
            env.insert(vars[depth].clone(), x);
            let (k, w) = self.search(vars, levels, depth + 1, unknown, env)?;
            match k {
                K::T => return Ok((K::T, w)),
                K::U => best = K::U,
                K::F => {}
            }
        }
        Ok((best, None))
    }

    fn candidates(&self, env: &Env) -> Vec<Q> {
        let mut pts: BTreeSet<Q> = self.base.iter().cloned().collect();
        for x in env.values() {
            for s in &self.shifts {
                pts.insert(x + s);
            }
        }
        let sorted: Vec<Q> = pts.into_iter().collect();
        let mut out = Vec::with_capacity(2 * sorted.len() + 2);
        if let (Some(first), Some(last)) = (sorted.first(), sorted.last()) {
            out.push(first - Q::one());
            for w in sorted.windows(2) {
                out.push(w[0].clone());
                out.push((&w[0] + &w[1]) / qi(2));
            }
            out.push(last.clone());
            out.push(last + Q::one());
        }
        out
    }
}

/// Evaluates `f` under `env` with quantifiers restricted to representative
/// points of `model`.
pub fn bounded_evaluate(
    f: &Formula,
    model: &dyn PredicateModel,
    env: &BTreeMap<Var, Q>,
) -> Result<Evaluation, ModelError> {
    if let Some(v) = free_vars(f).into_iter().find(|v| !env.contains_key(v)) {
        return Err(ModelError::Unassigned(v.to_string()));
    }
    let mut consts: BTreeSet<i64> = [0].into();
    f.for_each_atom(&mut |a| {
        if let Atom::Diff { bound, .. } = a {
            consts.insert(*bound);
            consts.insert(-*bound);
        }
    });
    let ev = Evaluator { model, base: model.breakpoints(), shifts: consts.into_iter().map(qi).collect() };
    let mut env = env.clone();
    let (k, witness) = match f {
        Formula::Exists(vs, body) => ev.exists(vs, &conjuncts(body), &mut env)?,
        Formula::Forall(vs, body) => {
            let (k, w) = ev.exists(vs, &negated_conjuncts(body), &mut env)?;
            (k.not(), w)
        }
        _ => (ev.eval(f, &mut env)?, None),
    };
    let verdict = match k {
        K::T => Verdict::Valid,
        K::F => Verdict::Falsified,
        K::U => Verdict::Unknown,
    };
    Ok(Evaluation { verdict, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::RelOp;
    use crate::model::{build_appendix_model, q};
    use crate::reduction::rel_def;

    fn at(x: Q) -> BTreeMap<Var, Q> {
        [(Var::new("x"), x)].into()
    }

    #[test]
    fn supporting_point_formula() {
        let m = build_appendix_model(3, 8).unwrap();
        let rel = rel_def(&Var::new("x"), &Pred::new("P"));
        assert_eq!(bounded_evaluate(&rel, &m, &at(q(3, 2))).unwrap().verdict, Verdict::Valid);
        assert_eq!(bounded_evaluate(&rel, &m, &at(q(11, 10))).unwrap().verdict, Verdict::Falsified);
        assert_eq!(bounded_evaluate(&rel, &m, &at(qi(2))).unwrap().verdict, Verdict::Valid);
    }

    #[test]
    fn universal_gives_counterexample() {
        for n in [2, 3, 5] {
            let m = build_appendix_model(n, 6).unwrap();
            let f = Formula::forall([Var::new("x")], Formula::pred("P", "x"));
            let e = bounded_evaluate(&f, &m, &BTreeMap::new()).unwrap();
            assert_eq!(e.verdict, Verdict::Falsified);
            let w = &e.witness.unwrap()[&Var::new("x")];
            assert!(*w > qi(0) && *w < q(1, 2 * n as i64 - 2), "{w}");
        }
    }

    #[test]
    fn integer_grid() {
        let m = IntegerGridModel { pred: Pred::new("Z"), lo: -5, hi: 5 };
        let f = Formula::exists(
            [Var::new("x"), Var::new("y")],
            Formula::and([Formula::pred("Z", "x"), Formula::pred("Z", "y"), Formula::diff("x", "y", RelOp::Eq, 3)]),
        );
        let e = bounded_evaluate(&f, &m, &BTreeMap::new()).unwrap();
        assert_eq!(e.verdict, Verdict::Valid);
        let w = e.witness.unwrap();
        assert_eq!(&w[&Var::new("x")] - &w[&Var::new("y")], qi(3));
        let g = Formula::exists([Var::new("x")], Formula::and([Formula::pred("Z", "x"), Formula::lt("x", "x")]));
        assert_eq!(bounded_evaluate(&g, &m, &BTreeMap::new()).unwrap().verdict, Verdict::Falsified);
    }

    #[test]
    fn exhausted_difference_search_is_unknown() {
        let m = IntegerGridModel { pred: Pred::new("Z"), lo: 0, hi: 3 };
        let far = Formula::exists([Var::new("x"), Var::new("y")], Formula::diff("x", "y", RelOp::Gt, 100));
        assert_eq!(bounded_evaluate(&far, &m, &BTreeMap::new()).unwrap().verdict, Verdict::Valid);
        let f = Formula::exists(
            [Var::new("x"), Var::new("y")],
            Formula::and([Formula::diff("x", "y", RelOp::Gt, 1), Formula::diff("y", "x", RelOp::Gt, 1)]),
        );
        assert_eq!(bounded_evaluate(&f, &m, &BTreeMap::new()).unwrap().verdict, Verdict::Unknown);
    }

    #[test]
    fn errors() {
        let m = IntegerGridModel { pred: Pred::new("Z"), lo: 0, hi: 3 };
        assert!(matches!(
            bounded_evaluate(&Formula::pred("Z", "x"), &m, &BTreeMap::new()),
            Err(ModelError::Unassigned(_))
        ));
        assert!(matches!(bounded_evaluate(&Formula::is_int("x"), &m, &at(qi(1))), Err(ModelError::UnsupportedAtom(_))));
    }
}
