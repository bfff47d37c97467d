//! Formula language: order and difference constraints, unary predicates and
//! integer guards under the usual connectives and first-order quantifiers.
//!
//! Terms are variables only. `x ⋈ c` bounds are not atoms; the parser
//! desugars them into difference atoms against a user-named anchor.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Prefix reserved for generator-owned variables.
pub const FRESH_PREFIX: &str = "_k";

/// Comparison operator shared by order and difference atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl RelOp {
    pub const ALL: [RelOp; 5] = [RelOp::Lt, RelOp::Le, RelOp::Eq, RelOp::Ge, RelOp::Gt];

    /// Mirror image: `a op b` iff `b op.flip() a`.
    pub fn flip(self) -> RelOp {
        match self {
            RelOp::Lt => RelOp::Gt,
            RelOp::Le => RelOp::Ge,
            RelOp::Eq => RelOp::Eq,
            RelOp::Ge => RelOp::Le,
            RelOp::Gt => RelOp::Lt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Eq => "=",
            RelOp::Ge => ">=",
            RelOp::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<RelOp> {
        RelOp::ALL.into_iter().find(|op| op.symbol() == s)
    }

    pub fn holds<T: PartialOrd + ?Sized>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            RelOp::Lt => lhs < rhs,
            RelOp::Le => lhs <= rhs,
            RelOp::Eq => lhs == rhs,
            RelOp::Ge => lhs >= rhs,
            RelOp::Gt => lhs > rhs,
        }
    }
}

impl fmt::Display for RelOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

macro_rules! name_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                let name = name.into();
                debug_assert!(!name.is_empty(), "empty identifier");
                $name(name)
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name::new(s)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

name_type!(
    /// A variable, always interpreted over the reals.
    Var
);
name_type!(
    /// An uninterpreted unary predicate symbol.
    Pred
);

impl Var {
    /// Whether the name belongs to the fresh-variable namespace.
    pub fn is_generated(&self) -> bool {
        self.fresh_index().is_some()
    }

    fn fresh_index(&self) -> Option<u64> {
        self.0.strip_prefix(FRESH_PREFIX)?.parse().ok()
    }
}

/// Atomic formulas.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `lhs op rhs`
    Order {
        lhs: Var,
        op: RelOp,
        rhs: Var,
    },
    /// `lhs - rhs op bound`
    Diff {
        lhs: Var,
        rhs: Var,
        op: RelOp,
        bound: i64,
    },
    /// `pred(var)`
    Pred {
        pred: Pred,
        var: Var,
    },
    /// Shorthand `pred(var + offset)`; removed by [`expand_shorthand`].
    PredOffset {
        pred: Pred,
        var: Var,
        offset: i64,
    },
    /// `var ∈ ℤ`
    IsInt(Var),
    True,
    False,
}

impl Atom {
    pub fn vars(&self) -> Vec<&Var> {
        match self {
            Atom::Order { lhs, rhs, .. } | Atom::Diff { lhs, rhs, .. } => vec![lhs, rhs],
            Atom::Pred { var, .. } | Atom::PredOffset { var, .. } | Atom::IsInt(var) => vec![var],
            Atom::True | Atom::False => vec![],
        }
    }

    fn map_vars(&self, f: &mut impl FnMut(&Var) -> Var) -> Atom {
        match self {
            Atom::Order { lhs, op, rhs } => Atom::Order { lhs: f(lhs), op: *op, rhs: f(rhs) },
            Atom::Diff { lhs, rhs, op, bound } => Atom::Diff { lhs: f(lhs), rhs: f(rhs), op: *op, bound: *bound },
            Atom::Pred { pred, var } => Atom::Pred { pred: pred.clone(), var: f(var) },
            Atom::PredOffset { pred, var, offset } => {
                Atom::PredOffset { pred: pred.clone(), var: f(var), offset: *offset }
            }
            Atom::IsInt(v) => Atom::IsInt(f(v)),
            Atom::True => Atom::True,
            Atom::False => Atom::False,
        }
    }
}

/// First-order formula tree.
///
/// Negation, implication and bi-implication are first-class; nothing in the
/// crate requires negation normal form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Vec<Var>, Box<Formula>),
    Forall(Vec<Var>, Box<Formula>),
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Self {
        Formula::Atom(a)
    }
}

/// Quantifier kind, used by generic traversals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Formula {
    pub fn tt() -> Formula {
        Formula::Atom(Atom::True)
    }

    pub fn ff() -> Formula {
        Formula::Atom(Atom::False)
    }

    pub fn order(lhs: impl Into<Var>, op: RelOp, rhs: impl Into<Var>) -> Formula {
        Formula::Atom(Atom::Order { lhs: lhs.into(), op, rhs: rhs.into() })
    }

    pub fn lt(lhs: impl Into<Var>, rhs: impl Into<Var>) -> Formula {
        Formula::order(lhs, RelOp::Lt, rhs)
    }

    pub fn eq(lhs: impl Into<Var>, rhs: impl Into<Var>) -> Formula {
        Formula::order(lhs, RelOp::Eq, rhs)
    }

    pub fn diff(lhs: impl Into<Var>, rhs: impl Into<Var>, op: RelOp, bound: i64) -> Formula {
        Formula::Atom(Atom::Diff { lhs: lhs.into(), rhs: rhs.into(), op, bound })
    }

    pub fn pred(pred: impl Into<Pred>, var: impl Into<Var>) -> Formula {
        Formula::Atom(Atom::Pred { pred: pred.into(), var: var.into() })
    }

    pub fn pred_offset(pred: impl Into<Pred>, var: impl Into<Var>, offset: i64) -> Formula {
        Formula::Atom(Atom::PredOffset { pred: pred.into(), var: var.into(), offset })
    }

    pub fn is_int(var: impl Into<Var>) -> Formula {
        Formula::Atom(Atom::IsInt(var.into()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::And(fs.into_iter().collect())
    }

    pub fn or(fs: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::Or(fs.into_iter().collect())
    }

    /// Conjunction that collapses the empty and singleton cases.
    pub fn conj(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut fs: Vec<Formula> = fs.into_iter().collect();
        match fs.len() {
            0 => Formula::tt(),
            1 => fs.pop().unwrap(),
            _ => Formula::And(fs),
        }
    }

    /// Disjunction that collapses the empty and singleton cases.
    pub fn disj(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut fs: Vec<Formula> = fs.into_iter().collect();
        match fs.len() {
            0 => Formula::ff(),
            1 => fs.pop().unwrap(),
            _ => Formula::Or(fs),
        }
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// `∃ vars. body`; an empty binder list yields `body` unchanged.
    pub fn exists(vars: impl IntoIterator<Item = Var>, body: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().collect();
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    /// `∀ vars. body`; an empty binder list yields `body` unchanged.
    pub fn forall(vars: impl IntoIterator<Item = Var>, body: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().collect();
        if vars.is_empty() {
            body
        } else {
            Formula::Forall(vars, Box::new(body))
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// Immediate subformulas, in order.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) => vec![],
            Formula::Not(f) => vec![f],
            Formula::And(fs) | Formula::Or(fs) => fs.iter().collect(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => vec![a, b],
            Formula::Exists(_, f) | Formula::Forall(_, f) => vec![f],
        }
    }

    /// Pre-order visit of every atom occurrence.
    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            _ => self.children().into_iter().for_each(|c| c.for_each_atom(f)),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.for_each_atom(&mut |a| out.push(a));
        out
    }

    /// Predicate names occurring anywhere in the formula.
    pub fn predicates(&self) -> BTreeSet<Pred> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| match a {
            Atom::Pred { pred, .. } | Atom::PredOffset { pred, .. } => {
                out.insert(pred.clone());
            }
            _ => {}
        });
        out
    }

    /// Every variable name occurring free, bound, or in a binder list.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_all_vars(&mut out);
        out
    }

    fn collect_all_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom(a) => out.extend(a.vars().into_iter().cloned()),
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                out.extend(vs.iter().cloned());
                body.collect_all_vars(out);
            }
            _ => self.children().into_iter().for_each(|c| c.collect_all_vars(out)),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Longest root-to-leaf path, counting nodes.
    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(Formula::depth).max().unwrap_or(0)
    }

    /// Rebuilds the tree bottom-up, replacing every atom by `f(atom)`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
            Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(g.map_atoms(f))),
            Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(g.map_atoms(f))),
        }
    }

    /// Same as [`Formula::map_atoms`] with a fallible callback.
    pub fn try_map_atoms<E>(&self, f: &mut impl FnMut(&Atom) -> Result<Formula, E>) -> Result<Formula, E> {
        Ok(match self {
            Formula::Atom(a) => f(a)?,
            Formula::Not(g) => Formula::not(g.try_map_atoms(f)?),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.try_map_atoms(f)).collect::<Result<_, _>>()?),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.try_map_atoms(f)).collect::<Result<_, _>>()?),
            Formula::Implies(a, b) => Formula::implies(a.try_map_atoms(f)?, b.try_map_atoms(f)?),
            Formula::Iff(a, b) => Formula::iff(a.try_map_atoms(f)?, b.try_map_atoms(f)?),
            Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(g.try_map_atoms(f)?)),
            Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(g.try_map_atoms(f)?)),
        })
    }
}

/// Errors raised by the binding-aware operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("expected a difference atom, found {0:?}")]
    NotADiff(Atom),
    #[error("duplicate variable `{0}` in binder list")]
    DuplicateBinder(Var),
    #[error("binder list is empty")]
    EmptyBinder,
}

/// Generator of `_k<n>` names that avoids a set of taken names.
#[derive(Debug, Clone, Default)]
pub struct FreshVars {
    next: u64,
    taken: BTreeSet<Var>,
}

impl FreshVars {
    pub fn new() -> Self {
        Self::default()
    }

    /// A generator whose names never collide with `taken`.
    pub fn avoiding<'a>(taken: impl IntoIterator<Item = &'a Var>) -> Self {
        FreshVars { next: 0, taken: taken.into_iter().cloned().collect() }
    }

    pub fn avoid(&mut self, v: &Var) {
        self.taken.insert(v.clone());
    }

    pub fn fresh(&mut self) -> Var {
        loop {
            let v = Var::new(format!("{FRESH_PREFIX}{}", self.next));
            self.next += 1;
            if !self.taken.contains(&v) {
                self.taken.insert(v.clone());
                return v;
            }
        }
    }

    pub fn fresh_n(&mut self, n: usize) -> Vec<Var> {
        (0..n).map(|_| self.fresh()).collect()
    }
}

/// Variables with at least one free occurrence.
pub fn free_vars(f: &Formula) -> BTreeSet<Var> {
    fn go(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match f {
            Formula::Atom(a) => {
                for v in a.vars() {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                let mark = bound.len();
                bound.extend(vs.iter().cloned());
                go(body, bound, out);
                bound.truncate(mark);
            }
            _ => f.children().into_iter().for_each(|c| go(c, bound, out)),
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

/// Checks that no binder list repeats a variable and none is empty.
pub fn check_binders(f: &Formula) -> Result<(), FormulaError> {
    match f {
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            if vs.is_empty() {
                return Err(FormulaError::EmptyBinder);
            }
            let mut seen = BTreeSet::new();
            for v in vs {
                if !seen.insert(v) {
                    return Err(FormulaError::DuplicateBinder(v.clone()));
                }
            }
            check_binders(body)
        }
        _ => f.children().into_iter().try_for_each(check_binders),
    }
}

/// Capture-avoiding substitution of free occurrences.
///
/// A bound variable is renamed to a fresh `_k` name only when it would
/// capture the image of a free variable of its body.
pub fn substitute(f: &Formula, map: &BTreeMap<Var, Var>) -> Formula {
    let mut taken = f.all_vars();
    taken.extend(map.keys().cloned());
    taken.extend(map.values().cloned());
    let mut fresh = FreshVars::avoiding(taken.iter());
    subst_with(f, map, &mut fresh)
}

fn subst_with(f: &Formula, map: &BTreeMap<Var, Var>, fresh: &mut FreshVars) -> Formula {
    if map.is_empty() {
        return f.clone();
    }
    match f {
        Formula::Atom(a) => Formula::Atom(a.map_vars(&mut |v| map.get(v).unwrap_or(v).clone())),
        Formula::Not(g) => Formula::not(subst_with(g, map, fresh)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| subst_with(g, map, fresh)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| subst_with(g, map, fresh)).collect()),
        Formula::Implies(a, b) => Formula::implies(subst_with(a, map, fresh), subst_with(b, map, fresh)),
        Formula::Iff(a, b) => Formula::iff(subst_with(a, map, fresh), subst_with(b, map, fresh)),
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let body_free = free_vars(body);
            let mut inner: BTreeMap<Var, Var> = map
                .iter()
                .filter(|(k, _)| !vs.contains(k) && body_free.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            let images: BTreeSet<&Var> = inner.values().collect();
            let clashing: Vec<&Var> = vs.iter().filter(|v| images.contains(v)).collect();
            let mut renames = BTreeMap::new();
            for v in clashing {
                renames.insert(v.clone(), fresh.fresh());
            }
            let new_vs: Vec<Var> = vs.iter().map(|v| renames.get(v).unwrap_or(v).clone()).collect();
            inner.extend(renames);
            let new_body = subst_with(body, &inner, fresh);
            match f {
                Formula::Exists(..) => Formula::Exists(new_vs, Box::new(new_body)),
                _ => Formula::Forall(new_vs, Box::new(new_body)),
            }
        }
    }
}

/// Renames every bound variable to a distinct fresh name so that no
/// variable is bound twice and no bound name coincides with a free one.
pub fn rename_apart(f: &Formula) -> Formula {
    let mut fresh = FreshVars::avoiding(f.all_vars().iter());
    rename_apart_with(f, &BTreeMap::new(), &mut fresh)
}

fn rename_apart_with(f: &Formula, env: &BTreeMap<Var, Var>, fresh: &mut FreshVars) -> Formula {
    match f {
        Formula::Atom(a) => Formula::Atom(a.map_vars(&mut |v| env.get(v).unwrap_or(v).clone())),
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let mut env = env.clone();
            let new_vs: Vec<Var> = vs
                .iter()
                .map(|v| {
                    let n = fresh.fresh();
                    env.insert(v.clone(), n.clone());
                    n
                })
                .collect();
            let body = Box::new(rename_apart_with(body, &env, fresh));
            match f {
                Formula::Exists(..) => Formula::Exists(new_vs, body),
                _ => Formula::Forall(new_vs, body),
            }
        }
        Formula::Not(g) => Formula::not(rename_apart_with(g, env, fresh)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rename_apart_with(g, env, fresh)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rename_apart_with(g, env, fresh)).collect()),
        Formula::Implies(a, b) => Formula::implies(rename_apart_with(a, env, fresh), rename_apart_with(b, env, fresh)),
        Formula::Iff(a, b) => Formula::iff(rename_apart_with(a, env, fresh), rename_apart_with(b, env, fresh)),
    }
}

/// Replaces every `P(x+c)` by `∃y. y - x = c ∧ P(y)` with a fresh `y`.
pub fn expand_shorthand(f: &Formula) -> Formula {
    let mut fresh = FreshVars::avoiding(f.all_vars().iter());
    f.map_atoms(&mut |a| match a {
        Atom::PredOffset { pred, var, offset } => {
            let y = fresh.fresh();
            Formula::exists(
                [y.clone()],
                Formula::And(vec![
                    Formula::diff(y.clone(), var.clone(), RelOp::Eq, *offset),
                    Formula::pred(pred.clone(), y),
                ]),
            )
        }
        other => Formula::Atom(other.clone()),
    })
}

/// Rewrites `x - y ⋈ c` with `c < 0` as `y - x ⋈' -c`; atoms with `c ≥ 0`
/// are returned unchanged.
pub fn normalize_diff(a: &Atom) -> Result<Atom, FormulaError> {
    match a {
        Atom::Diff { lhs, rhs, op, bound } if *bound < 0 => {
            Ok(Atom::Diff { lhs: rhs.clone(), rhs: lhs.clone(), op: op.flip(), bound: -*bound })
        }
        Atom::Diff { .. } => Ok(a.clone()),
        other => Err(FormulaError::NotADiff(other.clone())),
    }
}

/// Structural equality up to consistent renaming of bound variables.
pub fn alpha_equal(f: &Formula, g: &Formula) -> bool {
    // Each side maps a bound name to the depth of its binder.
    fn lookup(env: &[(Var, usize)], v: &Var) -> Option<usize> {
        env.iter().rev().find(|(n, _)| n == v).map(|(_, d)| *d)
    }
    fn var_eq(le: &[(Var, usize)], re: &[(Var, usize)], a: &Var, b: &Var) -> bool {
        match (lookup(le, a), lookup(re, b)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => a == b,
            _ => false,
        }
    }
    fn go(f: &Formula, g: &Formula, le: &mut Vec<(Var, usize)>, re: &mut Vec<(Var, usize)>, depth: usize) -> bool {
        match (f, g) {
            (Formula::Atom(a), Formula::Atom(b)) => {
                let (va, vb) = (a.vars(), b.vars());
                let shape_a = a.map_vars(&mut |_| Var::new("_"));
                let shape_b = b.map_vars(&mut |_| Var::new("_"));
                shape_a == shape_b && va.len() == vb.len() && va.iter().zip(&vb).all(|(x, y)| var_eq(le, re, x, y))
            }
            (Formula::Not(a), Formula::Not(b)) => go(a, b, le, re, depth),
            (Formula::And(xs), Formula::And(ys)) | (Formula::Or(xs), Formula::Or(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, le, re, depth))
            }
            (Formula::Implies(a1, b1), Formula::Implies(a2, b2)) | (Formula::Iff(a1, b1), Formula::Iff(a2, b2)) => {
                go(a1, a2, le, re, depth) && go(b1, b2, le, re, depth)
            }
            (Formula::Exists(v1, b1), Formula::Exists(v2, b2)) | (Formula::Forall(v1, b1), Formula::Forall(v2, b2)) => {
                if v1.len() != v2.len() {
                    return false;
                }
                let (lm, rm) = (le.len(), re.len());
                for (i, (x, y)) in v1.iter().zip(v2).enumerate() {
                    le.push((x.clone(), depth + i));
                    re.push((y.clone(), depth + i));
                }
                let ok = go(b1, b2, le, re, depth + v1.len());
                le.truncate(lm);
                re.truncate(rm);
                ok
            }
            _ => false,
        }
    }
    go(f, g, &mut Vec::new(), &mut Vec::new(), 0)
}
