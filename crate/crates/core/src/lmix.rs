//! Translation from guarded mixed difference logic into pure order logic
//! with unary predicates.
//!
//! Integer guards become a fresh predicate whose models are order-isomorphic
//! to the integers; a difference atom `x - y ⋈ c` becomes a chain of `c`
//! successor steps along that predicate.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::{normalize_diff, Atom, Formula, FreshVars, Pred, Var};
use crate::fragment::{classify, ClassifyError, FragmentLabel, Violation};

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationOutput {
    pub axioms: Formula,
    pub body: Formula,
    pub combined: Formula,
    pub pint_name: Pred,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("shorthand atom {0} must be expanded first")]
    Shorthand(Atom),
    #[error("formula is not in LMIX: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    NotLmix(Vec<Violation>),
}

impl From<ClassifyError> for TranslateError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Shorthand(a) => TranslateError::Shorthand(a),
        }
    }
}

fn between(lo: &Var, mid: &Var, hi: &Var) -> Formula {
    Formula::and([Formula::lt(lo.clone(), mid.clone()), Formula::lt(mid.clone(), hi.clone())])
}

/// The three axioms: every element is isolated, and every real has a unique
/// successor and a unique predecessor in the predicate.
pub fn pint_axioms(pint: &Pred) -> Formula {
    let (x, y, z, t) = (Var::new("x"), Var::new("y"), Var::new("z"), Var::new("t"));
    let p = |v: &Var| Formula::pred(pint.clone(), v.clone());
    let isolated = Formula::forall(
        [x.clone()],
        Formula::exists(
            [y.clone(), z.clone()],
            Formula::and([
                between(&y, &x, &z),
                Formula::forall(
                    [t.clone()],
                    Formula::implies(Formula::and([between(&y, &t, &z), p(&t)]), Formula::eq(t.clone(), x.clone())),
                ),
            ]),
        ),
    );
    let successor = Formula::forall(
        [x.clone()],
        Formula::exists(
            [y.clone()],
            Formula::and([
                Formula::lt(x.clone(), y.clone()),
                p(&y),
                Formula::forall([t.clone()], Formula::implies(between(&x, &t, &y), Formula::not(p(&t)))),
            ]),
        ),
    );
    let predecessor = Formula::forall(
        [x.clone()],
        Formula::exists(
            [y.clone()],
            Formula::and([
                Formula::lt(y.clone(), x.clone()),
                p(&y),
                Formula::forall([t.clone()], Formula::implies(between(&y, &t, &x), Formula::not(p(&t)))),
            ]),
        ),
    );
    Formula::and([isolated, successor, predecessor])
}

/// `x` is the successor of `y` along `pint`; the inner bound variable is
/// drawn from `fresh`.
pub fn succ(x: &Var, y: &Var, pint: &Pred, fresh: &mut FreshVars) -> Formula {
    let z = fresh.fresh();
    Formula::and([
        Formula::pred(pint.clone(), x.clone()),
        Formula::pred(pint.clone(), y.clone()),
        Formula::lt(y.clone(), x.clone()),
        Formula::forall([z.clone()], Formula::implies(between(y, &z, x), Formula::not(Formula::pred(pint.clone(), z)))),
    ])
}

/// Translates one atom. Fresh names restart at `_k0` for every atom and
/// avoid the atom's own variables.
pub fn translate_atom(a: &Atom, pint: &Pred) -> Result<Formula, TranslateError> {
    match a {
        Atom::IsInt(x) => Ok(Formula::pred(pint.clone(), x.clone())),
        Atom::Diff { .. } => {
            let Atom::Diff { lhs, rhs, op, bound } = normalize_diff(a).expect("difference atom") else {
                unreachable!("normalization keeps the atom shape")
            };
            let c = usize::try_from(bound).expect("normalized bound is non-negative");
            let mut fresh = FreshVars::avoiding([&lhs, &rhs]);
            let zs = fresh.fresh_n(c + 1);
            let mut parts = Vec::with_capacity(c + 2);
            parts.push(Formula::eq(rhs.clone(), zs[0].clone()));
            for i in 0..c {
                parts.push(succ(&zs[i + 1], &zs[i], pint, &mut fresh));
            }
            parts.push(Formula::order(lhs, op, zs[c].clone()));
            Ok(Formula::exists(zs, Formula::And(parts)))
        }
        Atom::PredOffset { .. } => Err(TranslateError::Shorthand(a.clone())),
        _ => Ok(Formula::Atom(a.clone())),
    }
}

/// A predicate name not occurring in `f`.
pub fn choose_pint(f: &Formula) -> Pred {
    let taken: BTreeSet<Pred> = f.predicates();
    let base = Pred::new("Pint");
    if !taken.contains(&base) {
        return base;
    }
    (1..).map(|i| Pred::new(format!("Pint{i}"))).find(|p| !taken.contains(p)).expect("unbounded supply of names")
}

/// Translates a guarded formula; the result lies in the pure order fragment.
pub fn translate(f: &Formula) -> Result<TranslationOutput, TranslateError> {
    let report = classify(f)?;
    if !report.contains(FragmentLabel::Lmix) {
        let vs = report.violations.into_iter().filter(|v| v.fragment == FragmentLabel::Lmix).collect();
        return Err(TranslateError::NotLmix(vs));
    }
    let pint = choose_pint(f);
    let body = f.try_map_atoms(&mut |a| translate_atom(a, &pint))?;
    let axioms = pint_axioms(&pint);
    let combined = Formula::and([axioms.clone(), body.clone()]);
    Ok(TranslationOutput { axioms, body, combined, pint_name: pint })
}
