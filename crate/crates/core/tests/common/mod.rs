#![allow(dead_code)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;
use rdlmix::tm::corpus;
use rdlmix::{Formula, RelOp, TuringMachine, Var};

const VARS: &[&str] = &["x", "y", "z", "u", "v"];
const PREDS: &[&str] = &["P", "Q"];

fn var() -> impl Strategy<Value = Var> {
    proptest::sample::select(VARS).prop_map(Var::new)
}

fn binders() -> impl Strategy<Value = Vec<Var>> {
    proptest::sample::subsequence(VARS, 1..=2).prop_map(|vs| vs.into_iter().map(Var::new).collect())
}

fn relop() -> impl Strategy<Value = RelOp> {
    prop_oneof![Just(RelOp::Lt), Just(RelOp::Le), Just(RelOp::Eq), Just(RelOp::Ge), Just(RelOp::Gt)]
}

fn pred_atom() -> impl Strategy<Value = Formula> {
    (proptest::sample::select(PREDS), var()).prop_map(|(p, x)| Formula::pred(p, x))
}

/// Atoms of the pure order fragment plus integer guards.
fn guard_free_leaf() -> BoxedStrategy<Formula> {
    prop_oneof![
        (var(), relop(), var()).prop_map(|(a, op, b)| Formula::order(a, op, b)),
        pred_atom(),
        var().prop_map(Formula::is_int),
        Just(Formula::tt()),
        Just(Formula::ff()),
    ]
    .boxed()
}

/// A difference atom with both integer guards in the same context.
fn guarded_diff() -> BoxedStrategy<Formula> {
    (var(), var(), relop(), -4i64..=4, any::<bool>())
        .prop_map(|(a, b, op, c, as_implication)| {
            let guard = [Formula::is_int(a.clone()), Formula::is_int(b.clone())];
            let d = Formula::diff(a, b, op, c);
            if as_implication {
                Formula::implies(Formula::and(guard), d)
            } else {
                Formula::and(guard.into_iter().chain([d]))
            }
        })
        .boxed()
}

fn compound(sub: BoxedStrategy<Formula>) -> BoxedStrategy<Formula> {
    prop_oneof![
        sub.clone().prop_map(Formula::not),
        proptest::collection::vec(sub.clone(), 2..=3).prop_map(Formula::and),
        proptest::collection::vec(sub.clone(), 2..=3).prop_map(Formula::or),
        (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
        (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
        (binders(), sub.clone()).prop_map(|(vs, b)| Formula::exists(vs, b)),
        (binders(), sub).prop_map(|(vs, b)| Formula::forall(vs, b)),
    ]
    .boxed()
}

/// Well-guarded formulas of depth at most `depth` (at least 3).
pub fn lmix_formula(depth: usize) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![3 => guard_free_leaf(), 2 => guarded_diff()].boxed();
    if depth <= 3 {
        return leaf;
    }
    prop_oneof![1 => leaf, 3 => compound(lmix_formula(depth - 1))].boxed()
}

/// Arbitrary formulas, including unguarded differences and shorthand
/// atoms, of depth at most `depth`.
pub fn any_formula(depth: usize) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        4 => guard_free_leaf(),
        2 => (var(), var(), relop(), -5i64..=5).prop_map(|(a, b, op, c)| Formula::diff(a, b, op, c)),
        1 => (proptest::sample::select(PREDS), var(), -3i64..=3).prop_map(|(p, x, k)| Formula::pred_offset(p, x, k)),
    ]
    .boxed();
    if depth <= 1 {
        return leaf;
    }
    prop_oneof![1 => leaf, 2 => compound(any_formula(depth - 1))].boxed()
}

/// Formulas without shorthand atoms.
pub fn plain_formula(depth: usize) -> BoxedStrategy<Formula> {
    any_formula(depth).prop_map(|f| rdlmix::formula::expand_shorthand(&f)).boxed()
}

/// `n` values drawn deterministically from `s`.
pub fn sample<S: Strategy>(s: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..n).map(|_| s.new_tree(&mut runner).expect("strategy generates").current()).collect()
}

/// Machines used across integration tests: name, machine.
pub fn machine_corpus() -> Vec<(&'static str, TuringMachine)> {
    vec![
        ("M2", corpus::m2()),
        ("ML", corpus::looping()),
        ("binary counter", corpus::binary_counter()),
        ("halts in 17", corpus::halts_in_17()),
        ("random seed 1", corpus::random(1, 4)),
        ("random seed 17", corpus::random(17, 4)),
        ("five state", corpus::five_state()),
    ]
}

pub const ISOLATED_POINTS: &str = "(forall (x) (exists (y z) (and (< y x) (< x z) \
     (forall (t) (=> (and (< y t) (< t z) (P t)) (= t x))))))";

pub const BOUNDED_GAP: &str = "(forall (x) (exists (y) (and (> (- y x) 0) (< (- y x) 3) (P y))))";

pub const BETWEEN_INTEGERS: &str =
    "(forall (x y) (=> (and (< x y) (int x) (int y)) (exists (v) (and (< x v) (< v y) (P v)))))";

pub const ODD_EVEN: &str = "(and \
     (forall (x y) (=> (and (int x) (int y) (= (- y x) 2)) (iff (P x) (P y)))) \
     (exists (x y) (and (int x) (int y) (P x) (not (P y)))) \
     (forall (z) (=> (not (int z)) (P z))))";
