mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use proptest::prelude::*;
use rdlmix::formula::{alpha_equal, expand_shorthand, free_vars, normalize_diff, rename_apart, substitute};
use rdlmix::model::{extract_supporting_points, qi, IntegerGridModel, Verdict, ZoneKind};
use rdlmix::tm::corpus;
use rdlmix::{
    bounded_evaluate, build_appendix_model, classify, compile, compile_with, emit_smtlib, parse_formula, print_formula,
    simulate, translate, Atom, Formula, FragmentLabel, ReductionOptions, RelOp, Var,
};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn substitution_of_absent_variables_is_identity(f in any_formula(4)) {
        let map: BTreeMap<Var, Var> = [(Var::new("w"), Var::new("x"))].into();
        prop_assert_eq!(substitute(&f, &map), f);
    }

    #[test]
    fn shorthand_expansion_keeps_free_variables(f in any_formula(4)) {
        prop_assert_eq!(free_vars(&expand_shorthand(&f)), free_vars(&f));
    }

    #[test]
    fn diff_normalization_is_idempotent(c in -20i64..=20, op in 0usize..5) {
        let op = [RelOp::Lt, RelOp::Le, RelOp::Eq, RelOp::Ge, RelOp::Gt][op];
        let a = Atom::Diff { lhs: Var::new("x"), rhs: Var::new("y"), op, bound: c };
        let once = normalize_diff(&a).unwrap();
        prop_assert_eq!(normalize_diff(&once).unwrap(), once);
    }

    #[test]
    fn renaming_apart_preserves_alpha_class(f in any_formula(4)) {
        let g = rename_apart(&f);
        prop_assert!(alpha_equal(&f, &g));
        prop_assert!(alpha_equal(&g, &f));
        prop_assert_eq!(free_vars(&g), free_vars(&f));
    }

    #[test]
    fn print_then_parse_round_trips(f in any_formula(4)) {
        let text = print_formula(&f);
        let back = parse_formula(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, f);
    }

    #[test]
    fn smt_scripts_are_balanced_with_single_declarations(f in plain_formula(4)) {
        let script = emit_smtlib(&f, false).unwrap();
        let mut level = 0i64;
        for ch in script.chars() {
            match ch {
                '(' => level += 1,
                ')' => level -= 1,
                _ => {}
            }
            prop_assert!(level >= 0);
        }
        prop_assert_eq!(level, 0);
        let decls: Vec<&str> = script.lines().filter(|l| l.starts_with("(declare-")).collect();
        let unique: BTreeSet<&str> = decls.iter().copied().collect();
        prop_assert_eq!(unique.len(), decls.len());
        for v in free_vars(&f) {
            let line = format!("(declare-const {v} Real)");
            prop_assert!(script.contains(&line), "missing {}", line);
        }
    }

    #[test]
    fn parse_error_spans_stay_inside_input(s in "[()a-z<=> 0-9-]{0,24}") {
        if let Err(e) = parse_formula(&s) {
            prop_assert!(e.span.start <= e.span.end && e.span.end <= s.len(), "{:?} in {:?}", e.span, s);
        }
    }

    #[test]
    fn fragment_labels_nest(f in plain_formula(4)) {
        let r = classify(&f).unwrap();
        if r.contains(FragmentLabel::MsoOr) {
            prop_assert!(r.contains(FragmentLabel::MsoIro) && r.contains(FragmentLabel::RdlUup));
        }
        if r.contains(FragmentLabel::MsoIro) {
            prop_assert!(r.contains(FragmentLabel::Lmix));
        }
    }

    #[test]
    fn classification_ignores_bound_names(f in plain_formula(4)) {
        let g = rename_apart(&f);
        prop_assert_eq!(classify(&f).unwrap().best_labels, classify(&g).unwrap().best_labels);
    }

    #[test]
    fn translation_leaves_only_order_atoms(f in lmix_formula(5)) {
        let out = translate(&f).unwrap();
        let kept = out.combined.atoms().into_iter().any(|a| matches!(a, Atom::IsInt(_) | Atom::Diff { .. }));
        prop_assert!(!kept);
        prop_assert_eq!(free_vars(&out.combined), free_vars(&f));
        prop_assert!(!f.predicates().contains(&out.pint_name));
    }

    #[test]
    fn simulation_moves_one_cell_and_writes_one_bit(seed in 0u64..500, working in 1usize..5) {
        let m = corpus::random(seed, working);
        let trace = simulate(&m, 60).unwrap();
        prop_assert_eq!(&trace, &simulate(&m, 60).unwrap());
        for w in trace.configs.windows(2) {
            prop_assert_eq!((w[1].head - w[0].head).abs(), 1);
            let changed = w[0].tape.symmetric_difference(&w[1].tape).count();
            prop_assert!(changed <= 1);
            if changed == 1 {
                prop_assert!(w[0].tape.symmetric_difference(&w[1].tape).all(|c| *c == w[0].head));
            }
        }
    }

    #[test]
    fn compilation_is_deterministic(seed in 0u64..200, working in 1usize..4) {
        let m = corpus::random(seed, working);
        let a = compile(&m).unwrap();
        let b = compile(&m).unwrap();
        prop_assert!(alpha_equal(&a.halt, &b.halt));
        let anchors: BTreeSet<Var> = a.anchors.iter().cloned().collect();
        prop_assert_eq!(free_vars(&a.halt), anchors);
    }
}

#[test]
fn alpha_equality_is_an_equivalence() {
    let fs = sample(any_formula(4), 60);
    let renamed: Vec<Formula> = fs.iter().map(rename_apart).collect();
    for (f, g) in fs.iter().zip(&renamed) {
        assert!(alpha_equal(f, f));
        assert!(alpha_equal(f, g) && alpha_equal(g, f));
        let h = rename_apart(g);
        assert!(alpha_equal(g, &h) && alpha_equal(f, &h));
    }
    for (i, f) in fs.iter().enumerate() {
        for g in &fs[i + 1..] {
            assert_eq!(alpha_equal(f, g), alpha_equal(g, f));
        }
    }
}

#[test]
fn difference_chains_hold_exactly_at_distance() {
    for c in 0..4i64 {
        let f = Formula::and([Formula::is_int("x"), Formula::is_int("y"), Formula::diff("x", "y", RelOp::Eq, c)]);
        let out = translate(&f).unwrap();
        let model = IntegerGridModel { pred: out.pint_name.clone(), lo: -2, hi: 8 };
        let at = |x: i64| BTreeMap::from([(Var::new("x"), qi(x)), (Var::new("y"), qi(0))]);
        let hit = bounded_evaluate(&out.body, &model, &at(c)).unwrap();
        assert_eq!(hit.verdict, Verdict::Valid, "c={c}");
        let miss = bounded_evaluate(&out.body, &model, &at(c + 1)).unwrap();
        assert_eq!(miss.verdict, Verdict::Falsified, "c={c}");
    }
}

#[test]
fn closing_free_anchors_gives_a_sentence() {
    for (name, m) in machine_corpus() {
        let out = compile_with(&m, &ReductionOptions::default()).unwrap();
        let closed = Formula::exists(out.anchors.iter().cloned(), out.halt.clone());
        assert!(free_vars(&closed).is_empty(), "{name}");
        let script = emit_smtlib(&out.halt, true).unwrap();
        assert!(!script.contains("declare-const"), "{name}");
    }
}

#[test]
fn head_zone_supporting_points() {
    for depth in 4..=10 {
        let m = build_appendix_model(3, depth).unwrap();
        let pts = extract_supporting_points(&m, ZoneKind::Head, 0);
        assert_eq!(pts.len(), 2 * depth - 4, "depth {depth}");
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        for k in [-3i64, 1, 4] {
            let shifted = m.shifted(k);
            let moved = extract_supporting_points(&shifted, ZoneKind::Head, 0);
            let want: Vec<_> = pts.iter().map(|x| x + qi(k)).collect();
            assert_eq!(moved, want, "depth {depth} shift {k}");
        }
    }
}
