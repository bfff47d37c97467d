//! Real-time logics with integer and real constraints: formulas, fragment
//! classification, the translation from mixed integer/real difference logic
//! into monadic second-order logic over the reals, the reduction from
//! Turing machine halting, and the interval models that witness it.

pub mod formula;
pub mod fragment;
pub mod lmix;
pub mod model;
pub mod reduction;
pub mod text;
pub mod tm;

pub use formula::{Atom, Formula, FormulaError, FreshVars, Pred, RelOp, Var};
pub use fragment::{classify, is_well_guarded, ClassificationReport, FragmentLabel, Violation};
pub use lmix::{translate, translate_atom, TranslationOutput};
pub use model::{
    bounded_evaluate, build_appendix_model, check_grid_axioms, check_halt_constraints, dump_model,
    intended_model_from_trace, parse_model, IntervalModel, ModelError,
};
pub use reduction::{compile, compile_with, ReductionOptions, ReductionOutput};
pub use text::{emit_smtlib, parse_formula, parse_tm, print_formula, print_tm, ParseError};
pub use tm::{simulate, Configuration, Dir, RunTrace, TmError, TuringMachine};
