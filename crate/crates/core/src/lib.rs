//! Relational commutators on finite algebras.
//!
//! The crate computes the matrix set `M(R,S)`, the one-sided relational
//! commutator `[R,S|1]` and its congruence-generated variant, and the
//! relativized operator `K(R,S;T)`; checks the catalogued condition
//! families over enumerated or sampled relation tuples; and constructively
//! extracts witnessing term systems from free algebras, with an
//! independent bounded search as the cross-check.

pub mod algebra;
pub mod closure;
pub mod commutator;
pub mod conditions;
pub mod freealg;
pub mod presets;
pub mod rel;
pub mod relexpr;
pub mod term;

pub use algebra::{AlgebraError, FiniteAlgebra, Operation};
pub use closure::{close_subuniverse, Caps, Closure, Derivation, TupleSpace};
pub use commutator::{commutator_cg, commutator_one, k_operator, matrices, KVariant, QuadSet};
pub use conditions::{
    catalog, check_condition, find_conditions, run_suite, CheckStrategy, Condition,
    ConditionReport, SuiteReport, TheoremId, Verdict,
};
pub use freealg::{
    extract_terms_x22, extract_terms_x32, free_algebra, search_terms, verify_refutation,
    verify_scheme, ExtractOutcome, FreeAlgebra, FreeCaps, Refutation, SchemeId, SearchOutcome,
    TermChain,
};
pub use rel::{
    enumerate_relations, generated_relation, BinRel, CloseSpec, EnumBudget, GenMode, RelError,
    RelKind, RelationLiteral,
};
pub use relexpr::{eval_relexpr, parse_relexpr, CircRealization, EvalCtx, ExprError, RelExpr};
pub use term::{check_identity, eval_term, IdentityVerdict, TermError, TermExpr};
