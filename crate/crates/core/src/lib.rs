//! Matching μ-logic kernel and finite-model checker.
//!
//! * [`signature`]: sorts, many-sorted symbols and variables.
//! * [`kernel`]: well-sorted, well-scoped patterns and derived connectives.
//! * [`subst`]: weakening and capture-avoiding substitution.
//! * [`model`]: finite models and the lifted symbol interpretation.
//! * [`semantics`]: valuations and pattern evaluation with least fixpoints.
//! * [`theory`]: axioms and model satisfaction.
//! * [`frontend`]: text formats, diagnostics and pretty-printing.
//!
//! The `testgen` feature adds random generators of signatures, models and
//! patterns.

pub mod frontend;
pub mod kernel;
pub mod model;
pub mod semantics;
pub mod signature;
pub mod subst;
#[cfg(feature = "testgen")]
pub mod testgen;
pub mod theory;

pub use frontend::{parse_model, parse_pattern, parse_theory, print_pattern, Diagnostic, Parsed, Severity, Span};
pub use kernel::{Binder, Context, KernelError, Pattern, PatternKind};
pub use model::{CarrierElem, CarrierSet, FiniteModel, ModelBuilder, ModelError};
pub use semantics::{eval, EvalError, EvalOptions, Evaluator, LfpMode, Valuation};
pub use signature::{ElemVar, SetVar, Signature, SignatureError, Sort, Symbol, SymbolDecl};
pub use subst::{SplitPoint, SubstError};
pub use theory::{check_axiom, satisfies, Axiom, CheckOptions, SatisfactionReport, Theory, TheoryError, Verdict};
