//! Core expression machinery for symbolic log-PMF search.
//!
//! An [`Expr`] is a tree over one integer-valued variable `x0`, floating
//! constants, and a fixed operator alphabet chosen so that common discrete
//! log-likelihoods (Poisson, binomial, zeta, beta compounds, mixtures, ...)
//! have short exact representations.  The crate provides:
//!
//! * safe evaluation with explicit domain errors ([`eval`], [`eval_opt`]),
//!   plus a flat compiled form ([`Program`]) for tight fitting loops;
//! * the structural grammar used to keep search inside the "statistically
//!   meaningful" subset ([`check_grammar`], [`GrammarConfig`]);
//! * per-operator complexity profiles ([`Profile`], [`complexity`]);
//! * algebraic cleanup ([`simplify`]) and a canonical ordered form
//!   ([`canonicalize`]);
//! * decomposition of a candidate into additive terms with recognisable
//!   shapes ([`decompose`], [`Term`]), the substrate for family
//!   identification;
//! * a round-trippable text format ([`parse`], [`format_expr`]).

pub mod canonical;
pub mod decompose;
pub mod eval;
pub mod expr;
pub mod gamma;
pub mod grammar;
pub mod parser;
pub mod profile;
pub mod simplify;

pub use canonical::canonicalize;
pub use decompose::{decompose, fingerprint, Branch, BranchKind, Decomposition, Term};
pub use eval::{eval, eval_opt, DomainError, Program, LOG_ZERO};
pub use expr::{BinaryOp, Expr, OperatorCounts, UnaryOp};
pub use gamma::{ln_factorial, ln_gamma};
pub use grammar::{check_grammar, AffineMode, GrammarConfig, GrammarRule, GrammarViolation};
pub use parser::{format_expr, parse, ParseError};
pub use profile::{complexity, Profile, UnknownOperator};
pub use simplify::simplify;
