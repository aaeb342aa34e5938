//! Exact counting of the grammar-constrained expression search space.
//!
//! The size of the hypothesis space is what makes symbolic regression over
//! log-PMFs tractable or not, so we count it exactly rather than estimate:
//! a dynamic program over (cost budget, syntactic role) with big-integer
//! arithmetic, an exhaustive enumeration oracle for cross-checking small
//! budgets, and a report generator for the constraint/profile cascade.
//!
//! Counts index trees by *syntax*: `x0 + 1` and `1 + x0` are distinct
//! unless merged commutativity is requested, and every constant is a
//! single abstract leaf symbol regardless of its eventual fitted value.

pub mod brute;
pub mod dp;
pub mod grammar;
pub mod report;

pub use brute::{enumerate_count, for_each_expression};
pub use dp::count_expressions;
pub use grammar::{
    Commutativity, Constraint, CountMode, CountingGrammar, InvalidGrammar, COUNTED_BINARY,
    COUNTED_UNARY,
};
pub use report::{format_magnitude, reduction_report, render_report, ReductionRow};
