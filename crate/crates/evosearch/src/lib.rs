//! Evolutionary search over grammar-valid log-PMF expressions.
//!
//! Independent populations — one operator-cost profile each, assigned
//! round-robin — evolve bounded expression trees against a weighted
//! least-squares target, with periodic simplify-and-refit of elites, and
//! pool their best survivors into a single Pareto front over
//! (loss, complexity). Everything is deterministic given the master seed.

pub mod loss;
pub mod ops;
pub mod random;
pub mod refit;
pub mod search;

pub use loss::{program_loss, wls_loss};
pub use ops::{crossover, mutate, TreeFactory};
pub use random::{random_constant, OperatorSet};
pub use refit::refit_constants;
pub use search::{
    pareto_filter, search, search_with_progress, Candidate, ProgressRecord, SearchConfig,
    SearchError,
};
