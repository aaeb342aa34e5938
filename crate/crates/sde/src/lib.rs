//! `sde` — symbolic density estimation for discrete count data.
//!
//! Orchestration layer tying the pipeline together: configuration
//! resolution with documented precedence, the end-to-end fit
//! ([`run_fit`]), the recovery benchmark ([`run_bench`]), expression
//! evaluation ([`run_eval`]), and search-space counting
//! ([`run_count_space`]). The `sde` binary is a thin argument-parsing
//! shell over these functions.

pub mod bench;
pub mod config;
pub mod evaluate;
pub mod fit;
pub mod space;

pub use bench::{resolve_suite, run_bench, BenchError, BenchReport, BenchRow, BenchSettings};
pub use config::{
    parse_config_file, ConfigError, FitSettings, InputSource, Overrides, RunConfig,
};
pub use evaluate::{run_eval, EvalError, EvalOutcome, EvalRequest, ValiditySummary};
pub use fit::{plot_csv, run_fit, FitError};
pub use space::{run_count_space, CountError, CountRequest, MAX_BRUTE_BUDGET};
