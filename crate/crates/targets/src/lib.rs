//! Distribution catalog, samplers, and the counts-to-target pipeline.
//!
//! This crate owns everything between "a distribution name with
//! parameters" and "a weighted log-frequency dataset ready for symbolic
//! search": exact log-PMFs for fourteen discrete families plus mixture
//! and zero-inflation wrappers, deterministic inverse-CDF samplers,
//! count tabulation with CSV interchange, and the Laplace-smoothing /
//! truncation / Delta-method-weighting pipeline.

pub mod bench;
pub mod counts;
pub mod family;
pub mod pipeline;
pub mod sampler;
pub mod spec;
pub mod zeta;

pub use bench::{benchmark_entries, benchmark_spec, fast_suite, full_suite, BenchEntry, Tier};
pub use counts::{CountTable, CountsError};
pub use family::{ln_beta, ln_choose, BaseFamily, InvalidSpec, Support};
pub use pipeline::{build_target, noiseless_target, EmptyFit, Provenance, TargetDataset};
pub use sampler::{sample, subseed};
pub use spec::{format_spec, parse_spec, true_logpmf, DistributionSpec, OutOfSupport, ParseSpecError};
pub use zeta::{harmonic, zeta};
