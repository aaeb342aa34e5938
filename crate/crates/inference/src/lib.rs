//! Post-search inference: from a pool of candidate expressions to a single
//! interpreted model.
//!
//! The pipeline is: screen candidates for probabilistic validity
//! ([`validity_filter`]), rank survivors simplest-first ([`rank`]), read the
//! family off the winner's canonical structure ([`identify_family`] /
//! [`extract_mixture`]), walk the initializers onto the data
//! ([`refine_params`]) and assemble the whole story into a [`FitReport`].

mod identify;
mod mixture;
mod refine;
mod report;
mod validity;

pub use identify::identify_family;
pub use mixture::{
    extract_mixture, BinomialMixtureView, ExtractedBranch, MixtureExtraction, NotMixture,
    ZeroInflationView,
};
pub use refine::{refine_params, regularized_rmse, rmse, RefineError, RefinedFit, DEFAULT_GRID};
pub use report::{
    build_fit_report, interpret, FitReport, Interpretation, MixtureComponentReport,
};
pub use validity::{
    capped_operator_counts, diagnose, filter_with_relaxation, rank, validity_filter, Diagnostics,
    EmptySurvivors, FilterOutcome, ValidityConfig, MAX_RELAXATION_LEVEL,
};
