//! Validity screening and lexicographic ranking of search candidates.
//!
//! A candidate survives when it reconstructs the target well (loss), behaves
//! like a log-PMF (masses near-normalized, no bin above probability one) and
//! stays structurally tame (per-operator occurrence caps). Survivors are then
//! ranked by complexity first and loss second, so the selected model is the
//! simplest expression that explains the data.

use evosearch::{wls_loss, Candidate};
use exprcore::{BinaryOp, Expr, UnaryOp};
use targets::TargetDataset;
use thiserror::Error;

/// Operators subject to occurrence caps, in reporting order.
const CAPPED_UNARY: [UnaryOp; 6] = [
    UnaryOp::LogF,
    UnaryOp::Log,
    UnaryOp::Exp,
    UnaryOp::Abs,
    UnaryOp::Sin,
    UnaryOp::Cos,
];
const CAPPED_BINARY: [BinaryOp; 3] = [BinaryOp::LogC, BinaryOp::LogB, BinaryOp::Mul];

/// Thresholds applied by [`validity_filter`].
#[derive(Clone, Debug)]
pub struct ValidityConfig {
    /// Maximum admissible weighted reconstruction loss.
    pub loss_threshold: f64,
    /// Tolerance for `|sum_x e^f(x) - 1|` over the fit support.
    pub normalization_tol: f64,
    /// Tolerance for `max_x f(x)`; a log-mass above this implies a bin with
    /// probability meaningfully greater than one.
    pub logmass_tol: f64,
    /// Occurrence cap shared by every capped operator.
    pub operator_cap: usize,
}

impl Default for ValidityConfig {
    fn default() -> Self {
        ValidityConfig {
            loss_threshold: 1e-3,
            normalization_tol: 1e-3,
            logmass_tol: 1e-3,
            operator_cap: 3,
        }
    }
}

impl ValidityConfig {
    /// Panics if any tolerance is non-positive; thresholds are meaningless
    /// otherwise.
    pub fn validate(&self) {
        assert!(self.loss_threshold > 0.0, "loss threshold must be positive");
        assert!(
            self.normalization_tol > 0.0,
            "normalization tolerance must be positive"
        );
        assert!(self.logmass_tol > 0.0, "log-mass tolerance must be positive");
    }

    /// The same configuration with the loss threshold scaled by `factor`.
    pub fn with_loss_scaled(&self, factor: f64) -> ValidityConfig {
        ValidityConfig {
            loss_threshold: self.loss_threshold * factor,
            ..self.clone()
        }
    }
}

/// Per-candidate evaluation of every validity check, kept for rejected
/// candidates as well so a report can explain why the pool thinned out.
#[derive(Clone, Debug)]
pub struct Diagnostics {
    /// Weighted reconstruction loss, recomputed from the expression.
    pub loss: f64,
    /// `sum_x e^f(x) - 1` over the fit support (signed).
    pub normalization_residual: f64,
    /// Largest log-mass over the fit support.
    pub max_logmass: f64,
    /// Occurrence counts for every capped operator, in fixed order.
    pub operator_counts: Vec<(&'static str, usize)>,
    /// Whether all four checks passed.
    pub passed: bool,
    /// Human-readable labels of the failed checks, empty when `passed`.
    pub failures: Vec<String>,
}

/// No candidate survived the validity screen.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("no candidate passed the validity checks")]
pub struct EmptySurvivors;

/// Occurrence counts of every capped operator, in fixed reporting order.
pub fn capped_operator_counts(expr: &Expr) -> Vec<(&'static str, usize)> {
    let counts = expr.operator_counts();
    let mut out = Vec::with_capacity(CAPPED_UNARY.len() + CAPPED_BINARY.len());
    for op in CAPPED_UNARY {
        out.push((op.name(), counts.unary_count(op)));
    }
    for op in CAPPED_BINARY {
        out.push((op.name(), counts.binary_count(op)));
    }
    out
}

/// Evaluates every check against one expression without thresholding away the
/// raw numbers.
pub fn diagnose(expr: &Expr, target: &TargetDataset, vcfg: &ValidityConfig) -> Diagnostics {
    vcfg.validate();
    let loss = wls_loss(expr, target);

    let program = exprcore::Program::compile(expr);
    let mut stack = Vec::new();
    let mut mass = 0.0f64;
    let mut max_logmass = f64::NEG_INFINITY;
    let mut domain_error = false;
    for &x in &target.xs {
        match program.eval_with(x, &mut stack) {
            Some(f) if f.is_finite() => {
                mass += f.exp();
                max_logmass = max_logmass.max(f);
            }
            _ => {
                domain_error = true;
                break;
            }
        }
    }
    let normalization_residual = if domain_error { f64::INFINITY } else { mass - 1.0 };
    if domain_error {
        max_logmass = f64::INFINITY;
    }

    let operator_counts = capped_operator_counts(expr);

    let mut failures = Vec::new();
    if !(loss < vcfg.loss_threshold) {
        failures.push(format!("loss {loss:.3e} >= {:.3e}", vcfg.loss_threshold));
    }
    if !(normalization_residual.abs() < vcfg.normalization_tol) {
        failures.push(format!(
            "normalization residual {normalization_residual:.3e} outside ±{:.3e}",
            vcfg.normalization_tol
        ));
    }
    if !(max_logmass < vcfg.logmass_tol) {
        failures.push(format!(
            "max log-mass {max_logmass:.3e} >= {:.3e}",
            vcfg.logmass_tol
        ));
    }
    for &(name, n) in &operator_counts {
        if n > vcfg.operator_cap {
            failures.push(format!("operator {name} appears {n} > {}", vcfg.operator_cap));
        }
    }

    Diagnostics {
        loss,
        normalization_residual,
        max_logmass,
        operator_counts,
        passed: failures.is_empty(),
        failures,
    }
}

/// Screens the pool, returning the surviving candidates together with the
/// diagnostics of every input candidate in pool order.
pub fn validity_filter(
    cands: &[Candidate],
    target: &TargetDataset,
    vcfg: &ValidityConfig,
) -> (Vec<Candidate>, Vec<Diagnostics>) {
    let diagnostics: Vec<Diagnostics> = cands
        .iter()
        .map(|c| diagnose(&c.expr, target, vcfg))
        .collect();
    let survivors = cands
        .iter()
        .zip(&diagnostics)
        .filter(|(_, d)| d.passed)
        .map(|(c, _)| c.clone())
        .collect();
    (survivors, diagnostics)
}

/// Result of [`filter_with_relaxation`]: the survivors, the diagnostics at the
/// accepted relaxation level, and how many doublings were needed.
#[derive(Clone, Debug)]
pub struct FilterOutcome {
    pub survivors: Vec<Candidate>,
    pub diagnostics: Vec<Diagnostics>,
    /// 0 means the base threshold worked; level `k` means the loss threshold
    /// was multiplied by `2^k`. Capped at 7 (a 128× relaxation).
    pub relaxation_level: u32,
}

/// Maximum number of loss-threshold doublings before giving up.
pub const MAX_RELAXATION_LEVEL: u32 = 7;

/// Applies [`validity_filter`], doubling the loss threshold (only) until a
/// survivor appears. Real count data can sit well above the noiseless loss
/// floor, so reconstruction quality is the one check that bends; the
/// probabilistic checks stay fixed.
pub fn filter_with_relaxation(
    cands: &[Candidate],
    target: &TargetDataset,
    vcfg: &ValidityConfig,
) -> Result<FilterOutcome, EmptySurvivors> {
    for level in 0..=MAX_RELAXATION_LEVEL {
        let scaled = vcfg.with_loss_scaled(f64::powi(2.0, level as i32));
        let (survivors, diagnostics) = validity_filter(cands, target, &scaled);
        if !survivors.is_empty() {
            return Ok(FilterOutcome {
                survivors,
                diagnostics,
                relaxation_level: level,
            });
        }
    }
    Err(EmptySurvivors)
}

/// Orders survivors by complexity first, loss second; the head of the list is
/// the selected model. The sort is stable, so candidates tied on both keys
/// keep their pool order.
pub fn rank(survivors: &[Candidate]) -> Result<Vec<Candidate>, EmptySurvivors> {
    if survivors.is_empty() {
        return Err(EmptySurvivors);
    }
    let mut ordered = survivors.to_vec();
    ordered.sort_by(|a, b| {
        a.complexity
            .cmp(&b.complexity)
            .then(a.loss.total_cmp(&b.loss))
    });
    Ok(ordered)
}
