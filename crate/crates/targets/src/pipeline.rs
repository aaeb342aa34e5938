//! The counts-to-target pipeline: Laplace smoothing, log transform,
//! support truncation, and Delta-method weights normalized by their
//! median.

use crate::counts::CountTable;
use crate::spec::DistributionSpec;
use thiserror::Error;

/// Smoothing/truncation settings recorded alongside a target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Provenance {
    pub alpha: f64,
    pub tau: f64,
    pub gamma: f64,
    pub m: u64,
    pub k: usize,
}

/// Weighted log-frequency fitting target on the retained support.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetDataset {
    /// Retained support points, ascending.
    pub xs: Vec<f64>,
    /// Smoothed log-frequency per retained point.
    pub y: Vec<f64>,
    /// Median-normalized weight per retained point.
    pub w: Vec<f64>,
    pub provenance: Provenance,
}

impl TargetDataset {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

/// Truncation removed every bin.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("support truncation at tau = {tau} removed all {k} bins (max scaled mass {max_scaled:.4})")]
pub struct EmptyFit {
    pub tau: f64,
    pub k: usize,
    pub max_scaled: f64,
}

/// Lower median: element at index ⌊(n−1)/2⌋ of the sorted values, so the
/// normalized median is exactly attained by a data point.
fn lower_median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted[(sorted.len() - 1) / 2]
}

/// Convert raw counts into a weighted log-frequency target.
///
/// Smoothed probabilities p̂(x) = (c(x)+α)/(M+αK) over the full grid;
/// y = ln p̂; retained support X_fit = {x : M·p̂(x) ≥ τ}; raw weights
/// w_raw = M·p̂/(1−p̂) (inverse Delta-method variance), normalized by
/// their lower median and raised to γ.
pub fn build_target(
    counts: &CountTable,
    alpha: f64,
    tau: f64,
    gamma: f64,
) -> Result<TargetDataset, EmptyFit> {
    assert!(alpha > 0.0, "alpha must be positive");
    assert!(tau >= 0.0, "tau must be nonnegative");
    assert!(gamma > 0.0, "gamma must be positive");

    let m = counts.total();
    let k = counts.grid_size();
    let mf = m as f64;
    let denom = mf + alpha * k as f64;

    let mut xs = Vec::new();
    let mut y = Vec::new();
    let mut w_raw = Vec::new();
    let mut max_scaled = f64::NEG_INFINITY;
    for (x, c) in counts.iter() {
        let p_hat = (c as f64 + alpha) / denom;
        let scaled = mf * p_hat;
        max_scaled = max_scaled.max(scaled);
        if scaled >= tau {
            xs.push(x as f64);
            y.push(p_hat.ln());
            w_raw.push(scaled / (1.0 - p_hat));
        }
    }
    if xs.is_empty() {
        return Err(EmptyFit { tau, k, max_scaled });
    }

    let med = lower_median(&w_raw);
    // A raw weight equal to the median normalizes to exactly 1; this also
    // covers the degenerate single-bin grid, where p̂ = 1 makes the sole
    // raw weight infinite.
    let w = w_raw
        .iter()
        .map(|&r| if r == med { 1.0 } else { (r / med).powf(gamma) })
        .collect();
    Ok(TargetDataset {
        xs,
        y,
        w,
        provenance: Provenance { alpha, tau, gamma, m, k },
    })
}

/// Noiseless analogue of `build_target` for self-consistency checks: y is
/// the exact log-PMF on the bins where the expected count M·p(x) clears
/// τ, with uniform weights.
pub fn noiseless_target(
    spec: &DistributionSpec,
    m: u64,
    tau: f64,
) -> Result<TargetDataset, EmptyFit> {
    let (x0, pmf) = crate::sampler::probability_table(spec);
    let mf = m as f64;
    let mut xs = Vec::new();
    let mut y = Vec::new();
    let mut max_scaled = f64::NEG_INFINITY;
    for (i, &p) in pmf.iter().enumerate() {
        let scaled = mf * p;
        max_scaled = max_scaled.max(scaled);
        if p > 0.0 && scaled >= tau {
            let x = x0 + i as i64;
            xs.push(x as f64);
            y.push(spec.logpmf(x));
        }
    }
    if xs.is_empty() {
        return Err(EmptyFit { tau, k: pmf.len(), max_scaled });
    }
    let w = vec![1.0; xs.len()];
    Ok(TargetDataset {
        xs,
        y,
        w,
        provenance: Provenance { alpha: 0.0, tau, gamma: 1.0, m, k: pmf.len() },
    })
}
