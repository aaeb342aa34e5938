//! Sampler ↔ PMF agreement: chi-square goodness-of-fit of tabulated
//! draws against exp(true_logpmf) for every benchmark entry.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use targets::{benchmark_entries, sample, subseed, DistributionSpec};

const M: u64 = 100_000;
const MIN_EXPECTED: f64 = 5.0;

/// Chi-square p-value of one sampled table against the spec's pmf.
/// Support points with expected count ≥ 5 stand alone; everything else
/// (including mass beyond the tabulated window) pools into one bin.
fn gof_pvalue(spec: &DistributionSpec, seed: u64) -> f64 {
    let table = sample(spec, M, seed);

    // Expected counts over a window generously covering the support.
    let sup = spec.support();
    let lo = sup.lo.unwrap_or(table.x_min().min(-200) - 200);
    let hi = sup.hi.unwrap_or(table.x_max() + 400);
    let mut standing: Vec<(i64, f64)> = Vec::new();
    let mut pooled_expected = 0.0;
    let mut covered = 0.0;
    for x in lo..=hi {
        let p = spec.logpmf(x).exp();
        covered += p;
        let e = M as f64 * p;
        if e >= MIN_EXPECTED {
            standing.push((x, e));
        } else {
            pooled_expected += e;
        }
    }
    // Mass outside the scanned window joins the pooled bin.
    pooled_expected += M as f64 * (1.0 - covered).max(0.0);

    assert!(standing.len() >= 2, "degenerate binning for {spec:?}");

    let mut stat = 0.0;
    let mut observed_standing = 0u64;
    for &(x, e) in &standing {
        let o = table.count(x) as f64;
        observed_standing += table.count(x);
        stat += (o - e) * (o - e) / e;
    }
    let mut dof = standing.len() - 1;
    let pooled_observed = (M - observed_standing) as f64;
    if pooled_expected >= MIN_EXPECTED {
        stat += (pooled_observed - pooled_expected).powi(2) / pooled_expected;
        dof += 1;
    }

    let chi = ChiSquared::new(dof as f64).unwrap();
    1.0 - chi.cdf(stat)
}

#[test]
fn every_benchmark_entry_passes_gof_on_most_seeds() {
    for entry in benchmark_entries() {
        let mut passes = 0;
        let mut pvalues = Vec::new();
        for run in 0..10 {
            let seed = subseed(0xC0FFEE, &format!("gof/{}/{run}", entry.name));
            let p = gof_pvalue(&entry.spec, seed);
            pvalues.push(p);
            if p > 0.001 {
                passes += 1;
            }
        }
        assert!(
            passes >= 9,
            "{}: only {passes}/10 seeds passed; p-values {pvalues:?}",
            entry.name
        );
    }
}
