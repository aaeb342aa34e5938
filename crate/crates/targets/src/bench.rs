//! Named benchmark entries: the 14 base families at their reference
//! parameters plus the zero-inflated and mixture composites.
//!
//! Heavy-tailed entries carry a support cap (zipf at 130, yulesimon at
//! 40) so that a desk-scale sample's retained fit window covers all but
//! ~1e-4 of the true mass — uncapped polynomial tails leave percent-level
//! mass outside any finite window, which no normalization check could
//! accept. The caps change the normalizing constant (partial sum instead
//! of ζ), not the head shape the recovery criteria measure.

use crate::family::BaseFamily;
use crate::spec::DistributionSpec;

/// Scheduling tier of a benchmark entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    /// The six-family quick suite.
    Fast,
    /// Remaining base families at desk-friendly runtimes.
    Standard,
    /// Long-running base families, enabled by --full.
    Slow,
    /// Zero-inflated and mixture targets, addressed by name.
    Composite,
}

#[derive(Clone, Debug)]
pub struct BenchEntry {
    pub name: &'static str,
    pub spec: DistributionSpec,
    pub tier: Tier,
}

/// The full named catalog, order-stable.
pub fn benchmark_entries() -> Vec<BenchEntry> {
    use BaseFamily::*;
    use DistributionSpec as D;
    let base = |f: BaseFamily| D::Base(f);
    vec![
        BenchEntry { name: "poisson", spec: base(Poisson { lambda: 12.0 }), tier: Tier::Fast },
        BenchEntry {
            name: "geometric",
            spec: base(Geometric { p: 0.37, start: 1 }),
            tier: Tier::Fast,
        },
        BenchEntry {
            name: "zipf",
            spec: base(Zipf { a: 1.7, x_max: Some(130) }),
            tier: Tier::Fast,
        },
        BenchEntry { name: "zipfian", spec: base(Zipfian { a: 1.7, n: 130 }), tier: Tier::Fast },
        BenchEntry {
            name: "yulesimon",
            spec: base(YuleSimon { rho: 1.7, x_max: Some(40) }),
            tier: Tier::Fast,
        },
        BenchEntry {
            name: "boltzmann",
            spec: base(Boltzmann { beta: 0.73, n: 100 }),
            tier: Tier::Fast,
        },
        BenchEntry {
            name: "logseries",
            spec: base(LogSeries { p: 0.37 }),
            tier: Tier::Standard,
        },
        BenchEntry {
            name: "dlaplace",
            spec: base(DLaplace { a: 0.85, loc: 0 }),
            tier: Tier::Standard,
        },
        BenchEntry {
            name: "negbinomial",
            spec: base(NegBinomial { r: 10.0, p: 0.7 }),
            tier: Tier::Standard,
        },
        BenchEntry {
            name: "betanegbinomial",
            spec: base(BetaNegBinomial { r: 5.0, alpha: 5.0, beta: 2.0 }),
            tier: Tier::Standard,
        },
        BenchEntry {
            name: "binomial",
            spec: base(Binomial { n: 10, p: 0.3 }),
            tier: Tier::Standard,
        },
        BenchEntry {
            name: "hypergeometric",
            spec: base(Hypergeometric { npop: 200, k: 80, n: 60 }),
            tier: Tier::Standard,
        },
        BenchEntry {
            name: "neghypergeometric",
            spec: base(NegHypergeometric { npop: 200, k: 80, r: 60 }),
            tier: Tier::Slow,
        },
        BenchEntry {
            name: "betabinomial",
            spec: base(BetaBinomial { n: 100, alpha: 2.0, beta: 5.0 }),
            tier: Tier::Slow,
        },
        BenchEntry {
            name: "zip",
            spec: D::zero_inflated(0.35, base(Poisson { lambda: 3.0 })),
            tier: Tier::Composite,
        },
        BenchEntry {
            name: "zinb",
            spec: D::zero_inflated(0.35, base(NegBinomial { r: 2.2, p: 0.4 })),
            tier: Tier::Composite,
        },
        BenchEntry {
            name: "zig",
            spec: D::zero_inflated(0.35, base(Geometric { p: 0.3, start: 0 })),
            tier: Tier::Composite,
        },
        BenchEntry {
            name: "mix2binomial",
            spec: D::Mixture(vec![
                (0.65, Binomial { n: 5, p: 0.3 }),
                (0.35, Binomial { n: 5, p: 0.6 }),
            ]),
            tier: Tier::Composite,
        },
        BenchEntry {
            name: "mix3binomial",
            spec: D::Mixture(vec![
                (0.5, Binomial { n: 7, p: 0.25 }),
                (0.3, Binomial { n: 7, p: 0.55 }),
                (0.2, Binomial { n: 7, p: 0.8 }),
            ]),
            tier: Tier::Composite,
        },
    ]
}

/// Look up a named benchmark entry.
pub fn benchmark_spec(name: &str) -> Option<DistributionSpec> {
    benchmark_entries()
        .into_iter()
        .find(|e| e.name == name)
        .map(|e| e.spec)
}

/// Names in the fast suite, order-stable.
pub fn fast_suite() -> Vec<&'static str> {
    benchmark_entries()
        .iter()
        .filter(|e| e.tier == Tier::Fast)
        .map(|e| e.name)
        .collect()
}

/// Names in the full base-family suite (fast + standard + slow).
pub fn full_suite() -> Vec<&'static str> {
    benchmark_entries()
        .iter()
        .filter(|e| e.tier != Tier::Composite)
        .map(|e| e.name)
        .collect()
}
