//! Deterministic sampling: inverse-CDF draws over a cumulative
//! probability table truncated at 1e-12 tail mass, so the sampler agrees
//! with `true_logpmf` by construction.

use crate::counts::CountTable;
use crate::spec::DistributionSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mass allowed to remain outside the tabulated window.
const TAIL_MASS: f64 = 1e-12;

/// Hard cap on tabulated support points (memory guard for extreme
/// parameters; benchmark families stay far below it).
const MAX_TABLE: usize = 4_000_000;

/// Derive a stream seed from a master seed and a textual label (family
/// name, run index, ...) via FNV-1a over the little-endian seed bytes
/// followed by the label bytes. One master seed thus fans out into
/// reproducible independent streams.
pub fn subseed(master: u64, label: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    for byte in master.to_le_bytes().iter().chain(label.as_bytes()) {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(PRIME);
    }
    hash
}

/// Probability table over a contiguous window covering all but at most
/// `TAIL_MASS` of the spec's mass: starting x plus per-point pmf values.
pub(crate) fn probability_table(spec: &DistributionSpec) -> (i64, Vec<f64>) {
    let sup = spec.support();
    if let (Some(lo), Some(hi)) = (sup.lo, sup.hi) {
        if ((hi - lo) as usize) < MAX_TABLE {
            let pmf: Vec<f64> = (lo..=hi).map(|x| spec.logpmf(x).exp()).collect();
            return (lo, pmf);
        }
    }

    // Unbounded (or immense) support: grow a window greedily from an
    // in-support anchor, always extending the side with more frontier
    // mass, until the captured mass reaches 1 − TAIL_MASS and both
    // frontiers are negligible.
    let mut anchor = 0i64;
    if let Some(lo) = sup.lo {
        anchor = anchor.max(lo);
    }
    if let Some(hi) = sup.hi {
        anchor = anchor.min(hi);
    }
    let mass = |x: i64| {
        if sup.contains(x) {
            spec.logpmf(x).exp()
        } else {
            0.0
        }
    };
    let mut lo = anchor;
    let mut hi = anchor;
    let mut total = mass(anchor);
    while (hi - lo) as usize <= MAX_TABLE {
        let left = mass(lo - 1);
        let right = mass(hi + 1);
        if total >= 1.0 - TAIL_MASS && left < 1e-13 && right < 1e-13 {
            break;
        }
        if left >= right && left > 0.0 {
            lo -= 1;
            total += left;
        } else if right > 0.0 {
            hi += 1;
            total += right;
        } else if left > 0.0 {
            lo -= 1;
            total += left;
        } else {
            break;
        }
    }
    let pmf: Vec<f64> = (lo..=hi).map(mass).collect();
    (lo, pmf)
}

/// Draw `m` i.i.d. samples from `spec` and tabulate them.
///
/// Deterministic in `seed`. Panics if the spec fails validation or
/// `m == 0` (contract preconditions).
pub fn sample(spec: &DistributionSpec, m: u64, seed: u64) -> CountTable {
    spec.validate().expect("sample() requires a valid spec");
    assert!(m >= 1, "sample() requires m >= 1");

    let (x0, pmf) = probability_table(spec);
    let mut cum = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for &p in &pmf {
        acc += p;
        cum.push(acc);
    }
    let total = acc;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; pmf.len()];
    for _ in 0..m {
        let u: f64 = rng.gen::<f64>() * total;
        // First index whose cumulative mass exceeds u.
        let idx = cum.partition_point(|&c| c <= u).min(counts.len() - 1);
        counts[idx] += 1;
    }

    // Trim to the observed range (the grid spans what was actually seen).
    let first = counts.iter().position(|&c| c > 0).expect("m >= 1 draws");
    let last = counts.iter().rposition(|&c| c > 0).unwrap();
    CountTable::new(x0 + first as i64, counts[first..=last].to_vec())
        .expect("nonempty by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::BaseFamily;

    #[test]
    fn subseed_is_stable_and_label_sensitive() {
        let a = subseed(42, "poisson/0");
        assert_eq!(a, subseed(42, "poisson/0"));
        assert_ne!(a, subseed(42, "poisson/1"));
        assert_ne!(a, subseed(43, "poisson/0"));
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = DistributionSpec::Base(BaseFamily::Poisson { lambda: 12.0 });
        let a = sample(&spec, 10_000, 7);
        let b = sample(&spec, 10_000, 7);
        assert_eq!(a, b);
        let c = sample(&spec, 10_000, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn poisson_mean_within_clt_bound() {
        let spec = DistributionSpec::Base(BaseFamily::Poisson { lambda: 12.0 });
        let t = sample(&spec, 50_000, 2026);
        let mean: f64 =
            t.iter().map(|(x, c)| x as f64 * c as f64).sum::<f64>() / t.total() as f64;
        assert!((mean - 12.0).abs() < 0.1, "mean = {mean}");
    }

    #[test]
    fn binomial_respects_support_bound() {
        let spec = DistributionSpec::Base(BaseFamily::Binomial { n: 10, p: 0.3 });
        for seed in 0..5 {
            let t = sample(&spec, 20_000, seed);
            assert!(t.x_max() <= 10);
            assert!(t.x_min() >= 0);
        }
    }

    #[test]
    fn zero_inflated_geometric_zero_fraction() {
        let spec = DistributionSpec::zero_inflated(
            0.35,
            DistributionSpec::Base(BaseFamily::Geometric { p: 0.3, start: 0 }),
        );
        let t = sample(&spec, 100_000, 11);
        let frac = t.count(0) as f64 / t.total() as f64;
        assert!((frac - 0.545).abs() < 0.01, "zero fraction = {frac}");
    }

    #[test]
    fn dlaplace_window_covers_both_tails() {
        let spec = DistributionSpec::Base(BaseFamily::DLaplace { a: 0.85, loc: 3 });
        let (x0, pmf) = probability_table(&spec);
        assert!(x0 < -20, "left edge {x0}");
        assert!(x0 + pmf.len() as i64 > 30);
        let total: f64 = pmf.iter().sum();
        assert!((total - 1.0).abs() < 1e-11);
        let t = sample(&spec, 50_000, 3);
        assert!(t.x_min() < 0 && t.x_max() > 6);
    }

    #[test]
    fn capped_zipf_table_is_exactly_the_cap() {
        let spec = DistributionSpec::Base(BaseFamily::Zipf { a: 1.7, x_max: Some(130) });
        let (x0, pmf) = probability_table(&spec);
        assert_eq!(x0, 1);
        assert_eq!(pmf.len(), 130);
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
