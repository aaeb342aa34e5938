//! Normalization sweep: exponentiated log-PMFs sum to one for every
//! benchmark entry — exactly for finite supports, to within 1e-8 at the
//! 1e-12-tail cutoff for infinite ones.

use targets::{benchmark_entries, true_logpmf, Tier};

#[test]
fn benchmark_entries_normalize() {
    for entry in benchmark_entries() {
        let sup = entry.spec.support();
        let finite = sup.lo.is_some() && sup.hi.is_some();
        let lo = sup.lo.unwrap_or(-500);
        // Infinite tails: scan far enough that the remaining mass is
        // below 1e-12 for every catalog entry's reference parameters.
        let hi = sup.hi.unwrap_or(20_000);
        let mass: f64 = (lo..=hi)
            .map(|x| entry.spec.logpmf(x).exp())
            .sum();
        let tol = if finite { 1e-10 } else { 1e-8 };
        assert!(
            (mass - 1.0).abs() < tol,
            "{}: mass = {mass:.15}",
            entry.name
        );
    }
}

#[test]
fn true_logpmf_errors_exactly_off_support() {
    for entry in benchmark_entries() {
        let sup = entry.spec.support();
        if let Some(lo) = sup.lo {
            assert!(
                true_logpmf(&entry.spec, lo - 1).is_err(),
                "{} below support",
                entry.name
            );
            assert!(true_logpmf(&entry.spec, lo).is_ok(), "{} at lower edge", entry.name);
        }
        if let Some(hi) = sup.hi {
            assert!(
                true_logpmf(&entry.spec, hi + 1).is_err(),
                "{} above support",
                entry.name
            );
            assert!(true_logpmf(&entry.spec, hi).is_ok(), "{} at upper edge", entry.name);
        }
        // Composites keep an atom at zero.
        if entry.tier == Tier::Composite {
            assert!(true_logpmf(&entry.spec, 0).is_ok(), "{} at zero", entry.name);
        }
    }
}
