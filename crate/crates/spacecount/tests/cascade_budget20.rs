//! Budget-20 cascade: the five headline counts and the reduction factors
//! they imply. Published figures are quoted to three significant digits,
//! so the match tolerance is 2%; the counts themselves are exact integers
//! produced by the DP and locked below at full precision.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use spacecount::{reduction_report, Constraint};
use std::str::FromStr;

fn approx(count: &BigUint) -> f64 {
    let bits = count.bits().saturating_sub(52);
    (count >> bits).to_f64().unwrap() * 2f64.powi(bits as i32)
}

fn assert_within(actual: &BigUint, published: f64, label: &str) {
    let a = approx(actual);
    let rel = (a - published).abs() / published;
    assert!(
        rel < 0.02,
        "{label}: count {a:.4e} deviates {:.2}% from published {published:.3e}",
        rel * 100.0
    );
}

#[test]
fn budget_twenty_cascade_matches_published_counts() {
    let rows = reduction_report(20).unwrap();
    assert_eq!(rows.len(), 5);

    assert_eq!(rows[0].constraint, Constraint::None);
    assert_within(&rows[0].count, 6.19e19, "unconstrained/uniform");
    assert_within(&rows[1].count, 3.50e19, "atomic/uniform");
    assert_within(&rows[2].count, 1.01e15, "full/uniform");
    assert_within(&rows[3].count, 7.06e10, "full/profile1");
    assert_within(&rows[4].count, 1.05e13, "full/profile2");

    // Atomic exponents alone cut the space by about 1.77x.
    let atomicity = approx(&rows[0].count) / approx(&rows[1].count);
    assert!(
        (atomicity - 1.77).abs() < 0.02,
        "atomicity factor {atomicity:.3} drifted from 1.77"
    );

    // Full-precision locks: any change to the recurrence or the grammar
    // tables shows up here first.
    assert_eq!(
        rows[0].count,
        BigUint::from_str("61948484530999882670").unwrap()
    );
    assert_eq!(
        rows[1].count,
        BigUint::from_str("34987582996138178150").unwrap()
    );
    assert_eq!(
        rows[2].count,
        BigUint::from_str("1009716987335086").unwrap()
    );
    assert_eq!(rows[3].count, BigUint::from_str("70627776494").unwrap());
    assert_eq!(rows[4].count, BigUint::from_str("10511167309710").unwrap());
}

#[test]
fn factors_reported_against_unconstrained_baseline() {
    let rows = reduction_report(20).unwrap();
    let baseline = approx(&rows[0].count);
    for row in &rows[1..] {
        let expected = baseline / approx(&row.count);
        assert!(
            (row.factor() / expected - 1.0).abs() < 1e-9,
            "factor column disagrees with the count ratio"
        );
    }
    // The cheap-operator profile shrinks the uniform full space by about
    // four orders of magnitude.
    assert!(rows[3].factor() > 1e8);
}
