//! The dynamic program and the streaming enumerator are written against
//! the same grammar definition but share no arithmetic; agreement across
//! every toggle combination at small budgets is the strongest check we
//! have that the DP recurrence is right.

use exprcore::Profile;
use num_bigint::BigUint;
use num_traits::Zero;
use spacecount::{
    count_expressions, enumerate_count, Commutativity, Constraint, CountMode, CountingGrammar,
};
use std::time::Instant;

const MAX_BUDGET: u32 = 8;

fn profiles() -> Vec<(&'static str, Profile)> {
    vec![
        ("uniform", Profile::uniform()),
        ("profile1", Profile::profile1()),
        ("profile2", Profile::profile2()),
    ]
}

#[test]
fn dp_matches_exhaustive_enumeration_for_all_small_budgets() {
    let start = Instant::now();
    let mut settings_checked = 0usize;
    let mut trees_total = 0u64;

    for constraint in [Constraint::None, Constraint::Atomic, Constraint::Full] {
        for (profile_name, profile) in profiles() {
            for commutativity in [Commutativity::Distinct, Commutativity::Merged] {
                // One enumeration pass per exact cost; both count modes and
                // all budgets up to MAX_BUDGET derive from the same pass.
                let mut eq_counts = vec![0u64; MAX_BUDGET as usize + 1];
                for cost in 1..=MAX_BUDGET {
                    let g = CountingGrammar {
                        count_mode: CountMode::Eq,
                        commutativity,
                        ..CountingGrammar::reference(cost, &profile, constraint)
                    };
                    eq_counts[cost as usize] = enumerate_count(&g).unwrap();
                    trees_total += eq_counts[cost as usize];
                }

                let mut prefix = BigUint::zero();
                for budget in 1..=MAX_BUDGET {
                    prefix += eq_counts[budget as usize];
                    let base = CountingGrammar {
                        commutativity,
                        ..CountingGrammar::reference(budget, &profile, constraint)
                    };
                    let eq = CountingGrammar {
                        count_mode: CountMode::Eq,
                        ..base.clone()
                    };
                    let label = format!(
                        "{}/{}/{:?}/budget {}",
                        constraint.name(),
                        profile_name,
                        commutativity,
                        budget
                    );
                    assert_eq!(
                        count_expressions(&eq).unwrap(),
                        BigUint::from(eq_counts[budget as usize]),
                        "eq-mode mismatch at {label}"
                    );
                    assert_eq!(
                        count_expressions(&base).unwrap(),
                        prefix,
                        "le-mode mismatch at {label}"
                    );
                    settings_checked += 2;
                }
            }
        }
    }

    let elapsed = start.elapsed();
    println!(
        "checked {settings_checked} (setting, budget, mode) combinations, \
         {trees_total} trees enumerated, in {:.1}s",
        elapsed.as_secs_f64()
    );
    assert_eq!(settings_checked, 3 * 3 * 2 * 8 * 2);
    assert!(
        elapsed.as_secs() < 120,
        "enumeration cross-check exceeded its two-minute budget ({elapsed:?})"
    );
}
