//! Refitting constants may never make an expression score worse: the
//! incumbent parameter vector stays in the comparison set, so the
//! guarantee is structural — checked here across a thousand random
//! (expression, target) pairs.

use evosearch::{refit_constants, wls_loss, OperatorSet, TreeFactory};
use exprcore::GrammarConfig;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use targets::{build_target, CountTable};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn refit_never_increases_loss(
        tree_seed in any::<u64>(),
        refit_seed in any::<u64>(),
        x_min in -5i64..5,
        counts in prop::collection::vec(0u64..400, 2..12),
    ) {
        prop_assume!(counts.iter().sum::<u64>() > 0);
        let table = CountTable::new(x_min, counts).unwrap();
        let target = build_target(&table, 0.5, 0.0, 1.0).unwrap();

        let factory = TreeFactory::new(
            OperatorSet::with_optional(true, true),
            GrammarConfig::strict(),
            15,
        );
        let mut tree_rng = ChaCha8Rng::seed_from_u64(tree_seed);
        let expr = factory.generate(&mut tree_rng);
        let before = wls_loss(&expr, &target);

        let mut refit_rng = ChaCha8Rng::seed_from_u64(refit_seed);
        let refit = refit_constants(&expr, &target, 2, &mut refit_rng);
        let after = wls_loss(&refit, &target);

        prop_assert!(
            after <= before || (before.is_infinite() && after.is_infinite()),
            "loss regressed: {before} -> {after} on {expr:?}"
        );
    }
}
