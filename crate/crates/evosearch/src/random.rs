//! Random generation of grammar-valid expression trees.
//!
//! Trees are built constraint-first — affine arguments where rule L
//! demands them, leaf exponents for `^` — so freshly generated material is
//! valid by construction instead of by rejection. Mutation still
//! re-checks, because edits can violate rules that construction respected.

use exprcore::{BinaryOp, Expr, UnaryOp};
use rand::Rng;

/// The operators available to search. `logGamma` is reserved for
/// canonical forms and never generated; `logaddexp`/`logdelta0` join only
/// when explicitly enabled.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub unary: Vec<UnaryOp>,
    pub binary: Vec<BinaryOp>,
}

impl OperatorSet {
    /// The core search alphabet.
    pub fn core() -> OperatorSet {
        OperatorSet {
            unary: vec![
                UnaryOp::LogF,
                UnaryOp::Log,
                UnaryOp::Exp,
                UnaryOp::Abs,
                UnaryOp::Sin,
                UnaryOp::Cos,
            ],
            binary: vec![
                BinaryOp::Add,
                BinaryOp::Sub,
                BinaryOp::Mul,
                BinaryOp::Pow,
                BinaryOp::LogC,
                BinaryOp::LogB,
            ],
        }
    }

    /// Core alphabet plus the optional primitives.
    pub fn with_optional(logaddexp: bool, logdelta0: bool) -> OperatorSet {
        let mut set = OperatorSet::core();
        if logdelta0 {
            set.unary.push(UnaryOp::LogDelta0);
        }
        if logaddexp {
            set.binary.push(BinaryOp::LogAddExp);
        }
        set
    }
}

/// Whether rule L forces this operator's argument(s) to be affine.
pub(crate) fn unary_wants_affine(op: UnaryOp) -> bool {
    matches!(
        op,
        UnaryOp::LogF | UnaryOp::LogGamma | UnaryOp::Sin | UnaryOp::Cos
    )
}

pub(crate) fn binary_wants_affine(op: BinaryOp) -> bool {
    matches!(op, BinaryOp::LogC | BinaryOp::LogB)
}

/// Draw an initial constant: log-uniform magnitude over [1e−2, 1e2] with
/// random sign, with the special values {0, 1, −1} mixed in at 15%.
pub fn random_constant(rng: &mut impl Rng) -> f64 {
    if rng.gen::<f64>() < 0.15 {
        return [0.0, 1.0, -1.0][rng.gen_range(0..3)];
    }
    let magnitude = 10f64.powf(rng.gen_range(-2.0..2.0));
    if rng.gen::<bool>() {
        magnitude
    } else {
        -magnitude
    }
}

fn random_leaf(rng: &mut impl Rng) -> Expr {
    if rng.gen::<bool>() {
        Expr::var()
    } else {
        Expr::constant(random_constant(rng))
    }
}

/// A strictly affine tree of at most `budget` nodes: variables, constants,
/// `+`/`−`, and `*` with a literal constant operand.
pub(crate) fn random_affine(rng: &mut impl Rng, budget: usize) -> Expr {
    if budget < 3 || rng.gen::<f64>() < 0.45 {
        return random_leaf(rng);
    }
    match rng.gen_range(0..3) {
        0 | 1 => {
            let op = if rng.gen::<bool>() {
                BinaryOp::Add
            } else {
                BinaryOp::Sub
            };
            let left_budget = rng.gen_range(1..=(budget - 2));
            let lhs = random_affine(rng, left_budget);
            let rhs = random_affine(rng, budget - 1 - lhs.size());
            Expr::binary(op, lhs, rhs)
        }
        _ => {
            let coeff = Expr::constant(random_constant(rng));
            let body = random_affine(rng, budget - 2);
            if rng.gen::<bool>() {
                Expr::binary(BinaryOp::Mul, coeff, body)
            } else {
                Expr::binary(BinaryOp::Mul, body, coeff)
            }
        }
    }
}

/// A grammar-valid tree of at most `budget` nodes over `ops`.
pub(crate) fn random_tree(rng: &mut impl Rng, ops: &OperatorSet, budget: usize) -> Expr {
    if budget <= 1 || rng.gen::<f64>() < 0.25 {
        return random_leaf(rng);
    }
    // Unary productions need 2 nodes, binary 3.
    let binary_ok = budget >= 3 && !ops.binary.is_empty();
    let unary_ok = !ops.unary.is_empty();
    let pick_unary = match (unary_ok, binary_ok) {
        (true, true) => rng.gen::<f64>() < 0.35,
        (true, false) => true,
        (false, true) => false,
        (false, false) => return random_leaf(rng),
    };

    if pick_unary {
        let op = ops.unary[rng.gen_range(0..ops.unary.len())];
        let child = if unary_wants_affine(op) {
            random_affine(rng, budget - 1)
        } else {
            random_tree(rng, ops, budget - 1)
        };
        return Expr::unary(op, child);
    }

    let op = ops.binary[rng.gen_range(0..ops.binary.len())];
    match op {
        BinaryOp::Pow => {
            // Rule A: the exponent is a lone leaf.
            let base = random_tree(rng, ops, budget - 2);
            Expr::binary(op, base, random_leaf(rng))
        }
        _ if binary_wants_affine(op) => {
            let left_budget = rng.gen_range(1..=(budget - 2));
            let lhs = random_affine(rng, left_budget);
            let rhs = random_affine(rng, budget - 1 - lhs.size());
            Expr::binary(op, lhs, rhs)
        }
        _ => {
            let left_budget = rng.gen_range(1..=(budget - 2));
            let lhs = random_tree(rng, ops, left_budget);
            let rhs = random_tree(rng, ops, budget - 1 - lhs.size());
            Expr::binary(op, lhs, rhs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use exprcore::{check_grammar, GrammarConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_trees_are_valid_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ops = OperatorSet::with_optional(true, true);
        for _ in 0..2000 {
            let tree = random_tree(&mut rng, &ops, 15);
            assert!(tree.size() <= 15, "oversized: {tree:?}");
            let violations = check_grammar(&tree, GrammarConfig::strict());
            assert!(violations.is_empty(), "invalid: {violations:?}");
        }
    }

    #[test]
    fn affine_trees_satisfy_the_strict_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let tree = random_affine(&mut rng, 9);
            // Wrap in a rule-L operator so the checker exercises the
            // affine test on our tree.
            let wrapped = Expr::unary(UnaryOp::LogF, tree);
            assert!(check_grammar(&wrapped, GrammarConfig::strict()).is_empty());
        }
    }

    #[test]
    fn constants_cover_magnitudes_and_special_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let draws: Vec<f64> = (0..4000).map(|_| random_constant(&mut rng)).collect();
        assert!(draws.iter().any(|v| *v == 0.0));
        assert!(draws.iter().any(|v| *v == 1.0));
        assert!(draws.iter().any(|v| *v == -1.0));
        assert!(draws.iter().any(|v| v.abs() > 50.0));
        assert!(draws.iter().any(|v| v.abs() < 0.02 && *v != 0.0));
        assert!(draws.iter().any(|v| *v < 0.0));
        let specials = draws
            .iter()
            .filter(|v| **v == 0.0 || v.abs() == 1.0)
            .count();
        // 15% nominal rate, generous slack.
        assert!(specials > 400 && specials < 800, "{specials}");
    }
}
