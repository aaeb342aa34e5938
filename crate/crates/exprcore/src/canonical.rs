//! Canonicalization: rewrite composite special operators into `logGamma`.
//!
//! `logF`, `logC` and `logB` are convenient search primitives but awkward to
//! pattern-match against family templates.  Canonical form expands them:
//!
//! * `logF(t)      → logGamma(t + 1)`
//! * `logC(n, k)   → logGamma(n+1) − logGamma(k+1) − logGamma(n−k+1)`
//! * `logB(a, b)   → logGamma(a) + logGamma(b) − logGamma(a+b)`
//!
//! The rewrites preserve domains exactly (each positivity requirement maps
//! one-to-one), and a simplification pass afterwards folds the introduced
//! constant arithmetic so `logC(10, x0)` becomes `logGamma` of clean shifts.

use crate::expr::{BinaryOp, Expr, UnaryOp};
use crate::simplify::simplify;

/// Rewrite all composite operators into `logGamma` form and tidy up.
pub fn canonicalize(expr: &Expr) -> Expr {
    simplify(&rewrite(expr))
}

fn lgamma(e: Expr) -> Expr {
    Expr::unary(UnaryOp::LogGamma, e)
}

fn plus_one(e: Expr) -> Expr {
    Expr::binary(BinaryOp::Add, e, Expr::constant(1.0))
}

fn rewrite(e: &Expr) -> Expr {
    match e {
        Expr::Var | Expr::Const(_) => e.clone(),
        Expr::Unary(UnaryOp::LogF, c) => lgamma(plus_one(rewrite(c))),
        Expr::Unary(op, c) => Expr::unary(*op, rewrite(c)),
        Expr::Binary(BinaryOp::LogC, n, k) => {
            let n = rewrite(n);
            let k = rewrite(k);
            let n_minus_k = Expr::binary(BinaryOp::Sub, n.clone(), k.clone());
            Expr::binary(
                BinaryOp::Sub,
                Expr::binary(
                    BinaryOp::Sub,
                    lgamma(plus_one(n)),
                    lgamma(plus_one(k)),
                ),
                lgamma(plus_one(n_minus_k)),
            )
        }
        Expr::Binary(BinaryOp::LogB, a, b) => {
            let a = rewrite(a);
            let b = rewrite(b);
            let sum = Expr::binary(BinaryOp::Add, a.clone(), b.clone());
            Expr::binary(
                BinaryOp::Sub,
                Expr::binary(BinaryOp::Add, lgamma(a), lgamma(b)),
                lgamma(sum),
            )
        }
        Expr::Binary(op, l, r) => Expr::binary(*op, rewrite(l), rewrite(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval;

    fn contains_composite(e: &Expr) -> bool {
        let mut found = false;
        e.visit(&mut |n| match n {
            Expr::Unary(UnaryOp::LogF, _)
            | Expr::Binary(BinaryOp::LogC, _, _)
            | Expr::Binary(BinaryOp::LogB, _, _) => found = true,
            _ => {}
        });
        found
    }

    fn assert_eval_equal(original: &Expr, canonical: &Expr) {
        for x in 0..=200 {
            let x = x as f64;
            match (eval(original, x), eval(canonical, x)) {
                (Ok(a), Ok(b)) => {
                    let scale = a.abs().max(1.0);
                    assert!(
                        (a - b).abs() < 1e-8 * scale,
                        "mismatch at x = {x}: {a} vs {b}"
                    );
                }
                (Err(_), Err(_)) => {}
                (a, b) => panic!("domain disagreement at x = {x}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn log_factorial_expands() {
        let e = Expr::unary(UnaryOp::LogF, Expr::var());
        let c = canonicalize(&e);
        let expected = Expr::unary(
            UnaryOp::LogGamma,
            Expr::binary(BinaryOp::Add, Expr::var(), Expr::constant(1.0)),
        );
        assert_eq!(c, expected);
        assert_eval_equal(&e, &c);
    }

    #[test]
    fn log_binomial_coefficient_expands() {
        let e = Expr::binary(BinaryOp::LogC, Expr::constant(10.0), Expr::var());
        let c = canonicalize(&e);
        assert!(!contains_composite(&c));
        assert_eval_equal(&e, &c);
    }

    #[test]
    fn log_beta_expands() {
        let e = Expr::binary(BinaryOp::LogB, Expr::constant(2.69), Expr::var());
        let c = canonicalize(&e);
        assert!(!contains_composite(&c));
        assert_eval_equal(&e, &c);
    }

    #[test]
    fn nested_arithmetic_survives() {
        // logC(x0 + 9, x0) + x0 * -0.356 - 24.84  (negative binomial shape)
        let e = Expr::binary(
            BinaryOp::Sub,
            Expr::binary(
                BinaryOp::Add,
                Expr::binary(
                    BinaryOp::LogC,
                    Expr::binary(BinaryOp::Add, Expr::var(), Expr::constant(9.0)),
                    Expr::var(),
                ),
                Expr::binary(BinaryOp::Mul, Expr::var(), Expr::constant(-0.356)),
            ),
            Expr::constant(24.84),
        );
        let c = canonicalize(&e);
        assert!(!contains_composite(&c));
        assert_eval_equal(&e, &c);
    }

    #[test]
    fn already_canonical_is_stable() {
        let e = Expr::binary(
            BinaryOp::Sub,
            Expr::binary(BinaryOp::Mul, Expr::var(), Expr::constant(2.485)),
            Expr::unary(
                UnaryOp::LogGamma,
                Expr::binary(BinaryOp::Add, Expr::var(), Expr::constant(1.0)),
            ),
        );
        assert_eq!(canonicalize(&e), e);
    }
}
