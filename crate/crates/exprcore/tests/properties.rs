//! Property tests: parse/format round trip, simplification soundness,
//! canonicalization equivalence, and compiled-program agreement.

use exprcore::{
    canonicalize, check_grammar, eval, eval_opt, format_expr, parse, simplify, BinaryOp, Expr,
    GrammarConfig, Program, UnaryOp,
};
use proptest::prelude::*;

fn const_strategy() -> BoxedStrategy<Expr> {
    prop_oneof![
        8 => (-100.0..100.0f64).prop_map(Expr::constant),
        1 => Just(Expr::constant(0.0)),
        1 => Just(Expr::constant(1.0)),
        1 => Just(Expr::constant(-1.0)),
    ]
    .boxed()
}

fn leaf_strategy() -> BoxedStrategy<Expr> {
    prop_oneof![Just(Expr::var()), const_strategy()].boxed()
}

/// Affine trees: {Var, Const, +, -} and * with a constant operand.
fn affine_strategy() -> BoxedStrategy<Expr> {
    leaf_strategy()
        .prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| Expr::binary(BinaryOp::Add, l, r)),
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| Expr::binary(BinaryOp::Sub, l, r)),
                (const_strategy(), inner.clone())
                    .prop_map(|(c, e)| Expr::binary(BinaryOp::Mul, c, e)),
                (inner, const_strategy()).prop_map(|(e, c)| Expr::binary(BinaryOp::Mul, e, c)),
            ]
        })
        .boxed()
}

/// Grammar-valid trees covering every operator.
fn valid_strategy() -> BoxedStrategy<Expr> {
    leaf_strategy()
        .prop_recursive(4, 32, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| Expr::binary(BinaryOp::Add, l, r)),
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| Expr::binary(BinaryOp::Sub, l, r)),
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| Expr::binary(BinaryOp::Mul, l, r)),
                (inner.clone(), leaf_strategy())
                    .prop_map(|(b, e)| Expr::binary(BinaryOp::Pow, b, e)),
                affine_strategy().prop_map(|a| Expr::unary(UnaryOp::LogF, a)),
                (affine_strategy(), affine_strategy())
                    .prop_map(|(n, k)| Expr::binary(BinaryOp::LogC, n, k)),
                (affine_strategy(), affine_strategy())
                    .prop_map(|(a, b)| Expr::binary(BinaryOp::LogB, a, b)),
                inner.clone().prop_map(|c| Expr::unary(UnaryOp::Log, c)),
                inner.clone().prop_map(|c| Expr::unary(UnaryOp::Exp, c)),
                inner.clone().prop_map(|c| Expr::unary(UnaryOp::Abs, c)),
                affine_strategy().prop_map(|a| Expr::unary(UnaryOp::Sin, a)),
                affine_strategy().prop_map(|a| Expr::unary(UnaryOp::Cos, a)),
                inner.clone().prop_map(|c| Expr::unary(UnaryOp::LogDelta0, c)),
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| Expr::binary(BinaryOp::LogAddExp, l, r)),
            ]
        })
        .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parse_format_round_trip(e in valid_strategy()) {
        let text = format_expr(&e);
        let back = parse(&text).expect("formatted text must reparse");
        prop_assert_eq!(back, e);
    }

    #[test]
    fn generated_trees_are_grammar_valid(e in valid_strategy()) {
        prop_assert!(check_grammar(&e, GrammarConfig::strict()).is_empty());
    }

    #[test]
    fn simplify_preserves_eval_and_grammar(e in valid_strategy()) {
        let s = simplify(&e);
        prop_assert!(s.size() <= e.size());
        prop_assert!(check_grammar(&s, GrammarConfig::strict()).is_empty());
        for x in 0..=20 {
            let x = x as f64;
            if let Ok(orig) = eval(&e, x) {
                let simp = eval(&s, x).expect("simplify must not shrink the domain");
                let scale = orig.abs().max(1.0);
                prop_assert!(
                    (orig - simp).abs() <= 1e-10 * scale,
                    "x = {}: {} vs {}", x, orig, simp
                );
            }
        }
    }

    #[test]
    fn canonicalize_removes_composites_and_preserves_eval(e in valid_strategy()) {
        let c = canonicalize(&e);
        let mut has_composite = false;
        c.visit(&mut |n| {
            if matches!(
                n,
                Expr::Unary(UnaryOp::LogF, _)
                    | Expr::Binary(BinaryOp::LogC, _, _)
                    | Expr::Binary(BinaryOp::LogB, _, _)
            ) {
                has_composite = true;
            }
        });
        prop_assert!(!has_composite);
        for x in 0..=50 {
            let x = x as f64;
            match (eval(&e, x), eval(&c, x)) {
                (Ok(a), Ok(b)) => {
                    let scale = a.abs().max(1.0);
                    prop_assert!((a - b).abs() <= 1e-8 * scale, "x = {}: {} vs {}", x, a, b);
                }
                (Err(_), _) => {}
                (Ok(a), Err(err)) => {
                    return Err(TestCaseError::fail(
                        format!("canonical form lost x = {x}: orig {a}, err {err}")));
                }
            }
        }
    }

    #[test]
    fn compiled_program_agrees_with_tree_walker(e in valid_strategy()) {
        let prog = Program::compile(&e);
        let mut stack = Vec::new();
        for x in 0..=30 {
            let x = x as f64;
            prop_assert_eq!(prog.eval_with(x, &mut stack), eval_opt(&e, x));
        }
    }

    #[test]
    fn constant_round_trip_is_bit_exact(v in proptest::num::f64::NORMAL) {
        let text = format_expr(&Expr::constant(v));
        match parse(&text).expect("constant must reparse") {
            Expr::Const(back) => prop_assert_eq!(back.to_bits(), v.to_bits()),
            other => return Err(TestCaseError::fail(format!("expected constant, got {other:?}"))),
        }
    }
}
