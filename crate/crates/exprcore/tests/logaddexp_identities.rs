//! Closure and affine-preservation identities for `logaddexp`.
//!
//! For affine branches U, V, W, Z:
//!
//! * closure under addition:
//!   `lae(U,V) + lae(W,Z) = lae(lae(U+W, U+Z), lae(V+W, V+Z))`;
//! * decomposing such a sum yields one flat `logaddexp` term whose branch
//!   slopes/intercepts are exactly the pairwise sums.

use exprcore::decompose::{as_affine, BranchKind};
use exprcore::{decompose, eval, BinaryOp, Expr, Term};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random affine tree: structurally varied but affine in x0 by construction.
fn random_affine(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.4) {
        return if rng.gen_bool(0.5) {
            Expr::var()
        } else {
            Expr::constant(rng.gen_range(-3.0..3.0))
        };
    }
    match rng.gen_range(0..4) {
        0 => Expr::binary(
            BinaryOp::Add,
            random_affine(rng, depth - 1),
            random_affine(rng, depth - 1),
        ),
        1 => Expr::binary(
            BinaryOp::Sub,
            random_affine(rng, depth - 1),
            random_affine(rng, depth - 1),
        ),
        2 => Expr::binary(
            BinaryOp::Mul,
            Expr::constant(rng.gen_range(-0.2..0.2)),
            random_affine(rng, depth - 1),
        ),
        _ => Expr::binary(
            BinaryOp::Mul,
            random_affine(rng, depth - 1),
            Expr::constant(rng.gen_range(-0.2..0.2)),
        ),
    }
}

/// Like [`random_affine`] but guaranteed to mention `x0`, so the term
/// cannot constant-fold away before reaching the branch extractor.
fn random_affine_with_var(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    loop {
        let e = random_affine(rng, depth);
        if e.contains_var() {
            return e;
        }
    }
}

fn lae(l: Expr, r: Expr) -> Expr {
    Expr::binary(BinaryOp::LogAddExp, l, r)
}

fn add(l: &Expr, r: &Expr) -> Expr {
    Expr::binary(BinaryOp::Add, l.clone(), r.clone())
}

#[test]
fn four_branch_closure_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD00D_0001);
    for case in 0..250 {
        let u = random_affine_with_var(&mut rng, 3);
        let v = random_affine_with_var(&mut rng, 3);
        let w = random_affine_with_var(&mut rng, 3);
        let z = random_affine_with_var(&mut rng, 3);
        let lhs = Expr::binary(BinaryOp::Add, lae(u.clone(), v.clone()), lae(w.clone(), z.clone()));
        let rhs = lae(
            lae(add(&u, &w), add(&u, &z)),
            lae(add(&v, &w), add(&v, &z)),
        );
        for x in 0..=100 {
            let x = x as f64;
            let a = eval(&lhs, x).expect("affine branches are total");
            let b = eval(&rhs, x).expect("affine branches are total");
            assert!(
                (a - b).abs() <= 1e-10 * a.abs().max(1.0),
                "case {case}, x = {x}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn decompose_preserves_affine_branch_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD00D_0002);
    for case in 0..250 {
        let u = random_affine_with_var(&mut rng, 3);
        let v = random_affine_with_var(&mut rng, 3);
        let w = random_affine_with_var(&mut rng, 3);
        let z = random_affine_with_var(&mut rng, 3);
        let sum = Expr::binary(BinaryOp::Add, lae(u.clone(), v.clone()), lae(w.clone(), z.clone()));

        let parts: Vec<(f64, f64)> = [&u, &v, &w, &z]
            .iter()
            .map(|e| as_affine(e).expect("affine by construction"))
            .collect();
        let mut expected: Vec<(f64, f64)> = vec![
            (parts[0].0 + parts[2].0, parts[0].1 + parts[2].1),
            (parts[0].0 + parts[3].0, parts[0].1 + parts[3].1),
            (parts[1].0 + parts[2].0, parts[1].1 + parts[2].1),
            (parts[1].0 + parts[3].0, parts[1].1 + parts[3].1),
        ];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let d = decompose(&sum);
        assert_eq!(d.terms.len(), 1, "case {case}: expected a single merged term");
        let branches = match &d.terms[0] {
            Term::LogAddExp { branches } => branches,
            other => panic!("case {case}: expected logaddexp term, got {other:?}"),
        };
        assert_eq!(branches.len(), 4, "case {case}");
        let mut got: Vec<(f64, f64)> = branches
            .iter()
            .map(|b| match b.kind {
                BranchKind::Affine { slope, intercept } => (slope, intercept),
                ref other => panic!("case {case}: non-affine branch {other:?}"),
            })
            .collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());

        for (g, e) in got.iter().zip(&expected) {
            assert!(
                (g.0 - e.0).abs() <= 1e-10 * e.0.abs().max(1.0)
                    && (g.1 - e.1).abs() <= 1e-10 * e.1.abs().max(1.0),
                "case {case}: branch {g:?} vs expected {e:?}"
            );
        }
    }
}

#[test]
fn nested_composition_flattens_to_affine_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD00D_0003);
    for _ in 0..100 {
        let branches: Vec<Expr> = (0..4).map(|_| random_affine_with_var(&mut rng, 2)).collect();
        // Left-nested: lae(lae(lae(b0, b1), b2), b3)
        let nested = branches
            .iter()
            .skip(1)
            .fold(branches[0].clone(), |acc, b| lae(acc, b.clone()));
        let d = decompose(&nested);
        assert_eq!(d.terms.len(), 1);
        match &d.terms[0] {
            Term::LogAddExp { branches: got } => {
                assert_eq!(got.len(), 4);
                assert!(got
                    .iter()
                    .all(|b| matches!(b.kind, BranchKind::Affine { .. })));
            }
            other => panic!("expected logaddexp, got {other:?}"),
        }
    }
}
