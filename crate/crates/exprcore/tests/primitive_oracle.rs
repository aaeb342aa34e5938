//! Special-function primitives against an independent oracle.
//!
//! The oracle is a cumulative Kahan-compensated sum of `ln k`, which gives
//! `ln n!` to ~1e-15 relative accuracy with no gamma function involved, so
//! agreement here genuinely cross-checks the Lanczos implementation behind
//! `logF`/`logC`/`logB`.

use exprcore::{eval, BinaryOp, Expr, UnaryOp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N_MAX: usize = 1_000_000;

/// `table[n] = ln n!` via compensated summation.
fn ln_factorial_table(n_max: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n_max + 1);
    table.push(0.0);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for k in 1..=n_max {
        let term = (k as f64).ln() - comp;
        let t = sum + term;
        comp = (t - sum) - term;
        sum = t;
        table.push(sum);
    }
    table
}

fn assert_rel(actual: f64, oracle: f64, tol: f64, what: &str) {
    let scale = oracle.abs().max(1.0);
    assert!(
        (actual - oracle).abs() <= tol * scale,
        "{what}: got {actual}, oracle {oracle}, rel err {}",
        (actual - oracle).abs() / scale
    );
}

#[test]
fn log_factorial_matches_kahan_table_to_one_million() {
    let table = ln_factorial_table(N_MAX);
    let logf = Expr::unary(UnaryOp::LogF, Expr::var());
    // Dense at the small end where cancellation is sharpest, strided beyond.
    let mut args: Vec<usize> = (0..=2_000).collect();
    args.extend((2_000..=N_MAX).step_by(997));
    args.push(N_MAX);
    for n in args {
        let actual = eval(&logf, n as f64).expect("logF in domain");
        assert_rel(actual, table[n], 1e-8, &format!("logF({n})"));
    }
}

#[test]
fn log_binomial_matches_kahan_table() {
    let table = ln_factorial_table(N_MAX);
    let mut rng = ChaCha8Rng::seed_from_u64(0x51de_0001);
    let logc = |n: f64, k: f64| {
        eval(
            &Expr::binary(BinaryOp::LogC, Expr::constant(n), Expr::var()),
            k,
        )
        .expect("logC in domain")
    };
    for _ in 0..3_000 {
        let n = rng.gen_range(1..=N_MAX);
        let k = rng.gen_range(0..=n);
        let oracle = table[n] - table[k] - table[n - k];
        assert_rel(logc(n as f64, k as f64), oracle, 1e-8, &format!("logC({n},{k})"));
    }
    // Exhaustive on a small triangle where values are near zero.
    for n in 0..=60usize {
        for k in 0..=n {
            let oracle = table[n] - table[k] - table[n - k];
            assert_rel(logc(n as f64, k as f64), oracle, 1e-8, &format!("logC({n},{k})"));
        }
    }
}

#[test]
fn log_beta_matches_kahan_table() {
    let table = ln_factorial_table(N_MAX);
    let mut rng = ChaCha8Rng::seed_from_u64(0x51de_0002);
    for _ in 0..3_000 {
        let a = rng.gen_range(1..=N_MAX / 2);
        let b = rng.gen_range(1..=(N_MAX - a));
        // ln B(a,b) = ln Γ(a) + ln Γ(b) − ln Γ(a+b) = T[a−1] + T[b−1] − T[a+b−1]
        let oracle = table[a - 1] + table[b - 1] - table[a + b - 1];
        let e = Expr::binary(
            BinaryOp::LogB,
            Expr::constant(a as f64),
            Expr::constant(b as f64),
        );
        let actual = eval(&e, 0.0).expect("logB in domain");
        assert_rel(actual, oracle, 1e-8, &format!("logB({a},{b})"));
    }
}

#[test]
fn logaddexp_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51de_0003);
    let lae = |u: f64, v: f64| {
        eval(
            &Expr::binary(BinaryOp::LogAddExp, Expr::constant(u), Expr::constant(v)),
            0.0,
        )
        .expect("logaddexp total")
    };
    for _ in 0..10_000 {
        let u: f64 = rng.gen_range(-600.0..600.0);
        let v: f64 = rng.gen_range(-600.0..600.0);
        let forward = lae(u, v);
        let backward = lae(v, u);
        assert!(
            (forward - backward).abs() <= 1e-12 * forward.abs().max(1.0),
            "commutativity failed at ({u}, {v})"
        );
        assert!(forward >= u.max(v), "Lae({u},{v}) = {forward} below max");
    }
    for _ in 0..1_000 {
        let u: f64 = rng.gen_range(-600.0..600.0);
        let expected = u + 2f64.ln();
        assert!(
            (lae(u, u) - expected).abs() <= 1e-12 * expected.abs().max(1.0),
            "equal-branch identity failed at {u}"
        );
    }
}

#[test]
fn logc_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51de_0004);
    for _ in 0..2_000 {
        let n = rng.gen_range(0..=5_000u32) as f64;
        let k = rng.gen_range(0..=n as u32) as f64;
        let left = eval(
            &Expr::binary(BinaryOp::LogC, Expr::constant(n), Expr::constant(k)),
            0.0,
        )
        .unwrap();
        let right = eval(
            &Expr::binary(BinaryOp::LogC, Expr::constant(n), Expr::constant(n - k)),
            0.0,
        )
        .unwrap();
        assert!(
            (left - right).abs() <= 1e-10 * left.abs().max(1.0),
            "logC({n},{k}) symmetry: {left} vs {right}"
        );
    }
}

#[test]
fn logb_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51de_0005);
    for _ in 0..2_000 {
        let a: f64 = rng.gen_range(1e-3..1e4);
        let b: f64 = rng.gen_range(1e-3..1e4);
        let logb = |x: f64, y: f64| {
            eval(
                &Expr::binary(BinaryOp::LogB, Expr::constant(x), Expr::constant(y)),
                0.0,
            )
            .unwrap()
        };
        let left = logb(a, b);
        let right = logb(b, a);
        assert!(
            (left - right).abs() <= 1e-10 * left.abs().max(1.0),
            "logB({a},{b}) symmetry: {left} vs {right}"
        );
    }
}

#[test]
fn logaddexp_absorbs_log_zero() {
    for u in [-600.0, -100.0, 0.0, 3.0, 200.0] {
        let e = Expr::binary(
            BinaryOp::LogAddExp,
            Expr::constant(u),
            Expr::constant(exprcore::LOG_ZERO),
        );
        let v = eval(&e, 0.0).unwrap();
        assert!(
            (v - u).abs() <= 1e-12 * u.abs().max(1.0),
            "logaddexp({u}, LOG_ZERO) = {v}"
        );
    }
}
