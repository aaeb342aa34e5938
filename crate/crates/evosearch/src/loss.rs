//! Weighted least-squares scoring of candidate expressions against a
//! smoothed log-probability target.

use exprcore::{Expr, Program};
use targets::TargetDataset;

/// WLS objective: Σ w·(f(x) − y(x))² / Σ w over the fit window.
///
/// Any evaluation failure (domain error, non-finite value) on any retained
/// grid point maps to +∞; the search treats such candidates as maximally
/// unfit rather than erroring out.
pub fn wls_loss(expr: &Expr, target: &TargetDataset) -> f64 {
    let program = Program::compile(expr);
    let mut stack = Vec::with_capacity(program.stack_need());
    program_loss(&program, target, &mut stack)
}

/// Hot-loop variant: pre-compiled program, caller-owned stack buffer.
pub fn program_loss(program: &Program, target: &TargetDataset, stack: &mut Vec<f64>) -> f64 {
    debug_assert!(!target.is_empty());
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..target.xs.len() {
        let f = match program.eval_with(target.xs[i], stack) {
            Some(v) if v.is_finite() => v,
            _ => return f64::INFINITY,
        };
        let r = f - target.y[i];
        num += target.w[i] * r * r;
        den += target.w[i];
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use exprcore::parse;
    use targets::{build_target, noiseless_target, parse_spec, CountTable};

    #[test]
    fn exact_expression_scores_near_zero_on_noiseless_target() {
        // ln p + (x − 1)·ln(1 − p) for geometric(p = 0.37, start 1).
        let spec = parse_spec("geometric:p=0.37").unwrap();
        let target = noiseless_target(&spec, 50_000, 4.0).unwrap();
        let a = (1.0f64 - 0.37).ln();
        let b = 0.37f64.ln() - a;
        let expr = parse(&format!("(x0 * {a}) + {b}")).unwrap();
        assert!(wls_loss(&expr, &target) < 1e-4);
    }

    #[test]
    fn constant_offset_costs_exactly_one() {
        // y(x) = −x − 1 with uneven weights; f(x) = −x is off by exactly
        // +1 everywhere, so the weight-normalized squared residual is 1.
        let target = TargetDataset {
            xs: vec![0.0, 1.0, 2.0, 3.0],
            y: vec![-1.0, -2.0, -3.0, -4.0],
            w: vec![4.0, 2.0, 1.0, 0.5],
            provenance: targets::Provenance {
                alpha: 0.5,
                tau: 0.0,
                gamma: 1.0,
                m: 100,
                k: 4,
            },
        };
        let expr = parse("x0 * -1").unwrap();
        assert!((wls_loss(&expr, &target) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn domain_failure_maps_to_infinity() {
        let counts = CountTable::new(0, vec![10, 5, 3]).unwrap();
        let target = build_target(&counts, 0.5, 0.0, 1.0).unwrap();
        let expr = parse("log(x0)").unwrap();
        assert_eq!(wls_loss(&expr, &target), f64::INFINITY);
    }

    #[test]
    fn overflowing_expression_maps_to_infinity() {
        let counts = CountTable::new(0, vec![10, 5, 3]).unwrap();
        let target = build_target(&counts, 0.5, 0.0, 1.0).unwrap();
        let expr = parse("exp(exp(x0 + 700))").unwrap();
        assert_eq!(wls_loss(&expr, &target), f64::INFINITY);
    }
}
