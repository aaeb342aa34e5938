//! Log-gamma via the Lanczos approximation (g = 7, 9 terms).
//!
//! The special-function operators (`logF`, `logC`, `logB`) all reduce to
//! `ln Γ` on strictly positive arguments; the evaluator enforces positivity
//! before calling in here, so no reflection branch is needed.  The g = 7
//! coefficient set gives ~1e-14 relative accuracy across the whole positive
//! axis, far inside the 1e-8 tolerance the fitting pipeline relies on.

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// Natural log of the gamma function for `x > 0`.
///
/// Returns NaN for non-positive or non-finite input; callers are expected
/// to have filtered those out as domain errors already.
pub fn ln_gamma(x: f64) -> f64 {
    if !(x > 0.0) || !x.is_finite() {
        return f64::NAN;
    }
    let mut acc = LANCZOS_COEFFS[0];
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x - 1.0 + k as f64);
    }
    let base = x + LANCZOS_G - 0.5;
    HALF_LN_TWO_PI + (x - 0.5) * base.ln() - base + acc.ln()
}

/// Log-factorial `ln Γ(t + 1)`, defined for `t > -1`.
pub fn ln_factorial(t: f64) -> f64 {
    ln_gamma(t + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_values_match_exact_factorials() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        let ln24 = 24f64.ln();
        assert!((ln_gamma(5.0) - ln24).abs() < 1e-13 * ln24.abs().max(1.0));
        let ln362880 = 362_880f64.ln();
        assert!((ln_gamma(10.0) - ln362880).abs() < 1e-13 * ln362880);
    }

    #[test]
    fn half_integer_value() {
        // ln Γ(1/2) = ln √π
        let expected = std::f64::consts::PI.sqrt().ln();
        assert!((ln_gamma(0.5) - expected).abs() < 1e-14);
    }

    #[test]
    fn recurrence_holds_across_magnitudes() {
        // ln Γ(x+1) = ln Γ(x) + ln x
        for &x in &[0.1, 0.7, 1.3, 4.5, 17.25, 123.0, 9_876.5, 1.0e6] {
            let lhs = ln_gamma(x + 1.0);
            let rhs = ln_gamma(x) + x.ln();
            let scale = lhs.abs().max(1.0);
            assert!(
                (lhs - rhs).abs() < 1e-12 * scale,
                "recurrence failed at x = {x}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn out_of_domain_is_nan() {
        assert!(ln_gamma(0.0).is_nan());
        assert!(ln_gamma(-3.5).is_nan());
        assert!(ln_gamma(f64::NAN).is_nan());
        assert!(ln_gamma(f64::INFINITY).is_nan());
    }

    #[test]
    fn ln_factorial_shifts_by_one() {
        assert!((ln_factorial(4.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_factorial(0.0)).abs() < 1e-14);
        assert!(ln_factorial(-1.0).is_nan());
    }
}
