//! Search-space reduction report: the constraint/profile cascade at a
//! fixed budget, with each row's shrink factor relative to the
//! unconstrained uniform-cost space kept in exact rational form.

use crate::dp::count_expressions;
use crate::grammar::{Constraint, CountingGrammar, InvalidGrammar};
use exprcore::Profile;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// One row of the cascade: a (constraint, profile) setting, its exact
/// count, and the reduction factor versus the first (baseline) row.
#[derive(Debug, Clone)]
pub struct ReductionRow {
    pub constraint: Constraint,
    pub profile: String,
    /// Exact expression count, decimal string (the numbers overflow u64
    /// well before the budgets of interest).
    pub count: BigUint,
    /// Reduction factor baseline/count as an exact reduced fraction.
    pub factor_num: BigUint,
    pub factor_den: BigUint,
}

impl ReductionRow {
    /// Factor as a float; loses precision but fine for display.
    pub fn factor(&self) -> f64 {
        ratio_to_f64(&self.factor_num, &self.factor_den)
    }
}

fn gcd(mut a: BigUint, mut b: BigUint) -> BigUint {
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    // Shift each side down independently so both keep >= 52 significant
    // bits, then restore the scale difference on the quotient.
    let ns = num.bits().saturating_sub(52);
    let ds = den.bits().saturating_sub(52);
    let n = (num >> ns).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> ds).to_f64().unwrap_or(f64::INFINITY);
    (n / d) * 2f64.powi(ns as i32 - ds as i32)
}

/// The standard cascade: unconstrained -> atomic exponents -> argument
/// constraints -> operator-cost profiles, all at the same budget.
pub fn reduction_report(budget: u32) -> Result<Vec<ReductionRow>, InvalidGrammar> {
    let uniform = Profile::uniform();
    let settings: [(Constraint, &Profile, &str); 5] = [
        (Constraint::None, &uniform, "uniform"),
        (Constraint::Atomic, &uniform, "uniform"),
        (Constraint::Full, &uniform, "uniform"),
        (Constraint::Full, &Profile::profile1(), "profile1"),
        (Constraint::Full, &Profile::profile2(), "profile2"),
    ];

    let mut rows = Vec::with_capacity(settings.len());
    let mut baseline: Option<BigUint> = None;
    for (constraint, profile, label) in settings {
        let g = CountingGrammar::reference(budget, profile, constraint);
        let count = count_expressions(&g)?;
        let base = baseline.get_or_insert_with(|| count.clone()).clone();
        let g = gcd(base.clone(), count.clone());
        rows.push(ReductionRow {
            constraint,
            profile: label.to_string(),
            count: count.clone(),
            factor_num: &base / &g,
            factor_den: &count / &g,
        });
    }
    Ok(rows)
}

/// Render a count or factor to three significant figures, switching to
/// scientific notation once it stops being comfortable to read.
pub fn format_magnitude(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    if v.abs() >= 1e4 {
        format!("{:.2e}", v)
    } else if v.abs() >= 100.0 {
        format!("{:.0}", v)
    } else if v.abs() >= 10.0 {
        format!("{:.1}", v)
    } else {
        format!("{:.2}", v)
    }
}

/// Full text rendering of the cascade, one row per setting.
pub fn render_report(rows: &[ReductionRow]) -> String {
    let mut out = String::new();
    out.push_str("constraint  profile   count                          reduction\n");
    for row in rows {
        let count_f = ratio_to_f64(&row.count, &BigUint::from(1u32));
        out.push_str(&format!(
            "{:<10}  {:<8}  {:<29}  x{}\n",
            row.constraint.name(),
            row.profile,
            if row.count.bits() > 63 {
                format_magnitude(count_f)
            } else {
                row.count.to_string()
            },
            format_magnitude(row.factor()),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_row_has_unit_factor() {
        let rows = reduction_report(6).unwrap();
        assert_eq!(rows[0].factor_num, BigUint::from(1u32));
        assert_eq!(rows[0].factor_den, BigUint::from(1u32));
        assert_eq!(rows.len(), 5);
    }

    #[test]
    fn factors_are_exact_reduced_fractions() {
        let rows = reduction_report(8).unwrap();
        for row in &rows {
            let g = gcd(row.factor_num.clone(), row.factor_den.clone());
            assert_eq!(g, BigUint::from(1u32));
            // factor == baseline/count exactly: num*count == den*baseline.
            assert_eq!(
                &row.factor_num * &row.count,
                &row.factor_den * &rows[0].count
            );
        }
    }

    #[test]
    fn constraints_and_cost_raises_only_shrink_the_space() {
        let rows = reduction_report(10).unwrap();
        // Constraint cascade at uniform costs tightens monotonically.
        assert!(rows[0].count >= rows[1].count);
        assert!(rows[1].count >= rows[2].count);
        // Either profile only raises operator costs above uniform, so both
        // shrink relative to full/uniform (but are unordered between
        // themselves: they discount different operator sets).
        assert!(rows[2].count >= rows[3].count);
        assert!(rows[2].count >= rows[4].count);
    }

    #[test]
    fn magnitude_formatting() {
        assert_eq!(format_magnitude(1.769_f64), "1.77");
        assert_eq!(format_magnitude(61.948), "61.9");
        assert_eq!(format_magnitude(619.48), "619");
        assert_eq!(format_magnitude(6.1948e19), "6.19e19");
    }
}
