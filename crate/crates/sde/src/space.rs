//! `sde count-space`: exact expression-space counts via the counting DP,
//! optionally cross-checked against brute-force enumeration at small
//! budgets.

use exprcore::Profile;
use spacecount::{
    count_expressions, enumerate_count, format_magnitude, Commutativity, Constraint, CountMode,
    CountingGrammar, InvalidGrammar,
};
use thiserror::Error;

/// Brute-force enumeration visits every tree; past this budget the count
/// crosses ~10^8 trees and the check stops being interactive.
pub const MAX_BRUTE_BUDGET: u32 = 8;

#[derive(Clone, Debug)]
pub struct CountRequest {
    pub budget: u32,
    pub costs: String,
    pub constraints: String,
    pub brute_check: bool,
    pub count_mode: String,
    pub commutative: String,
}

#[derive(Debug, Error)]
pub enum CountError {
    #[error("unknown cost profile `{0}` (valid: uniform, profile1, profile2)")]
    UnknownCosts(String),
    #[error("unknown constraint level `{0}` (valid: none, atomic, full)")]
    UnknownConstraint(String),
    #[error("unknown count mode `{0}` (valid: le, eq)")]
    UnknownCountMode(String),
    #[error("unknown commutativity convention `{0}` (valid: distinct, merged)")]
    UnknownCommutativity(String),
    #[error(transparent)]
    Grammar(#[from] InvalidGrammar),
    #[error("--brute-check enumerates every tree; budget {budget} exceeds the limit {max}")]
    BruteTooLarge { budget: u32, max: u32 },
    #[error("DP count {dp} disagrees with brute-force count {brute}")]
    Mismatch { dp: String, brute: u64 },
}

pub fn run_count_space(req: &CountRequest) -> Result<String, CountError> {
    let profile = match req.costs.as_str() {
        "uniform" => Profile::uniform(),
        "profile1" => Profile::profile1(),
        "profile2" => Profile::profile2(),
        other => return Err(CountError::UnknownCosts(other.into())),
    };
    let constraint = Constraint::by_name(&req.constraints)
        .ok_or_else(|| CountError::UnknownConstraint(req.constraints.clone()))?;
    let mut grammar = CountingGrammar::reference(req.budget, &profile, constraint);
    grammar.count_mode = match req.count_mode.as_str() {
        "le" => CountMode::Le,
        "eq" => CountMode::Eq,
        other => return Err(CountError::UnknownCountMode(other.into())),
    };
    grammar.commutativity = match req.commutative.as_str() {
        "distinct" => Commutativity::Distinct,
        "merged" => Commutativity::Merged,
        other => return Err(CountError::UnknownCommutativity(other.into())),
    };
    grammar.validate()?;

    let count = count_expressions(&grammar)?;
    let digits = count.to_string();
    let mut out = format!(
        "grammar: costs={} constraints={} mode={} commutative={} budget={}\n",
        req.costs, req.constraints, req.count_mode, req.commutative, req.budget
    );
    match digits.parse::<f64>() {
        Ok(approx) if approx >= 1e6 => {
            out.push_str(&format!("count: {digits} (~{})\n", format_magnitude(approx)));
        }
        _ => out.push_str(&format!("count: {digits}\n")),
    }

    if req.brute_check {
        if req.budget > MAX_BRUTE_BUDGET {
            return Err(CountError::BruteTooLarge {
                budget: req.budget,
                max: MAX_BRUTE_BUDGET,
            });
        }
        let brute = enumerate_count(&grammar)?;
        out.push_str(&format!("brute-force: {brute}\n"));
        if digits != brute.to_string() {
            return Err(CountError::Mismatch { dp: digits, brute });
        }
        out.push_str("dp matches brute-force: ok\n");
    }
    Ok(out)
}
