//! Counting-grammar description: which operators exist, what each node
//! costs, and which structural constraints and counting conventions
//! apply.

use exprcore::{BinaryOp, Profile, UnaryOp};
use thiserror::Error;

/// Cumulative structural constraint levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// Fully unrestricted trees.
    None,
    /// Exponents of `^` restricted to a leaf (variable or constant).
    Atomic,
    /// Atomicity plus structural argument rules: every unary operator's
    /// argument and both arguments of logC/logB must be affine, where the
    /// counting-affine language is built from {variable, constant, +, −}.
    Full,
}

impl Constraint {
    pub fn name(self) -> &'static str {
        match self {
            Constraint::None => "none",
            Constraint::Atomic => "atomic",
            Constraint::Full => "full",
        }
    }

    pub fn by_name(name: &str) -> Option<Constraint> {
        match name {
            "none" => Some(Constraint::None),
            "atomic" => Some(Constraint::Atomic),
            "full" => Some(Constraint::Full),
            _ => None,
        }
    }
}

/// Count trees with total cost ≤ B, or exactly B.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    Le,
    Eq,
}

/// Whether the operand orderings of the commutative operators {+, ×}
/// count as distinct trees or merge into one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Commutativity {
    Distinct,
    Merged,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvalidGrammar {
    #[error("budget {budget} below minimum leaf cost {min_leaf}")]
    BudgetBelowLeaf { budget: u32, min_leaf: u32 },
    #[error("operator `{0}` listed twice")]
    DuplicateOperator(&'static str),
    #[error("costs must be positive")]
    ZeroCost,
}

/// A complete counting problem: operator set with costs, leaf costs,
/// budget, and the convention toggles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingGrammar {
    pub unary: Vec<(UnaryOp, u32)>,
    pub binary: Vec<(BinaryOp, u32)>,
    pub var_cost: u32,
    pub const_cost: u32,
    pub budget: u32,
    pub constraint: Constraint,
    pub count_mode: CountMode,
    pub commutativity: Commutativity,
}

/// The unary operators of the search grammar proper (no optional or
/// canonical-only primitives).
pub const COUNTED_UNARY: [UnaryOp; 6] = [
    UnaryOp::LogF,
    UnaryOp::Log,
    UnaryOp::Exp,
    UnaryOp::Abs,
    UnaryOp::Sin,
    UnaryOp::Cos,
];

/// The binary operators of the search grammar proper.
pub const COUNTED_BINARY: [BinaryOp; 6] = [
    BinaryOp::Add,
    BinaryOp::Sub,
    BinaryOp::Mul,
    BinaryOp::Pow,
    BinaryOp::LogC,
    BinaryOp::LogB,
];

impl CountingGrammar {
    /// The reference grammar: six unary and six binary operators priced
    /// by `profile`, counting trees of cost ≤ `budget` with distinct
    /// commutative orderings — the convention combination that reproduces
    /// the published cascade figures.
    pub fn reference(budget: u32, profile: &Profile, constraint: Constraint) -> CountingGrammar {
        let unary = COUNTED_UNARY
            .iter()
            .map(|&op| (op, profile.unary_cost(op).expect("priced")))
            .collect();
        let binary = COUNTED_BINARY
            .iter()
            .map(|&op| (op, profile.binary_cost(op).expect("priced")))
            .collect();
        CountingGrammar {
            unary,
            binary,
            var_cost: profile.var_cost,
            const_cost: profile.const_cost,
            budget,
            constraint,
            count_mode: CountMode::Le,
            commutativity: Commutativity::Distinct,
        }
    }

    /// The reduced enumeration grammar: unary {logF, log, exp}, binary
    /// {logB, +, −, ×, ^}, uniform unit costs, atomic exponents, cost
    /// ≤ `budget`, commutative orderings merged. At budget 8 this counts
    /// 400,376 candidate expressions.
    pub fn reduced(budget: u32) -> CountingGrammar {
        CountingGrammar {
            unary: vec![(UnaryOp::LogF, 1), (UnaryOp::Log, 1), (UnaryOp::Exp, 1)],
            binary: vec![
                (BinaryOp::LogB, 1),
                (BinaryOp::Add, 1),
                (BinaryOp::Sub, 1),
                (BinaryOp::Mul, 1),
                (BinaryOp::Pow, 1),
            ],
            var_cost: 1,
            const_cost: 1,
            budget,
            constraint: Constraint::Atomic,
            count_mode: CountMode::Le,
            commutativity: Commutativity::Merged,
        }
    }

    pub fn validate(&self) -> Result<(), InvalidGrammar> {
        if self.var_cost == 0 || self.const_cost == 0 {
            return Err(InvalidGrammar::ZeroCost);
        }
        let min_leaf = self.var_cost.min(self.const_cost);
        if self.budget < min_leaf {
            return Err(InvalidGrammar::BudgetBelowLeaf { budget: self.budget, min_leaf });
        }
        for &(op, k) in &self.unary {
            if k == 0 {
                return Err(InvalidGrammar::ZeroCost);
            }
            if self.unary.iter().filter(|(o, _)| *o == op).count() > 1 {
                return Err(InvalidGrammar::DuplicateOperator(op.name()));
            }
        }
        for &(op, k) in &self.binary {
            if k == 0 {
                return Err(InvalidGrammar::ZeroCost);
            }
            if self.binary.iter().filter(|(o, _)| *o == op).count() > 1 {
                return Err(InvalidGrammar::DuplicateOperator(op.name()));
            }
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn binary_cost(&self, op: BinaryOp) -> Option<u32> {
        self.binary.iter().find(|(o, _)| *o == op).map(|&(_, k)| k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_grammar_prices_from_profile() {
        let g = CountingGrammar::reference(20, &Profile::profile1(), Constraint::Full);
        assert_eq!(g.binary_cost(BinaryOp::LogC), Some(1));
        assert_eq!(g.binary_cost(BinaryOp::Mul), Some(5));
        let log_cost = g.unary.iter().find(|(o, _)| *o == UnaryOp::Log).unwrap().1;
        assert_eq!(log_cost, 5);
        g.validate().unwrap();
    }

    #[test]
    fn validation_catches_degenerate_grammars() {
        let mut g = CountingGrammar::reference(0, &Profile::uniform(), Constraint::None);
        assert_eq!(
            g.validate(),
            Err(InvalidGrammar::BudgetBelowLeaf { budget: 0, min_leaf: 1 })
        );
        g.budget = 5;
        g.unary.push((UnaryOp::Log, 3));
        assert!(matches!(g.validate(), Err(InvalidGrammar::DuplicateOperator("log"))));
    }
}
