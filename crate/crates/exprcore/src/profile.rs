//! Complexity profiles: per-operator symbolic costs.
//!
//! A profile prices every node of an expression; search runs one population
//! group per profile so that differently-shaped solutions (combinatorial
//! vs. smooth) compete under a budget that favours their natural operators.
//! The two standard non-uniform profiles assign a low cost of 1 to a small
//! favoured set and a high cost of 5 to everything else.

use thiserror::Error;

use crate::expr::{BinaryOp, Expr, UnaryOp};

pub const LOW_COST: u32 = 1;
pub const HIGH_COST: u32 = 5;

/// Per-operator cost table.  Entries are optional so user-supplied profiles
/// may be partial; pricing an expression that uses an unpriced operator is
/// an error rather than a silent default.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub name: String,
    unary: [Option<u32>; 8],
    binary: [Option<u32>; 7],
    pub var_cost: u32,
    pub const_cost: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("operator `{operator}` has no cost entry in profile `{profile}`")]
pub struct UnknownOperator {
    pub operator: &'static str,
    pub profile: String,
}

impl Profile {
    pub fn new(name: impl Into<String>, var_cost: u32, const_cost: u32) -> Profile {
        assert!(var_cost > 0 && const_cost > 0, "leaf costs must be positive");
        Profile {
            name: name.into(),
            unary: [None; 8],
            binary: [None; 7],
            var_cost,
            const_cost,
        }
    }

    pub fn with_unary(mut self, op: UnaryOp, cost: u32) -> Profile {
        assert!(cost > 0, "operator costs must be positive");
        self.unary[op as usize] = Some(cost);
        self
    }

    pub fn with_binary(mut self, op: BinaryOp, cost: u32) -> Profile {
        assert!(cost > 0, "operator costs must be positive");
        self.binary[op as usize] = Some(cost);
        self
    }

    fn total(name: &str, low_unary: &[UnaryOp], low_binary: &[BinaryOp]) -> Profile {
        let mut p = Profile::new(name, 1, 1);
        for op in UnaryOp::ALL {
            let cost = if low_unary.contains(&op) {
                LOW_COST
            } else {
                HIGH_COST
            };
            p = p.with_unary(op, cost);
        }
        for op in BinaryOp::ALL {
            let cost = if low_binary.contains(&op) {
                LOW_COST
            } else {
                HIGH_COST
            };
            p = p.with_binary(op, cost);
        }
        p
    }

    /// Every operator costs 1.
    pub fn uniform() -> Profile {
        let mut p = Profile::new("uniform", 1, 1);
        for op in UnaryOp::ALL {
            p = p.with_unary(op, 1);
        }
        for op in BinaryOp::ALL {
            p = p.with_binary(op, 1);
        }
        p
    }

    /// Combinatorial profile: cheap logC/logB and +/−.
    pub fn profile1() -> Profile {
        Profile::total(
            "profile1",
            &[],
            &[BinaryOp::LogC, BinaryOp::LogB, BinaryOp::Add, BinaryOp::Sub],
        )
    }

    /// Smooth profile: cheap logF/log and ×/+/−.
    pub fn profile2() -> Profile {
        Profile::total(
            "profile2",
            &[UnaryOp::LogF, UnaryOp::Log],
            &[BinaryOp::Mul, BinaryOp::Add, BinaryOp::Sub],
        )
    }

    /// Look up a standard profile by name.
    pub fn by_name(name: &str) -> Option<Profile> {
        match name {
            "uniform" => Some(Profile::uniform()),
            "profile1" => Some(Profile::profile1()),
            "profile2" => Some(Profile::profile2()),
            _ => None,
        }
    }

    pub fn unary_cost(&self, op: UnaryOp) -> Option<u32> {
        self.unary[op as usize]
    }

    pub fn binary_cost(&self, op: BinaryOp) -> Option<u32> {
        self.binary[op as usize]
    }
}

/// Total symbolic cost of `expr` under `profile`.
pub fn complexity(expr: &Expr, profile: &Profile) -> Result<u32, UnknownOperator> {
    let missing = |operator: &'static str| UnknownOperator {
        operator,
        profile: profile.name.clone(),
    };
    match expr {
        Expr::Var => Ok(profile.var_cost),
        Expr::Const(_) => Ok(profile.const_cost),
        Expr::Unary(op, c) => {
            let cost = profile.unary_cost(*op).ok_or_else(|| missing(op.name()))?;
            Ok(cost + complexity(c, profile)?)
        }
        Expr::Binary(op, l, r) => {
            let cost = profile.binary_cost(*op).ok_or_else(|| missing(op.name()))?;
            Ok(cost + complexity(l, profile)? + complexity(r, profile)?)
        }
    }
}
