//! Exact counting by dynamic programming over (cost, syntactic role).
//!
//! Two roles suffice: `general` (any admissible subtree) and `affine`
//! (the counting-affine sub-language over {variable, constant, +, −}).
//! The remaining context conditions collapse: an atomic exponent is a
//! direct two-way leaf choice folded into the `^` production, and the
//! special-operator-free condition is implied by the affine role, which
//! admits no special operators at all.

use crate::grammar::{Commutativity, Constraint, CountMode, CountingGrammar, InvalidGrammar};
use exprcore::BinaryOp;
use num_bigint::BigUint;
use num_traits::Zero;

/// Ordered convolution Σ_{c₁+c₂=rem} x[c₁]·y[c₂] with c₁, c₂ ≥ 1.
fn ordered(x: &[BigUint], y: &[BigUint], rem: usize) -> BigUint {
    let mut acc = BigUint::zero();
    for c1 in 1..rem {
        let c2 = rem - c1;
        if !x[c1].is_zero() && !y[c2].is_zero() {
            acc += &x[c1] * &y[c2];
        }
    }
    acc
}

/// Unordered (commutative-merged) pairing of a role with itself:
/// (ordered + diagonal)/2, where the diagonal counts the pairs using the
/// same tree on both sides. The numerator is always even.
fn unordered(x: &[BigUint], rem: usize) -> BigUint {
    let mut acc = ordered(x, x, rem);
    if rem % 2 == 0 {
        acc += &x[rem / 2];
    }
    acc / 2u32
}

/// Per-exact-cost counts for the `general` role, indices 0..=budget.
fn build_table(g: &CountingGrammar) -> Vec<BigUint> {
    let b = g.budget as usize;
    let mut general = vec![BigUint::zero(); b + 1];
    let mut affine = vec![BigUint::zero(); b + 1];
    let merged = g.commutativity == Commutativity::Merged;

    for c in 1..=b {
        // Leaves participate in both roles.
        let mut leaves = 0u32;
        if c == g.var_cost as usize {
            leaves += 1;
        }
        if c == g.const_cost as usize {
            leaves += 1;
        }
        if leaves > 0 {
            general[c] += leaves;
            affine[c] += leaves;
        }

        // Affine role: + and − over affine children.
        for &(op, k) in &g.binary {
            if op != BinaryOp::Add && op != BinaryOp::Sub {
                continue;
            }
            let k = k as usize;
            if c > k + 1 {
                let rem = c - k;
                let inc = if merged && op == BinaryOp::Add {
                    unordered(&affine, rem)
                } else {
                    ordered(&affine, &affine, rem)
                };
                affine[c] += inc;
            }
        }

        // General role: unary productions.
        for &(_, k) in &g.unary {
            let k = k as usize;
            if c > k {
                let child = c - k;
                let inc = match g.constraint {
                    Constraint::Full => affine[child].clone(),
                    _ => general[child].clone(),
                };
                general[c] += inc;
            }
        }

        // General role: binary productions.
        for &(op, k) in &g.binary {
            let k = k as usize;
            if c <= k + 1 {
                continue;
            }
            let rem = c - k;
            let contribution = match op {
                BinaryOp::Add | BinaryOp::Mul => {
                    if merged {
                        unordered(&general, rem)
                    } else {
                        ordered(&general, &general, rem)
                    }
                }
                BinaryOp::Sub => ordered(&general, &general, rem),
                BinaryOp::Pow => match g.constraint {
                    Constraint::None => ordered(&general, &general, rem),
                    // Atomic exponent: general base times a two-way
                    // (variable | constant) leaf choice.
                    _ => {
                        let mut acc = BigUint::zero();
                        for leaf in [g.var_cost as usize, g.const_cost as usize] {
                            if rem > leaf {
                                acc += &general[rem - leaf];
                            }
                        }
                        acc
                    }
                },
                BinaryOp::LogC | BinaryOp::LogB => match g.constraint {
                    Constraint::Full => ordered(&affine, &affine, rem),
                    _ => ordered(&general, &general, rem),
                },
                BinaryOp::LogAddExp => ordered(&general, &general, rem),
            };
            general[c] += contribution;
        }
    }
    general
}

/// Exact number of admissible trees under the grammar's budget,
/// constraint level, and counting conventions.
pub fn count_expressions(g: &CountingGrammar) -> Result<BigUint, InvalidGrammar> {
    g.validate()?;
    let general = build_table(g);
    let total = match g.count_mode {
        CountMode::Eq => general[g.budget as usize].clone(),
        CountMode::Le => {
            let mut acc = BigUint::zero();
            for c in 1..=g.budget as usize {
                acc += &general[c];
            }
            acc
        }
    };
    Ok(total)
}
