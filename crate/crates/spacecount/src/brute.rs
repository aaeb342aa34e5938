//! Exhaustive enumeration oracle: walks every admissible tree
//! individually (depth-first, streaming, O(depth) memory) so small-budget
//! counts can be checked against the DP without sharing its arithmetic.

use crate::grammar::{Commutativity, Constraint, CountMode, CountingGrammar, InvalidGrammar};
use exprcore::{format_expr, BinaryOp, Expr};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    General,
    Affine,
}

/// Visit every admissible tree of exactly `cost` in role `role`.
fn emit(g: &CountingGrammar, role: Role, cost: u32, f: &mut dyn FnMut(&Expr)) {
    if cost == g.var_cost {
        f(&Expr::var());
    }
    if cost == g.const_cost {
        // Constants are a single abstract leaf symbol; the value is
        // irrelevant to counting.
        f(&Expr::constant(1.0));
    }

    if role == Role::Affine {
        for &(op, k) in &g.binary {
            if op != BinaryOp::Add && op != BinaryOp::Sub {
                continue;
            }
            if cost > k + 1 {
                emit_binary(g, op, Role::Affine, Role::Affine, cost - k, f);
            }
        }
        return;
    }

    for &(op, k) in &g.unary {
        if cost > k {
            let child_role = match g.constraint {
                Constraint::Full => Role::Affine,
                _ => Role::General,
            };
            emit(g, child_role, cost - k, &mut |child| {
                f(&Expr::unary(op, child.clone()));
            });
        }
    }

    for &(op, k) in &g.binary {
        if cost <= k + 1 {
            continue;
        }
        let rem = cost - k;
        match op {
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::LogAddExp => {
                emit_binary(g, op, Role::General, Role::General, rem, f);
            }
            BinaryOp::Pow => match g.constraint {
                Constraint::None => emit_binary(g, op, Role::General, Role::General, rem, f),
                _ => {
                    // Atomic exponent: enumerate leaf exponents directly.
                    for exponent in [Expr::var(), Expr::constant(1.0)] {
                        let leaf_cost = match exponent {
                            Expr::Var => g.var_cost,
                            _ => g.const_cost,
                        };
                        if rem > leaf_cost {
                            emit(g, Role::General, rem - leaf_cost, &mut |base| {
                                f(&Expr::binary(op, base.clone(), exponent.clone()));
                            });
                        }
                    }
                }
            },
            BinaryOp::LogC | BinaryOp::LogB => {
                let role = match g.constraint {
                    Constraint::Full => Role::Affine,
                    _ => Role::General,
                };
                emit_binary(g, op, role, role, rem, f);
            }
        }
    }
}

/// Enumerate ordered child pairs summing to `rem`; under merged
/// commutativity, keep one representative of each unordered pair for the
/// commutative operators (serialized-form comparison, diagonal kept).
fn emit_binary(
    g: &CountingGrammar,
    op: BinaryOp,
    left_role: Role,
    right_role: Role,
    rem: u32,
    f: &mut dyn FnMut(&Expr),
) {
    let merge = g.commutativity == Commutativity::Merged
        && (op == BinaryOp::Add || op == BinaryOp::Mul);
    for c1 in 1..rem {
        let c2 = rem - c1;
        emit(g, left_role, c1, &mut |a| {
            let a_key = if merge { Some(format_expr(a)) } else { None };
            let a = a.clone();
            emit(g, right_role, c2, &mut |b| {
                if let Some(key) = &a_key {
                    if key.as_str() > format_expr(b).as_str() {
                        return;
                    }
                }
                f(&Expr::binary(op, a.clone(), b.clone()));
            });
        });
    }
}

/// Visit every admissible tree under the grammar (honoring `count_mode`).
pub fn for_each_expression(
    g: &CountingGrammar,
    mut f: impl FnMut(&Expr),
) -> Result<(), InvalidGrammar> {
    g.validate()?;
    match g.count_mode {
        CountMode::Eq => emit(g, Role::General, g.budget, &mut f),
        CountMode::Le => {
            for c in 1..=g.budget {
                emit(g, Role::General, c, &mut f);
            }
        }
    }
    Ok(())
}

/// Count admissible trees by exhaustive enumeration.
pub fn enumerate_count(g: &CountingGrammar) -> Result<u64, InvalidGrammar> {
    let mut n = 0u64;
    for_each_expression(g, |_| n += 1)?;
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use exprcore::Profile;

    #[test]
    fn budget_three_trees_are_the_expected_shapes() {
        let g = CountingGrammar {
            unary: vec![],
            binary: vec![(BinaryOp::Add, 1)],
            var_cost: 1,
            const_cost: 1,
            budget: 3,
            constraint: Constraint::None,
            count_mode: CountMode::Le,
            commutativity: Commutativity::Distinct,
        };
        let mut seen = Vec::new();
        for_each_expression(&g, |e| seen.push(format_expr(e))).unwrap();
        seen.sort();
        assert_eq!(seen, vec!["1", "1 + 1", "1 + x0", "x0", "x0 + 1", "x0 + x0"]);
    }

    #[test]
    fn merged_mode_drops_mirrored_additions() {
        let g = CountingGrammar {
            unary: vec![],
            binary: vec![(BinaryOp::Add, 1)],
            var_cost: 1,
            const_cost: 1,
            budget: 3,
            constraint: Constraint::None,
            count_mode: CountMode::Le,
            commutativity: Commutativity::Merged,
        };
        let mut seen = Vec::new();
        for_each_expression(&g, |e| seen.push(format_expr(e))).unwrap();
        seen.sort();
        assert_eq!(seen, vec!["1", "1 + 1", "1 + x0", "x0", "x0 + x0"]);
    }

    #[test]
    fn full_constraint_restricts_unary_arguments() {
        // Uniform costs, budget 4: log(t) admits only affine t of cost 3,
        // i.e. {x+x, x+c, c+x, c+c, and the − versions, plus leaves at
        // cost accounting} — no log(log(x)) or log(x*x).
        let g = CountingGrammar::reference(4, &Profile::uniform(), Constraint::Full);
        let mut nested = 0;
        for_each_expression(&g, |e| {
            if let Expr::Unary(_, inner) = e {
                if matches!(**inner, Expr::Unary(..)) {
                    nested += 1;
                }
                if matches!(
                    **inner,
                    Expr::Binary(BinaryOp::Mul | BinaryOp::Pow | BinaryOp::LogC | BinaryOp::LogB, ..)
                ) {
                    nested += 1;
                }
            }
        })
        .unwrap();
        assert_eq!(nested, 0);
    }

    #[test]
    fn atomic_constraint_restricts_exponents() {
        let g = CountingGrammar::reference(6, &Profile::uniform(), Constraint::Atomic);
        for_each_expression(&g, |e| {
            let mut check = |node: &Expr| {
                if let Expr::Binary(BinaryOp::Pow, _, exponent) = node {
                    assert!(exponent.is_leaf(), "non-leaf exponent in {}", format_expr(e));
                }
            };
            e.visit(&mut check);
        })
        .unwrap();
    }
}
