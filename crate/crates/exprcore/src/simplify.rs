//! Lightweight algebraic simplification.
//!
//! Deliberately conservative: the search loop calls this on elites every few
//! generations, so rules must never grow the tree and must preserve both
//! evaluation on every valid point and grammar validity (each rewrite
//! replaces a subtree by a constant or by one of its own descendants, and
//! every contextual grammar constraint is closed under taking descendants).

use crate::eval::eval;
use crate::expr::{BinaryOp, Expr};

const MAX_PASSES: usize = 8;

/// Simplify `expr`: constant folding, arithmetic identities, double-negation
/// collapse, and self-cancellation.  Output size never exceeds input size.
pub fn simplify(expr: &Expr) -> Expr {
    let mut current = expr.clone();
    for _ in 0..MAX_PASSES {
        let next = pass(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn pass(e: &Expr) -> Expr {
    match e {
        Expr::Var | Expr::Const(_) => e.clone(),
        Expr::Unary(op, c) => rewrite(&Expr::unary(*op, pass(c))),
        Expr::Binary(op, l, r) => rewrite(&Expr::binary(*op, pass(l), pass(r))),
    }
}

fn as_const(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(v) => Some(*v),
        _ => None,
    }
}

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == v)
}

fn rewrite(e: &Expr) -> Expr {
    // Constant folding: no variable anywhere means the value is fixed.
    if !e.is_leaf() && !e.contains_var() {
        if let Ok(v) = eval(e, 0.0) {
            return Expr::constant(v);
        }
    }

    if let Expr::Binary(op, l, r) = e {
        match op {
            BinaryOp::Add => {
                if is_const(l, 0.0) {
                    return (**r).clone();
                }
                if is_const(r, 0.0) {
                    return (**l).clone();
                }
            }
            BinaryOp::Sub => {
                if is_const(r, 0.0) {
                    return (**l).clone();
                }
                // -(-t) written as 0 - (0 - t)
                if is_const(l, 0.0) {
                    if let Expr::Binary(BinaryOp::Sub, il, ir) = &**r {
                        if is_const(il, 0.0) {
                            return (**ir).clone();
                        }
                    }
                }
                if l == r {
                    return Expr::constant(0.0);
                }
            }
            BinaryOp::Mul => {
                if is_const(l, 1.0) {
                    return (**r).clone();
                }
                if is_const(r, 1.0) {
                    return (**l).clone();
                }
                if is_const(l, 0.0) || is_const(r, 0.0) {
                    return Expr::constant(0.0);
                }
            }
            BinaryOp::Pow => {
                if let Some(v) = as_const(r) {
                    if v == 1.0 {
                        return (**l).clone();
                    }
                    if v == 0.0 {
                        return Expr::constant(1.0);
                    }
                }
                if is_const(l, 1.0) {
                    return Expr::constant(1.0);
                }
            }
            _ => {}
        }
    }

    e.clone()
}
