//! Structural grammar rules that keep search inside plausible log-PMF forms.
//!
//! Three rules, checked purely syntactically:
//!
//! * **L** — arguments of the special operators `logF`/`logC`/`logB` and of
//!   `sin`/`cos` must be affine in `x0`;
//! * **A** — the exponent child of `^` must be a lone variable or constant;
//! * **N** — special operators may not appear anywhere inside an argument of
//!   another special operator.
//!
//! Two readings of "affine" are supported.  The strict (default) test
//! accepts exactly the trees built from variables, constants, `+`, `-`, and
//! `*` nodes with at least one constant operand.  The loose test only
//! forbids `*` and `^` as the argument's root, leaving deeper structure
//! unconstrained; the two are deliberately incomparable because published
//! descriptions of the restriction differ in exactly this way.

use std::fmt;

use crate::expr::{BinaryOp, Expr, UnaryOp};

/// Which affinity test rule L applies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AffineMode {
    #[default]
    Strict,
    Loose,
}

/// Grammar configuration; the special-op set itself is fixed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GrammarConfig {
    pub affine: AffineMode,
}

impl GrammarConfig {
    pub fn strict() -> Self {
        GrammarConfig {
            affine: AffineMode::Strict,
        }
    }

    pub fn loose() -> Self {
        GrammarConfig {
            affine: AffineMode::Loose,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrammarRule {
    L,
    A,
    N,
}

impl fmt::Display for GrammarRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrammarRule::L => f.write_str("L (affine argument)"),
            GrammarRule::A => f.write_str("A (atomic exponent)"),
            GrammarRule::N => f.write_str("N (no special-op nesting)"),
        }
    }
}

/// A single rule violation: which rule, at which node (child-index path from
/// the root), and the operator that owns the offending argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrammarViolation {
    pub rule: GrammarRule,
    pub path: Vec<usize>,
    pub operator: &'static str,
}

impl fmt::Display for GrammarViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} violated by `{}` at node ", self.rule, self.operator)?;
        if self.path.is_empty() {
            f.write_str("<root>")
        } else {
            let rendered: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
            f.write_str(&rendered.join("."))
        }
    }
}

fn is_special(e: &Expr) -> bool {
    matches!(
        e,
        Expr::Unary(UnaryOp::LogF, _)
            | Expr::Unary(UnaryOp::LogGamma, _)
            | Expr::Binary(BinaryOp::LogC, _, _)
            | Expr::Binary(BinaryOp::LogB, _, _)
    )
}

fn contains_special(e: &Expr) -> bool {
    if is_special(e) {
        return true;
    }
    match e {
        Expr::Var | Expr::Const(_) => false,
        Expr::Unary(_, c) => contains_special(c),
        Expr::Binary(_, l, r) => contains_special(l) || contains_special(r),
    }
}

/// Strict affinity: {Var, Const, +, -} plus `*` with a constant operand.
fn is_affine_strict(e: &Expr) -> bool {
    match e {
        Expr::Var | Expr::Const(_) => true,
        Expr::Binary(BinaryOp::Add, l, r) | Expr::Binary(BinaryOp::Sub, l, r) => {
            is_affine_strict(l) && is_affine_strict(r)
        }
        Expr::Binary(BinaryOp::Mul, l, r) => {
            (matches!(**l, Expr::Const(_)) || matches!(**r, Expr::Const(_)))
                && is_affine_strict(l)
                && is_affine_strict(r)
        }
        _ => false,
    }
}

/// Loose test: only the argument's root form is restricted.
fn is_affine_loose(e: &Expr) -> bool {
    !matches!(
        e,
        Expr::Binary(BinaryOp::Mul, _, _) | Expr::Binary(BinaryOp::Pow, _, _)
    )
}

fn argument_ok(e: &Expr, mode: AffineMode) -> bool {
    match mode {
        AffineMode::Strict => is_affine_strict(e),
        AffineMode::Loose => is_affine_loose(e),
    }
}

/// Check `expr` against the grammar; an empty list means valid.
pub fn check_grammar(expr: &Expr, config: GrammarConfig) -> Vec<GrammarViolation> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    walk(expr, config, &mut path, &mut out);
    out
}

fn walk(
    e: &Expr,
    config: GrammarConfig,
    path: &mut Vec<usize>,
    out: &mut Vec<GrammarViolation>,
) {
    match e {
        Expr::Var | Expr::Const(_) => {}
        Expr::Unary(op, c) => {
            let restricted = matches!(
                op,
                UnaryOp::LogF | UnaryOp::LogGamma | UnaryOp::Sin | UnaryOp::Cos
            );
            if restricted {
                // Rule N only binds special ops; sin/cos args may hold them.
                let special = matches!(op, UnaryOp::LogF | UnaryOp::LogGamma);
                if special && contains_special(c) {
                    out.push(GrammarViolation {
                        rule: GrammarRule::N,
                        path: path.clone(),
                        operator: op.name(),
                    });
                }
                if !argument_ok(c, config.affine) {
                    out.push(GrammarViolation {
                        rule: GrammarRule::L,
                        path: path.clone(),
                        operator: op.name(),
                    });
                }
            }
            path.push(0);
            walk(c, config, path, out);
            path.pop();
        }
        Expr::Binary(op, l, r) => {
            match op {
                BinaryOp::LogC | BinaryOp::LogB => {
                    for arg in [l, r] {
                        if contains_special(arg) {
                            out.push(GrammarViolation {
                                rule: GrammarRule::N,
                                path: path.clone(),
                                operator: op.name(),
                            });
                        }
                        if !argument_ok(arg, config.affine) {
                            out.push(GrammarViolation {
                                rule: GrammarRule::L,
                                path: path.clone(),
                                operator: op.name(),
                            });
                        }
                    }
                }
                BinaryOp::Pow => {
                    if !r.is_leaf() {
                        out.push(GrammarViolation {
                            rule: GrammarRule::A,
                            path: path.clone(),
                            operator: op.name(),
                        });
                    }
                }
                _ => {}
            }
            path.push(0);
            walk(l, config, path, out);
            path.pop();
            path.push(1);
            walk(r, config, path, out);
            path.pop();
        }
    }
}
