//! The expression tree and basic structural helpers.

use std::fmt;

/// Unary operators.
///
/// `LogF` is the log-factorial `ln Γ(t + 1)` and `LogDelta0` is the
/// log-domain Kronecker delta at zero (0 at `t = 0`, effectively `-inf`
/// elsewhere), used to express zero-inflated models additively.  `LogGamma`
/// never appears in search candidates; canonicalization rewrites the
/// composite operators `logF`/`logC`/`logB` into it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    LogF,
    Log,
    Exp,
    Abs,
    Sin,
    Cos,
    LogDelta0,
    LogGamma,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 8] = [
        UnaryOp::LogF,
        UnaryOp::Log,
        UnaryOp::Exp,
        UnaryOp::Abs,
        UnaryOp::Sin,
        UnaryOp::Cos,
        UnaryOp::LogDelta0,
        UnaryOp::LogGamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::LogF => "logF",
            UnaryOp::Log => "log",
            UnaryOp::Exp => "exp",
            UnaryOp::Abs => "abs",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::LogDelta0 => "logdelta0",
            UnaryOp::LogGamma => "logGamma",
        }
    }
}

impl fmt::Display for UnaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Binary operators.
///
/// `LogC` is the log binomial coefficient, `LogB` the log beta function and
/// `LogAddExp` the numerically stable `ln(e^u + e^v)` used for mixtures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Pow,
    LogC,
    LogB,
    LogAddExp,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 7] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Pow,
        BinaryOp::LogC,
        BinaryOp::LogB,
        BinaryOp::LogAddExp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Pow => "^",
            BinaryOp::LogC => "logC",
            BinaryOp::LogB => "logB",
            BinaryOp::LogAddExp => "logaddexp",
        }
    }

    /// Infix operators print as `lhs op rhs`; the rest print as calls.
    pub fn is_infix(self) -> bool {
        matches!(
            self,
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Pow
        )
    }

    pub fn is_commutative(self) -> bool {
        matches!(self, BinaryOp::Add | BinaryOp::Mul | BinaryOp::LogAddExp)
    }
}

impl fmt::Display for BinaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An expression over the single variable `x0`.
///
/// Constants are finite `f64`s by construction; the constructors panic on
/// NaN/infinite input so downstream code never has to re-check.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Var,
    Const(f64),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn constant(v: f64) -> Expr {
        assert!(v.is_finite(), "expression constants must be finite: {v}");
        Expr::Const(v)
    }

    pub fn unary(op: UnaryOp, child: Expr) -> Expr {
        Expr::Unary(op, Box::new(child))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Total number of nodes (leaves included).
    pub fn size(&self) -> usize {
        match self {
            Expr::Var | Expr::Const(_) => 1,
            Expr::Unary(_, c) => 1 + c.size(),
            Expr::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Var | Expr::Const(_) => 1,
            Expr::Unary(_, c) => 1 + c.depth(),
            Expr::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Expr::Var | Expr::Const(_))
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Expr::Var => true,
            Expr::Const(_) => false,
            Expr::Unary(_, c) => c.contains_var(),
            Expr::Binary(_, l, r) => l.contains_var() || r.contains_var(),
        }
    }

    /// Borrow the subtree at `index` in preorder (root is 0).
    ///
    /// Panics if `index >= self.size()`; callers index against `size()`.
    pub fn subtree(&self, index: usize) -> &Expr {
        fn walk<'a>(e: &'a Expr, index: usize, seen: &mut usize) -> Option<&'a Expr> {
            if *seen == index {
                return Some(e);
            }
            *seen += 1;
            match e {
                Expr::Var | Expr::Const(_) => None,
                Expr::Unary(_, c) => walk(c, index, seen),
                Expr::Binary(_, l, r) => {
                    walk(l, index, seen).or_else(|| walk(r, index, seen))
                }
            }
        }
        let mut seen = 0;
        walk(self, index, &mut seen)
            .unwrap_or_else(|| panic!("subtree index {index} out of range"))
    }

    /// Return a copy with the preorder-`index` subtree replaced.
    pub fn replace_subtree(&self, index: usize, replacement: &Expr) -> Expr {
        fn walk(e: &Expr, index: usize, seen: &mut usize, rep: &Expr) -> Expr {
            if *seen == index {
                *seen += e.size();
                return rep.clone();
            }
            *seen += 1;
            match e {
                Expr::Var | Expr::Const(_) => e.clone(),
                Expr::Unary(op, c) => Expr::unary(*op, walk(c, index, seen, rep)),
                Expr::Binary(op, l, r) => {
                    let nl = walk(l, index, seen, rep);
                    let nr = walk(r, index, seen, rep);
                    Expr::binary(*op, nl, nr)
                }
            }
        }
        assert!(index < self.size(), "replace index {index} out of range");
        let mut seen = 0;
        walk(self, index, &mut seen, replacement)
    }

    /// Constants in preorder; paired with [`Expr::with_constants`] this is the
    /// parameter-vector view used by the numeric refitter.
    pub fn constant_values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Const(v) = e {
                out.push(*v);
            }
        });
        out
    }

    /// Rebuild with constants replaced in preorder.  Panics if `values`
    /// has the wrong length — the shapes must match by construction.
    pub fn with_constants(&self, values: &[f64]) -> Expr {
        fn walk(e: &Expr, values: &[f64], next: &mut usize) -> Expr {
            match e {
                Expr::Var => Expr::Var,
                Expr::Const(_) => {
                    let v = values[*next];
                    *next += 1;
                    Expr::constant(v)
                }
                Expr::Unary(op, c) => Expr::unary(*op, walk(c, values, next)),
                Expr::Binary(op, l, r) => {
                    let nl = walk(l, values, next);
                    let nr = walk(r, values, next);
                    Expr::binary(*op, nl, nr)
                }
            }
        }
        let mut next = 0;
        let out = walk(self, values, &mut next);
        assert_eq!(next, values.len(), "constant count mismatch");
        out
    }

    /// Preorder visit of every node.
    pub fn visit<'a, F: FnMut(&'a Expr)>(&'a self, f: &mut F) {
        f(self);
        match self {
            Expr::Var | Expr::Const(_) => {}
            Expr::Unary(_, c) => c.visit(f),
            Expr::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }

    /// Occurrences of each operator, used by validity caps and reports.
    pub fn operator_counts(&self) -> OperatorCounts {
        let mut counts = OperatorCounts::default();
        self.visit(&mut |e| match e {
            Expr::Unary(op, _) => counts.bump_unary(*op),
            Expr::Binary(op, _, _) => counts.bump_binary(*op),
            _ => {}
        });
        counts
    }
}

/// Occurrence counts for every operator in an expression.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperatorCounts {
    pub unary: [usize; 8],
    pub binary: [usize; 7],
}

impl OperatorCounts {
    fn bump_unary(&mut self, op: UnaryOp) {
        self.unary[op as usize] += 1;
    }

    fn bump_binary(&mut self, op: BinaryOp) {
        self.binary[op as usize] += 1;
    }

    pub fn unary_count(&self, op: UnaryOp) -> usize {
        self.unary[op as usize]
    }

    pub fn binary_count(&self, op: BinaryOp) -> usize {
        self.binary[op as usize]
    }

    /// Non-zero counts as `(name, count)` pairs in a stable order.
    pub fn nonzero(&self) -> Vec<(&'static str, usize)> {
        let mut out = Vec::new();
        for op in UnaryOp::ALL {
            let n = self.unary_count(op);
            if n > 0 {
                out.push((op.name(), n));
            }
        }
        for op in BinaryOp::ALL {
            let n = self.binary_count(op);
            if n > 0 {
                out.push((op.name(), n));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Expr {
        // logC(10, x0) + x0 * -0.5
        Expr::binary(
            BinaryOp::Add,
            Expr::binary(BinaryOp::LogC, Expr::constant(10.0), Expr::var()),
            Expr::binary(BinaryOp::Mul, Expr::var(), Expr::constant(-0.5)),
        )
    }

    #[test]
    fn size_and_depth() {
        let e = sample();
        assert_eq!(e.size(), 7);
        assert_eq!(e.depth(), 3);
    }

    #[test]
    fn preorder_subtree_indexing() {
        let e = sample();
        assert_eq!(*e.subtree(0), e);
        assert!(matches!(e.subtree(1), Expr::Binary(BinaryOp::LogC, _, _)));
        assert!(matches!(e.subtree(2), Expr::Const(_)));
        assert!(matches!(e.subtree(3), Expr::Var));
        assert!(matches!(e.subtree(4), Expr::Binary(BinaryOp::Mul, _, _)));
        assert!(matches!(e.subtree(6), Expr::Const(_)));
    }

    #[test]
    fn replace_subtree_swaps_only_target() {
        let e = sample();
        let replaced = e.replace_subtree(6, &Expr::constant(2.0));
        assert_eq!(replaced.size(), e.size());
        assert_eq!(*replaced.subtree(6), Expr::Const(2.0));
        assert_eq!(*replaced.subtree(2), Expr::Const(10.0));
    }

    #[test]
    fn constants_round_trip() {
        let e = sample();
        let vals = e.constant_values();
        assert_eq!(vals, vec![10.0, -0.5]);
        let rebuilt = e.with_constants(&[9.0, 0.25]);
        assert_eq!(rebuilt.constant_values(), vec![9.0, 0.25]);
        assert_eq!(rebuilt.size(), e.size());
    }

    #[test]
    #[should_panic(expected = "finite")]
    fn non_finite_constant_rejected() {
        let _ = Expr::constant(f64::NAN);
    }

    #[test]
    fn operator_counts_tally() {
        let counts = sample().operator_counts();
        assert_eq!(counts.binary_count(BinaryOp::Add), 1);
        assert_eq!(counts.binary_count(BinaryOp::LogC), 1);
        assert_eq!(counts.binary_count(BinaryOp::Mul), 1);
        assert_eq!(counts.unary_count(UnaryOp::LogF), 0);
        assert_eq!(
            counts.nonzero(),
            vec![("+", 1), ("*", 1), ("logC", 1)]
        );
    }
}
