//! Expression evaluation with explicit domain errors, plus a compiled
//! stack-machine form for the fitting hot path.
//!
//! Search evaluates millions of candidate expressions per run, so the tree
//! walker is kept allocation-free and the inner loops use [`Program`], a
//! flat postorder instruction list with out-of-band constant slots (the
//! numeric refitter mutates constants in place without recompiling).

use thiserror::Error;

use crate::expr::{BinaryOp, Expr, UnaryOp};
use crate::gamma::{ln_factorial, ln_gamma};

/// Stand-in for `ln 0` used by `logdelta0` away from the origin: large enough
/// in magnitude that `exp(LOG_ZERO)` underflows to zero, while staying a
/// normal finite double so downstream arithmetic cannot produce NaN.
pub const LOG_ZERO: f64 = -745.0;

/// Why an evaluation failed.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum DomainError {
    #[error("log requires a positive argument, got {arg}")]
    Log { arg: f64 },
    #[error("logF requires an argument > -1, got {arg}")]
    LogF { arg: f64 },
    #[error("logC requires n > -1, k > -1 and n - k > -1, got n = {n}, k = {k}")]
    LogC { n: f64, k: f64 },
    #[error("logB requires positive arguments, got a = {a}, b = {b}")]
    LogB { a: f64, b: f64 },
    #[error("logGamma requires a positive argument, got {arg}")]
    LogGamma { arg: f64 },
    #[error("{base}^{exponent} is undefined over the reals")]
    Pow { base: f64, exponent: f64 },
    #[error("non-finite intermediate produced by `{op}`")]
    NonFinite { op: &'static str },
}

#[inline]
fn apply_unary(op: UnaryOp, t: f64) -> Result<f64, DomainError> {
    let v = match op {
        UnaryOp::LogF => {
            if t <= -1.0 {
                return Err(DomainError::LogF { arg: t });
            }
            ln_factorial(t)
        }
        UnaryOp::Log => {
            if t <= 0.0 {
                return Err(DomainError::Log { arg: t });
            }
            t.ln()
        }
        UnaryOp::Exp => t.exp(),
        UnaryOp::Abs => t.abs(),
        UnaryOp::Sin => t.sin(),
        UnaryOp::Cos => t.cos(),
        UnaryOp::LogDelta0 => {
            if t == 0.0 {
                0.0
            } else {
                LOG_ZERO
            }
        }
        UnaryOp::LogGamma => {
            if t <= 0.0 {
                return Err(DomainError::LogGamma { arg: t });
            }
            ln_gamma(t)
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DomainError::NonFinite { op: op.name() })
    }
}

#[inline]
fn apply_binary(op: BinaryOp, l: f64, r: f64) -> Result<f64, DomainError> {
    let v = match op {
        BinaryOp::Add => l + r,
        BinaryOp::Sub => l - r,
        BinaryOp::Mul => l * r,
        BinaryOp::Pow => {
            let v = l.powf(r);
            if v.is_nan() {
                // Negative base with fractional exponent; IEEE pow already
                // handles integer exponents and 0^0 = 1 the way we want.
                return Err(DomainError::Pow {
                    base: l,
                    exponent: r,
                });
            }
            v
        }
        BinaryOp::LogC => {
            if l <= -1.0 || r <= -1.0 || l - r <= -1.0 {
                return Err(DomainError::LogC { n: l, k: r });
            }
            ln_factorial(l) - ln_factorial(r) - ln_factorial(l - r)
        }
        BinaryOp::LogB => {
            if l <= 0.0 || r <= 0.0 {
                return Err(DomainError::LogB { a: l, b: r });
            }
            ln_gamma(l) + ln_gamma(r) - ln_gamma(l + r)
        }
        BinaryOp::LogAddExp => {
            let m = l.max(r);
            m + (-(l - r).abs()).exp().ln_1p()
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DomainError::NonFinite { op: op.name() })
    }
}

/// Evaluate `expr` at `x0 = x`.
///
/// Every intermediate must stay finite; domain violations surface as typed
/// errors rather than NaN propagation so reports can explain rejections.
pub fn eval(expr: &Expr, x: f64) -> Result<f64, DomainError> {
    match expr {
        Expr::Var => Ok(x),
        Expr::Const(v) => Ok(*v),
        Expr::Unary(op, c) => apply_unary(*op, eval(c, x)?),
        Expr::Binary(op, l, r) => apply_binary(*op, eval(l, x)?, eval(r, x)?),
    }
}

/// Evaluate, collapsing domain errors to `None`.
#[inline]
pub fn eval_opt(expr: &Expr, x: f64) -> Option<f64> {
    eval(expr, x).ok()
}

#[derive(Clone, Copy, Debug)]
enum Instr {
    Var,
    Const(u16),
    Un(UnaryOp),
    Bin(BinaryOp),
}

/// A compiled expression: postorder instructions over a value stack.
///
/// Constants live in a separate slot table, ordered exactly like
/// [`Expr::constant_values`], so a refitter can update parameters between
/// evaluations without touching the instruction stream.
#[derive(Clone, Debug)]
pub struct Program {
    code: Vec<Instr>,
    consts: Vec<f64>,
    stack_need: usize,
}

impl Program {
    pub fn compile(expr: &Expr) -> Program {
        fn emit(e: &Expr, code: &mut Vec<Instr>, consts: &mut Vec<f64>) {
            match e {
                Expr::Var => code.push(Instr::Var),
                Expr::Const(v) => {
                    let slot = consts.len();
                    assert!(slot <= u16::MAX as usize, "too many constants");
                    consts.push(*v);
                    code.push(Instr::Const(slot as u16));
                }
                Expr::Unary(op, c) => {
                    emit(c, code, consts);
                    code.push(Instr::Un(*op));
                }
                Expr::Binary(op, l, r) => {
                    emit(l, code, consts);
                    emit(r, code, consts);
                    code.push(Instr::Bin(*op));
                }
            }
        }
        let mut code = Vec::with_capacity(expr.size());
        let mut consts = Vec::new();
        emit(expr, &mut code, &mut consts);

        // Maximum stack depth is determined statically.
        let mut depth = 0usize;
        let mut need = 0usize;
        for instr in &code {
            match instr {
                Instr::Var | Instr::Const(_) => depth += 1,
                Instr::Un(_) => {}
                Instr::Bin(_) => depth -= 1,
            }
            need = need.max(depth);
        }
        Program {
            code,
            consts,
            stack_need: need,
        }
    }

    pub fn const_count(&self) -> usize {
        self.consts.len()
    }

    pub fn consts(&self) -> &[f64] {
        &self.consts
    }

    /// Overwrite the constant slots (ordering matches
    /// [`Expr::constant_values`]).
    pub fn set_consts(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.consts.len(), "constant count mismatch");
        self.consts.copy_from_slice(values);
    }

    /// Stack capacity required by [`Program::eval_with`].
    pub fn stack_need(&self) -> usize {
        self.stack_need
    }

    /// Evaluate using a caller-provided stack buffer (cleared on entry);
    /// reusing one buffer across calls keeps the loss loop allocation-free.
    pub fn eval_with(&self, x: f64, stack: &mut Vec<f64>) -> Option<f64> {
        stack.clear();
        stack.reserve(self.stack_need);
        for instr in &self.code {
            match *instr {
                Instr::Var => stack.push(x),
                Instr::Const(slot) => stack.push(self.consts[slot as usize]),
                Instr::Un(op) => {
                    let t = *stack.last()?;
                    let v = apply_unary(op, t).ok()?;
                    *stack.last_mut()? = v;
                }
                Instr::Bin(op) => {
                    let r = stack.pop()?;
                    let l = *stack.last()?;
                    let v = apply_binary(op, l, r).ok()?;
                    *stack.last_mut()? = v;
                }
            }
        }
        stack.pop()
    }

    /// Convenience wrapper that allocates its own stack.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let mut stack = Vec::with_capacity(self.stack_need);
        self.eval_with(x, &mut stack)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logf_x() -> Expr {
        Expr::unary(UnaryOp::LogF, Expr::var())
    }

    #[test]
    fn log_factorial_of_four() {
        let v = eval(&logf_x(), 4.0).unwrap();
        assert!((v - 3.178_053_830_347_945_8).abs() < 1e-12);
    }

    #[test]
    fn log_binomial_coefficient() {
        // logC(10, 3) = ln 120
        let e = Expr::binary(BinaryOp::LogC, Expr::constant(10.0), Expr::var());
        let v = eval(&e, 3.0).unwrap();
        assert!((v - 4.787_491_742_782_046).abs() < 1e-12);
    }

    #[test]
    fn log_beta_small_integers() {
        // logB(3, 2) = ln(Γ3·Γ2/Γ5) = ln(1/12)
        let e = Expr::binary(BinaryOp::LogB, Expr::constant(3.0), Expr::constant(2.0));
        let v = eval(&e, 0.0).unwrap();
        assert!((v + 2.484_906_649_788_000_4).abs() < 1e-12);
    }

    #[test]
    fn logaddexp_of_log_probabilities() {
        // ln(e^{ln 0.3} + e^{ln 0.7}) = ln 1 = 0
        let e = Expr::binary(
            BinaryOp::LogAddExp,
            Expr::constant(0.3f64.ln()),
            Expr::constant(0.7f64.ln()),
        );
        assert!(eval(&e, 0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn logaddexp_is_stable_for_extreme_gaps() {
        let e = Expr::binary(
            BinaryOp::LogAddExp,
            Expr::constant(-700.0),
            Expr::constant(3.0),
        );
        let v = eval(&e, 0.0).unwrap();
        assert!((v - 3.0).abs() < 1e-15);
    }

    #[test]
    fn logdelta0_indicator() {
        let e = Expr::unary(UnaryOp::LogDelta0, Expr::var());
        assert_eq!(eval(&e, 0.0).unwrap(), 0.0);
        assert_eq!(eval(&e, 3.0).unwrap(), LOG_ZERO);
        assert_eq!(eval(&e, -2.0).unwrap(), LOG_ZERO);
    }

    #[test]
    fn domain_errors_are_typed() {
        let log_x = Expr::unary(UnaryOp::Log, Expr::var());
        assert_eq!(eval(&log_x, 0.0), Err(DomainError::Log { arg: 0.0 }));

        assert_eq!(
            eval(&logf_x(), -1.5),
            Err(DomainError::LogF { arg: -1.5 })
        );

        let logc = Expr::binary(BinaryOp::LogC, Expr::constant(10.0), Expr::var());
        assert!(matches!(
            eval(&logc, 11.0),
            Err(DomainError::LogC { .. })
        ));

        let logb = Expr::binary(BinaryOp::LogB, Expr::var(), Expr::constant(2.0));
        assert!(matches!(eval(&logb, 0.0), Err(DomainError::LogB { .. })));

        let pow = Expr::binary(BinaryOp::Pow, Expr::constant(-2.0), Expr::constant(0.5));
        assert!(matches!(eval(&pow, 0.0), Err(DomainError::Pow { .. })));
    }

    #[test]
    fn integer_powers_of_negative_bases_are_fine() {
        let e = Expr::binary(BinaryOp::Pow, Expr::constant(-2.0), Expr::constant(3.0));
        assert_eq!(eval(&e, 0.0).unwrap(), -8.0);
        let zz = Expr::binary(BinaryOp::Pow, Expr::constant(0.0), Expr::constant(0.0));
        assert_eq!(eval(&zz, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn overflow_is_a_domain_error() {
        let e = Expr::unary(UnaryOp::Exp, Expr::constant(710.0));
        assert_eq!(
            eval(&e, 0.0),
            Err(DomainError::NonFinite { op: "exp" })
        );
        let zero_pow_neg = Expr::binary(BinaryOp::Pow, Expr::constant(0.0), Expr::constant(-1.0));
        assert!(matches!(
            eval(&zero_pow_neg, 0.0),
            Err(DomainError::NonFinite { .. })
        ));
    }

    #[test]
    fn program_matches_tree_walker() {
        let e = Expr::binary(
            BinaryOp::Add,
            Expr::binary(BinaryOp::LogC, Expr::constant(10.0), Expr::var()),
            Expr::binary(BinaryOp::Mul, Expr::var(), Expr::constant(-0.5)),
        );
        let prog = Program::compile(&e);
        assert_eq!(prog.const_count(), 2);
        let mut stack = Vec::new();
        for x in 0..=10 {
            let x = x as f64;
            assert_eq!(prog.eval_with(x, &mut stack), eval_opt(&e, x));
        }
        // Out-of-domain points collapse to None in both paths.
        assert_eq!(prog.eval(11.0), None);
        assert_eq!(eval_opt(&e, 11.0), None);
    }

    #[test]
    fn program_constant_slots_follow_preorder() {
        let e = Expr::binary(
            BinaryOp::Add,
            Expr::binary(BinaryOp::LogC, Expr::constant(10.0), Expr::var()),
            Expr::binary(BinaryOp::Mul, Expr::var(), Expr::constant(-0.5)),
        );
        let mut prog = Program::compile(&e);
        assert_eq!(prog.consts(), &e.constant_values()[..]);
        prog.set_consts(&[8.0, 0.25]);
        let expected = eval(&e.with_constants(&[8.0, 0.25]), 2.0).unwrap();
        assert!((prog.eval(2.0).unwrap() - expected).abs() < 1e-15);
    }
}
