//! Mixture and zero-inflation structure extraction.
//!
//! `logaddexp` is how the grammar spells a mixture: `ln(w₁e^{f₁} + w₂e^{f₂})
//! = logaddexp(ln w₁ + f₁, ln w₂ + f₂)`. Canonicalization flattens nested
//! applications into one branch list, and this module reads component
//! structure off that list — branch intercepts carry the log-weights, a
//! `logdelta0` branch is a zero-inflation atom, and a shared combinatorial
//! prefix outside the `logaddexp` (the `ln C(n,x)` of a binomial mixture)
//! scales every component alike.

use exprcore::{canonicalize, decompose, Branch, BranchKind, Expr, Term, UnaryOp};
use thiserror::Error;

/// The expression has no usable `logaddexp` structure.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("expression contains no logaddexp structure")]
pub struct NotMixture;

/// One extracted mixture branch.
#[derive(Clone, Debug)]
pub struct ExtractedBranch {
    /// The branch expression exactly as it sits inside the `logaddexp`.
    pub expr: Expr,
    pub kind: BranchKind,
    /// The branch intercept for affine and delta branches — the raw
    /// log-weight before any shared normalization. `None` for general
    /// branches, whose weight is not a single constant.
    pub log_weight: Option<f64>,
}

/// Zero-inflation reading of a mixture: one `logdelta0` branch plus a base
/// distribution.
#[derive(Clone, Debug)]
pub struct ZeroInflationView {
    /// Atom mass π recovered from the delta branch constant.
    pub pi: f64,
    /// Log-PMF of the base component: shared remainder plus the non-delta
    /// branches, with the `ln(1−π)` weight removed.
    pub base_expr: Expr,
}

/// Homogeneous binomial-mixture reading: shared `ln C(n,x)` outside the
/// `logaddexp`, affine branches inside.
#[derive(Clone, Debug)]
pub struct BinomialMixtureView {
    pub n: f64,
    /// `(pᵢ, wᵢ)` sorted by pᵢ ascending, with Σwᵢ = 1.
    pub components: Vec<(f64, f64)>,
}

/// Output of [`extract_mixture`].
#[derive(Clone, Debug)]
pub struct MixtureExtraction {
    /// x-dependent additive remainder outside the `logaddexp`, if any.
    pub shared: Vec<Term>,
    /// Constant additive remainder outside the `logaddexp`.
    pub shared_constant: f64,
    pub branches: Vec<ExtractedBranch>,
    /// Present when the branch list matches the zero-inflation pattern.
    pub zero_inflation: Option<ZeroInflationView>,
    /// Present when the branch list matches the binomial-mixture pattern.
    pub binomial_mixture: Option<BinomialMixtureView>,
}

impl MixtureExtraction {
    /// Recompose `shared_constant + Σ shared + logaddexp(branches)` for
    /// round-trip checks against the original expression.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let mut total = self.shared_constant;
        for term in &self.shared {
            total += term.eval(x)?;
        }
        let mut acc = f64::NEG_INFINITY;
        for branch in &self.branches {
            let v = exprcore::eval_opt(&branch.expr, x)?;
            acc = logaddexp(acc, v);
        }
        Some(total + acc)
    }
}

fn logaddexp(u: f64, v: f64) -> f64 {
    if u == f64::NEG_INFINITY {
        return v;
    }
    if v == f64::NEG_INFINITY {
        return u;
    }
    u.max(v) + (-(u - v).abs()).exp().ln_1p()
}

fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Flattens the expression's `logaddexp` tree into branches, separates the
/// shared additive remainder, and attempts the zero-inflation and
/// binomial-mixture readings.
pub fn extract_mixture(expr: &Expr) -> Result<MixtureExtraction, NotMixture> {
    let d = decompose(&canonicalize(expr));

    let mut lae: Option<Vec<Branch>> = None;
    let mut shared: Vec<Term> = Vec::new();
    for term in d.terms {
        match term {
            Term::LogAddExp { branches } => {
                if lae.is_some() {
                    // Two independent logaddexp factors do not describe one
                    // flat mixture.
                    return Err(NotMixture);
                }
                lae = Some(branches);
            }
            other => shared.push(other),
        }
    }
    let branches = lae.ok_or(NotMixture)?;

    let extracted: Vec<ExtractedBranch> = branches
        .into_iter()
        .map(|b| {
            let log_weight = match b.kind {
                BranchKind::Affine { intercept, .. } => Some(intercept),
                BranchKind::Delta0 { intercept } => Some(intercept),
                BranchKind::General => None,
            };
            ExtractedBranch { expr: b.expr, kind: b.kind, log_weight }
        })
        .collect();

    let mut extraction = MixtureExtraction {
        shared,
        shared_constant: d.constant,
        branches: extracted,
        zero_inflation: None,
        binomial_mixture: None,
    };
    extraction.zero_inflation = zero_inflation_view(&extraction);
    extraction.binomial_mixture = binomial_mixture_view(&extraction);
    Ok(extraction)
}

/// Shared remainder evaluated at x = 0; the delta branch only fires there,
/// so this is the correction the atom mass must absorb.
fn shared_at_zero(extraction: &MixtureExtraction) -> f64 {
    let mut total = extraction.shared_constant;
    for term in &extraction.shared {
        match term.eval(0.0) {
            Some(v) if v.is_finite() => total += v,
            // A shared term undefined at zero (log x) means the base family
            // has no mass there anyway; the atom correction is just the
            // constant.
            _ => {}
        }
    }
    total
}

fn zero_inflation_view(extraction: &MixtureExtraction) -> Option<ZeroInflationView> {
    let deltas: Vec<&ExtractedBranch> = extraction
        .branches
        .iter()
        .filter(|b| matches!(b.kind, BranchKind::Delta0 { .. }))
        .collect();
    let others: Vec<&ExtractedBranch> = extraction
        .branches
        .iter()
        .filter(|b| !matches!(b.kind, BranchKind::Delta0 { .. }))
        .collect();
    if deltas.len() != 1 || others.is_empty() {
        return None;
    }
    let delta_intercept = match deltas[0].kind {
        BranchKind::Delta0 { intercept } => intercept,
        _ => unreachable!(),
    };

    let pi = (delta_intercept + shared_at_zero(extraction)).exp();
    if !(pi > 0.0 && pi < 1.0) {
        return None;
    }

    // Base log-PMF: shared + remaining branches, minus the ln(1−π) the
    // mixture weight contributed.
    let mut base = others
        .iter()
        .map(|b| b.expr.clone())
        .reduce(|a, b| Expr::binary(exprcore::BinaryOp::LogAddExp, a, b))
        .expect("at least one non-delta branch");
    for term in &extraction.shared {
        base = Expr::binary(exprcore::BinaryOp::Add, base, term_to_expr(term));
    }
    let offset = extraction.shared_constant - (1.0 - pi).ln();
    if offset != 0.0 {
        base = Expr::binary(exprcore::BinaryOp::Add, base, Expr::constant(offset));
    }
    Some(ZeroInflationView {
        pi,
        base_expr: exprcore::simplify(&base),
    })
}

fn binomial_mixture_view(extraction: &MixtureExtraction) -> Option<BinomialMixtureView> {
    if extraction.branches.len() < 2 {
        return None;
    }
    let mut slopes = Vec::new();
    let mut intercepts = Vec::new();
    for b in &extraction.branches {
        match b.kind {
            BranchKind::Affine { slope, intercept } => {
                slopes.push(slope);
                intercepts.push(intercept);
            }
            _ => return None,
        }
    }

    // The shared remainder must be exactly ln C(n, x) up to constants:
    // −lnΓ(x+1) − lnΓ(n−x+1), plus an optional linear term that folds into
    // every branch slope.
    let mut shared_slope = 0.0;
    let mut up: Option<(f64, f64)> = None; // (coef, shift) of lnΓ(x+shift)
    let mut down: Option<(f64, f64)> = None; // (coef, shift) of lnΓ(−x+shift)
    for term in &extraction.shared {
        match term {
            Term::Linear { slope } => shared_slope += slope,
            Term::LogGammaAffine { coef, scale, shift } if (*scale - 1.0).abs() < 0.05 => {
                if up.is_some() {
                    return None;
                }
                up = Some((*coef, *shift));
            }
            Term::LogGammaAffine { coef, scale, shift } if (*scale + 1.0).abs() < 0.05 => {
                if down.is_some() {
                    return None;
                }
                down = Some((*coef, *shift));
            }
            _ => return None,
        }
    }
    let (up_coef, up_shift) = up?;
    let (down_coef, down_shift) = down?;
    if (up_coef + 1.0).abs() > 0.05 || (up_shift - 1.0).abs() > 0.05 {
        return None;
    }
    if (down_coef + 1.0).abs() > 0.05 {
        return None;
    }
    let n = down_shift - 1.0;
    if n < 1.0 {
        return None;
    }

    // Branch slope aᵢ = logit(pᵢ); intercept Bᵢ = ln wᵢ + n·ln(1−pᵢ).
    let mut components: Vec<(f64, f64)> = slopes
        .iter()
        .zip(&intercepts)
        .map(|(&a, &b)| {
            let p = sigmoid(a + shared_slope);
            let lw = b - n * (1.0 - p).ln();
            (p, lw)
        })
        .collect();
    let max_lw = components
        .iter()
        .map(|&(_, lw)| lw)
        .fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = components.iter().map(|&(_, lw)| (lw - max_lw).exp()).sum();
    for (_, lw) in &mut components {
        *lw = (*lw - max_lw).exp() / total;
    }
    components.sort_by(|a, b| a.0.total_cmp(&b.0));
    Some(BinomialMixtureView { n, components })
}

/// Rebuild a term as an expression (for base-PMF reconstruction).
fn term_to_expr(term: &Term) -> Expr {
    use exprcore::BinaryOp::*;
    let x = Expr::var;
    let scaled = |e: Expr, c: f64| {
        if c == 1.0 {
            e
        } else {
            Expr::binary(Mul, e, Expr::constant(c))
        }
    };
    match term {
        Term::Linear { slope } => scaled(x(), *slope),
        Term::LogX { coef } => scaled(Expr::unary(UnaryOp::Log, x()), *coef),
        Term::AbsAffine { coef, center } => {
            let arg = if *center == 0.0 {
                x()
            } else {
                Expr::binary(Sub, x(), Expr::constant(*center))
            };
            scaled(Expr::unary(UnaryOp::Abs, arg), *coef)
        }
        Term::LogGammaAffine { coef, scale, shift } => {
            let mut arg = scaled(x(), *scale);
            if *shift != 0.0 {
                arg = Expr::binary(Add, arg, Expr::constant(*shift));
            }
            scaled(Expr::unary(UnaryOp::LogGamma, arg), *coef)
        }
        Term::Delta0 { coef } => scaled(Expr::unary(UnaryOp::LogDelta0, x()), *coef),
        Term::LogAddExp { branches } => branches
            .iter()
            .map(|b| b.expr.clone())
            .reduce(|a, b| Expr::binary(LogAddExp, a, b))
            .expect("logaddexp terms have at least two branches"),
        Term::Opaque { coef, expr } => scaled(expr.clone(), *coef),
    }
}
