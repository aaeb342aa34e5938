//! Additive decomposition of canonicalized expressions into tagged terms.
//!
//! A fitted log-PMF candidate is most useful as `constant + Σ termᵢ(x)`
//! where each term has a recognisable shape: `slope·x`, `coef·log x`,
//! `coef·logΓ(scale·x + shift)`, `coef·|x − center|`, the zero-atom
//! `logdelta0`, or a `logaddexp` over branches.  Family identification
//! matches the multiset of term fingerprints against templates, and the
//! mixture extractor reads branch slopes/intercepts straight off the
//! `logaddexp` terms.
//!
//! Sums of `logaddexp` terms whose branches are all affine are merged into a
//! single term over pairwise branch sums — log-sum-exp is closed under
//! addition, and keeping one flat branch set is what makes k-component
//! mixture structure visible.

use crate::eval::{eval, eval_opt, LOG_ZERO};
use crate::expr::{BinaryOp, Expr, UnaryOp};
use crate::gamma::ln_gamma;

/// One branch of a `logaddexp` term.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// Exact branch expression (kept for round-trip evaluation).
    pub expr: Expr,
    pub kind: BranchKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BranchKind {
    /// `slope·x + intercept`
    Affine { slope: f64, intercept: f64 },
    /// `logdelta0(x0) + intercept` — the zero-inflation atom.
    Delta0 { intercept: f64 },
    /// Anything else; callers decompose the expression recursively.
    General,
}

/// An x-dependent additive term.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    /// `slope·x`
    Linear { slope: f64 },
    /// `coef·log(x)`
    LogX { coef: f64 },
    /// `coef·|x − center|`
    AbsAffine { coef: f64, center: f64 },
    /// `coef·logΓ(scale·x + shift)`
    LogGammaAffine { coef: f64, scale: f64, shift: f64 },
    /// `coef·logdelta0(x)`
    Delta0 { coef: f64 },
    /// `logaddexp(branch₁, …, branchₙ)` (n ≥ 2, flattened)
    LogAddExp { branches: Vec<Branch> },
    /// Unclassified remainder `coef·expr`.
    Opaque { coef: f64, expr: Expr },
}

/// Result of [`decompose`]: `expr ≡ constant + Σ terms`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub constant: f64,
    pub terms: Vec<Term>,
}

/// Interpret `e` as `slope·x + intercept` if it is semantically affine.
pub fn as_affine(e: &Expr) -> Option<(f64, f64)> {
    match e {
        Expr::Var => Some((1.0, 0.0)),
        Expr::Const(v) => Some((0.0, *v)),
        Expr::Binary(BinaryOp::Add, l, r) => {
            let (ls, li) = as_affine(l)?;
            let (rs, ri) = as_affine(r)?;
            Some((ls + rs, li + ri))
        }
        Expr::Binary(BinaryOp::Sub, l, r) => {
            let (ls, li) = as_affine(l)?;
            let (rs, ri) = as_affine(r)?;
            Some((ls - rs, li - ri))
        }
        Expr::Binary(BinaryOp::Mul, l, r) => {
            let (ls, li) = as_affine(l)?;
            let (rs, ri) = as_affine(r)?;
            if ls == 0.0 {
                Some((li * rs, li * ri))
            } else if rs == 0.0 {
                Some((ri * ls, ri * li))
            } else {
                None
            }
        }
        _ => None,
    }
}

#[derive(Default)]
struct Accumulator {
    constant: f64,
    slope: f64,
    logx: f64,
    delta0: f64,
    abs_terms: Vec<(f64, f64)>,          // (coef, center)
    lgamma_terms: Vec<(f64, f64, f64)>,  // (coef, scale, shift)
    lae_terms: Vec<Vec<Branch>>,
    opaque: Vec<(f64, Expr)>,
}

/// Decompose a canonicalized expression into constant and tagged terms.
pub fn decompose(expr: &Expr) -> Decomposition {
    let mut acc = Accumulator::default();
    flatten(expr, 1.0, &mut acc);
    acc.finish()
}

fn flatten(e: &Expr, coef: f64, acc: &mut Accumulator) {
    if !e.contains_var() {
        match eval(e, 0.0) {
            Ok(v) => acc.constant += coef * v,
            Err(_) => acc.opaque.push((coef, e.clone())),
        }
        return;
    }
    match e {
        Expr::Binary(BinaryOp::Add, l, r) => {
            flatten(l, coef, acc);
            flatten(r, coef, acc);
        }
        Expr::Binary(BinaryOp::Sub, l, r) => {
            flatten(l, coef, acc);
            flatten(r, -coef, acc);
        }
        Expr::Binary(BinaryOp::Mul, l, r) => {
            // Fold a variable-free factor into the coefficient.
            let (fixed, varying) = if !l.contains_var() {
                (l, r)
            } else if !r.contains_var() {
                (r, l)
            } else {
                classify(e, coef, acc);
                return;
            };
            match eval(fixed, 0.0) {
                Ok(c) => flatten(varying, coef * c, acc),
                Err(_) => acc.opaque.push((coef, e.clone())),
            }
        }
        _ => classify(e, coef, acc),
    }
}

fn classify(e: &Expr, coef: f64, acc: &mut Accumulator) {
    // A unary node whose argument mentions x only in occurrences that cancel
    // (lowering logC(x + r, x) leaves lnGamma((x + r) - x + 1)) is constant
    // despite the syntactic variable, so fold it instead of keeping it opaque.
    if let Expr::Unary(_, c) = e {
        if matches!(as_affine(c), Some((s, _)) if s == 0.0) {
            match eval(e, 0.0) {
                Ok(v) => acc.constant += coef * v,
                Err(_) => acc.opaque.push((coef, e.clone())),
            }
            return;
        }
    }
    match e {
        Expr::Var => {
            acc.slope += coef;
            return;
        }
        Expr::Unary(UnaryOp::Log, c) => {
            if as_affine(c) == Some((1.0, 0.0)) {
                acc.logx += coef;
                return;
            }
        }
        Expr::Unary(UnaryOp::Abs, c) => {
            if let Some((s, i)) = as_affine(c) {
                if s != 0.0 {
                    acc.abs_terms.push((coef * s.abs(), -i / s));
                    return;
                }
            }
        }
        Expr::Unary(UnaryOp::LogGamma, c) => {
            if let Some((s, i)) = as_affine(c) {
                if s != 0.0 {
                    acc.lgamma_terms.push((coef, s, i));
                    return;
                }
            }
        }
        Expr::Unary(UnaryOp::LogDelta0, c) => {
            if as_affine(c) == Some((1.0, 0.0)) {
                acc.delta0 += coef;
                return;
            }
        }
        Expr::Binary(BinaryOp::LogAddExp, _, _) if coef == 1.0 => {
            let mut branches = Vec::new();
            collect_branches(e, &mut branches);
            acc.lae_terms.push(branches);
            return;
        }
        _ => {}
    }
    acc.opaque.push((coef, e.clone()));
}

fn collect_branches(e: &Expr, out: &mut Vec<Branch>) {
    if let Expr::Binary(BinaryOp::LogAddExp, l, r) = e {
        collect_branches(l, out);
        collect_branches(r, out);
        return;
    }
    out.push(classify_branch(e));
}

fn classify_branch(e: &Expr) -> Branch {
    if let Some((slope, intercept)) = as_affine(e) {
        return Branch {
            expr: e.clone(),
            kind: BranchKind::Affine { slope, intercept },
        };
    }
    if let Some(intercept) = as_delta0_branch(e) {
        return Branch {
            expr: e.clone(),
            kind: BranchKind::Delta0 { intercept },
        };
    }
    Branch {
        expr: e.clone(),
        kind: BranchKind::General,
    }
}

/// Match `logdelta0(x0) + c` in any additive arrangement.
fn as_delta0_branch(e: &Expr) -> Option<f64> {
    fn walk(e: &Expr, sign: f64, deltas: &mut f64, shift: &mut f64) -> bool {
        match e {
            Expr::Unary(UnaryOp::LogDelta0, c) if as_affine(c) == Some((1.0, 0.0)) => {
                *deltas += sign;
                true
            }
            Expr::Const(v) => {
                *shift += sign * v;
                true
            }
            Expr::Binary(BinaryOp::Add, l, r) => {
                walk(l, sign, deltas, shift) && walk(r, sign, deltas, shift)
            }
            Expr::Binary(BinaryOp::Sub, l, r) => {
                walk(l, sign, deltas, shift) && walk(r, -sign, deltas, shift)
            }
            _ => false,
        }
    }
    let mut deltas = 0.0;
    let mut shift = 0.0;
    if walk(e, 1.0, &mut deltas, &mut shift) && deltas == 1.0 {
        Some(shift)
    } else {
        None
    }
}

impl Accumulator {
    fn finish(mut self) -> Decomposition {
        let mut terms = Vec::new();
        if self.slope != 0.0 {
            terms.push(Term::Linear { slope: self.slope });
        }
        if self.logx != 0.0 {
            terms.push(Term::LogX { coef: self.logx });
        }

        merge_pairs(&mut self.abs_terms, |a, b| a.1 == b.1, |a, b| a.0 += b.0);
        self.abs_terms
            .sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite centers"));
        for (coef, center) in self.abs_terms.drain(..) {
            if coef != 0.0 {
                terms.push(Term::AbsAffine { coef, center });
            }
        }

        merge_pairs(
            &mut self.lgamma_terms,
            |a, b| a.1 == b.1 && a.2 == b.2,
            |a, b| a.0 += b.0,
        );
        // Order: scale descending (forward shapes first), then shift.
        self.lgamma_terms.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("finite parameters")
                .then(a.2.partial_cmp(&b.2).expect("finite parameters"))
        });
        for (coef, scale, shift) in self.lgamma_terms.drain(..) {
            if coef != 0.0 {
                terms.push(Term::LogGammaAffine { coef, scale, shift });
            }
        }

        if self.delta0 != 0.0 {
            terms.push(Term::Delta0 { coef: self.delta0 });
        }

        for branches in merge_affine_logaddexp(std::mem::take(&mut self.lae_terms)) {
            terms.push(Term::LogAddExp { branches });
        }

        for (coef, expr) in self.opaque.drain(..) {
            if coef != 0.0 {
                terms.push(Term::Opaque { coef, expr });
            }
        }

        Decomposition {
            constant: self.constant,
            terms,
        }
    }
}

fn merge_pairs<T>(items: &mut Vec<T>, same: impl Fn(&T, &T) -> bool, fold: impl Fn(&mut T, &T)) {
    let mut merged: Vec<T> = Vec::with_capacity(items.len());
    for item in items.drain(..) {
        if let Some(existing) = merged.iter_mut().find(|m| same(m, &item)) {
            fold(existing, &item);
        } else {
            merged.push(item);
        }
    }
    *items = merged;
}

/// Fold every all-affine `logaddexp` term into one via pairwise branch sums
/// (log-sum-exp closure under addition); other terms pass through.
fn merge_affine_logaddexp(terms: Vec<Vec<Branch>>) -> Vec<Vec<Branch>> {
    let mut out = Vec::new();
    let mut affine_sets: Vec<Vec<Branch>> = Vec::new();
    for branches in terms {
        let all_affine = branches
            .iter()
            .all(|b| matches!(b.kind, BranchKind::Affine { .. }));
        if all_affine {
            affine_sets.push(branches);
        } else {
            out.push(branches);
        }
    }
    if let Some(mut acc) = affine_sets.pop() {
        while let Some(other) = affine_sets.pop() {
            let mut product = Vec::with_capacity(acc.len() * other.len());
            for a in &acc {
                for b in &other {
                    let (sa, ia) = affine_parts(a);
                    let (sb, ib) = affine_parts(b);
                    product.push(Branch {
                        expr: Expr::binary(BinaryOp::Add, a.expr.clone(), b.expr.clone()),
                        kind: BranchKind::Affine {
                            slope: sa + sb,
                            intercept: ia + ib,
                        },
                    });
                }
            }
            acc = product;
        }
        out.push(acc);
    }
    out
}

fn affine_parts(b: &Branch) -> (f64, f64) {
    match b.kind {
        BranchKind::Affine { slope, intercept } => (slope, intercept),
        _ => unreachable!("caller filtered to affine branches"),
    }
}

impl Branch {
    pub fn eval(&self, x: f64) -> Option<f64> {
        match self.kind {
            BranchKind::Affine { slope, intercept } => Some(slope * x + intercept),
            BranchKind::Delta0 { .. } | BranchKind::General => eval_opt(&self.expr, x),
        }
    }
}

impl Term {
    pub fn eval(&self, x: f64) -> Option<f64> {
        match self {
            Term::Linear { slope } => Some(slope * x),
            Term::LogX { coef } => {
                if x > 0.0 {
                    Some(coef * x.ln())
                } else {
                    None
                }
            }
            Term::AbsAffine { coef, center } => Some(coef * (x - center).abs()),
            Term::LogGammaAffine { coef, scale, shift } => {
                let arg = scale * x + shift;
                if arg > 0.0 {
                    Some(coef * ln_gamma(arg))
                } else {
                    None
                }
            }
            Term::Delta0 { coef } => Some(if x == 0.0 { 0.0 } else { coef * LOG_ZERO }),
            Term::LogAddExp { branches } => {
                let mut acc: Option<f64> = None;
                for b in branches {
                    let v = b.eval(x)?;
                    acc = Some(match acc {
                        None => v,
                        Some(a) => {
                            let m = a.max(v);
                            m + (-(a - v).abs()).exp().ln_1p()
                        }
                    });
                }
                acc
            }
            Term::Opaque { coef, expr } => eval_opt(expr, x).map(|v| coef * v),
        }
    }

    /// Structural tag, free on constants; the multiset of these is the
    /// candidate's fingerprint.
    pub fn fingerprint(&self) -> String {
        match self {
            Term::Linear { .. } => "linear".to_string(),
            Term::LogX { .. } => "logx".to_string(),
            Term::AbsAffine { .. } => "absaffine".to_string(),
            Term::LogGammaAffine { scale, .. } => {
                if *scale > 0.0 {
                    "loggamma[+x]".to_string()
                } else {
                    "loggamma[-x]".to_string()
                }
            }
            Term::Delta0 { .. } => "delta0".to_string(),
            Term::LogAddExp { branches } => {
                let mut kinds: Vec<&str> = branches
                    .iter()
                    .map(|b| match b.kind {
                        BranchKind::Affine { .. } => "affine",
                        BranchKind::Delta0 { .. } => "delta0",
                        BranchKind::General => "general",
                    })
                    .collect();
                kinds.sort_unstable();
                format!("logaddexp({})", kinds.join(","))
            }
            Term::Opaque { expr, .. } => format!("opaque:{}", masked(expr)),
        }
    }
}

impl Decomposition {
    /// Evaluate `constant + Σ terms` at `x`.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let mut total = self.constant;
        for t in &self.terms {
            total += t.eval(x)?;
        }
        Some(total)
    }

    /// Sorted multiset of term fingerprints, the structure-equivalence key.
    pub fn fingerprint(&self) -> String {
        let mut tags: Vec<String> = self.terms.iter().map(Term::fingerprint).collect();
        tags.sort_unstable();
        if tags.is_empty() {
            "const".to_string()
        } else {
            tags.join(" + ")
        }
    }
}

/// Structure-only rendering with constants masked, for opaque fingerprints.
fn masked(e: &Expr) -> String {
    match e {
        Expr::Var => "x0".to_string(),
        Expr::Const(_) => "C".to_string(),
        Expr::Unary(op, c) => format!("{}({})", op.name(), masked(c)),
        Expr::Binary(op, l, r) => format!("{}({}, {})", op.name(), masked(l), masked(r)),
    }
}

/// Fingerprint of an arbitrary (not yet canonical) expression.
pub fn fingerprint(expr: &Expr) -> String {
    decompose(&crate::canonical::canonicalize(expr)).fingerprint()
}
