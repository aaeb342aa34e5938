//! Structure-based family identification.
//!
//! A recovered expression is canonicalized and decomposed into a sum of
//! recognizable terms (linear, log, |x−c|, logΓ of an affine argument, …).
//! The multiset of term shapes is matched against per-family templates
//! derived from the catalog of closed forms, and parameter initializers are
//! read off the surviving coefficients. Matching is exact on structure and
//! free on constants: a poisson is a linear term plus one −logΓ(x+1), no
//! matter what rate the constants encode.

use exprcore::{canonicalize, decompose, Expr, Term};
use targets::{zeta, BaseFamily};

/// Slack allowed when a template requires a coefficient to sit at a
/// structural anchor (±1, or a shift of 0/1). Recovered expressions carry
/// refit constants, so anchors are matched loosely; initializer quality is
/// the refiner's problem.
const SHAPE_TOL: f64 = 0.05;

/// Slack for intercept identities that separate families sharing a term
/// multiset (geometric conventions vs boltzmann).
const RELATION_TOL: f64 = 0.02;

/// Implied finite supports beyond this are reported as the unbounded family.
const ZIPF_N_CUTOFF: u64 = 1_000;

/// Largest finite support the harmonic inversion will walk to.
const ZIPF_N_MAX: u64 = 2_000_000;

/// One logΓ(scale·x + shift) term with its sign.
#[derive(Clone, Copy, Debug)]
struct LgTerm {
    coef: f64,
    scale: f64,
    shift: f64,
}

fn near(v: f64, anchor: f64) -> bool {
    (v - anchor).abs() < SHAPE_TOL
}

fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Matches `expr` against the family templates, returning the family with
/// parameter initializers read from the expression's coefficients, or `None`
/// when no template fits.
pub fn identify_family(expr: &Expr) -> Option<BaseFamily> {
    let d = decompose(&canonicalize(expr));

    let mut linear: Option<f64> = None;
    let mut logx: Option<f64> = None;
    let mut abs_terms: Vec<(f64, f64)> = Vec::new();
    let mut lg_terms: Vec<LgTerm> = Vec::new();
    for term in &d.terms {
        match term {
            Term::Linear { slope } => linear = Some(*slope),
            Term::LogX { coef } => logx = Some(*coef),
            Term::AbsAffine { coef, center } => abs_terms.push((*coef, *center)),
            Term::LogGammaAffine { coef, scale, shift } => lg_terms.push(LgTerm {
                coef: *coef,
                scale: *scale,
                shift: *shift,
            }),
            // Mixture structure and unrecognizable terms are out of scope
            // here; extract_mixture owns logaddexp and delta handling.
            Term::Delta0 { .. } | Term::LogAddExp { .. } | Term::Opaque { .. } => return None,
        }
    }

    let family = match (linear, logx, abs_terms.len(), lg_terms.len()) {
        (Some(s), None, 0, 0) => linear_family(s, d.constant),
        (None, Some(c), 0, 0) => zipf_like(-c, d.constant),
        (Some(s), Some(c), 0, 0) if near(c, -1.0) => logseries(s),
        (None, None, 1, 0) => dlaplace(abs_terms[0]),
        (Some(s), None, 0, 1) => poisson(s, lg_terms[0]),
        (Some(s), None, 0, 2) => two_lg_with_linear(s, &lg_terms),
        (None, None, 0, 2) => yulesimon(&lg_terms),
        (None, None, 0, 4) => four_lg(&lg_terms, d.constant),
        _ => None,
    }?;
    family.validate().ok()?;
    Some(family)
}

/// A lone linear term: geometric in either support convention, or a finite
/// boltzmann ladder. The slope fixes p (or β); the intercept identity picks
/// the convention.
fn linear_family(slope: f64, intercept: f64) -> Option<BaseFamily> {
    if slope >= 0.0 {
        return None;
    }
    let p = 1.0 - slope.exp();

    // First-success convention: ln p + (x−1)·ln(1−p).
    if (intercept - (p.ln() - slope)).abs() < RELATION_TOL {
        return Some(BaseFamily::Geometric { p, start: 1 });
    }

    // Finite boltzmann: intercept = ln(1−e^(−β)) − ln(1−e^(−βN)). Solving
    // for N only works when the truncation actually bends the constant; a
    // geometric-sized intercept gives d → 1 and falls through.
    let beta = -slope;
    let d = p * (-intercept).exp();
    if d < 1.0 - 1e-9 {
        let n_real = -(1.0 - d).ln() / beta;
        if (1.5..=1e6).contains(&n_real) {
            let n = n_real.round().max(2.0) as u64;
            return Some(BaseFamily::Boltzmann { beta, n });
        }
    }

    // Failure-count convention: ln p + x·ln(1−p).
    if (intercept - p.ln()).abs() < RELATION_TOL {
        return Some(BaseFamily::Geometric { p, start: 0 });
    }

    // No intercept identity holds (drift in a recovered constant); default
    // to the catalog's first-success convention and let refinement settle p.
    Some(BaseFamily::Geometric { p, start: 1 })
}

/// A lone log term: a power-law tail. The constant decides between the
/// infinite zipf and a finite zipfian support via harmonic-sum inversion.
fn zipf_like(a: f64, intercept: f64) -> Option<BaseFamily> {
    if a <= 0.0 {
        return None;
    }
    let h_target = (-intercept).exp();
    if h_target < 1.0 - 1e-9 {
        // The normalizer of any power law on x ≥ 1 is at least 1.
        return if a > 1.0 { Some(BaseFamily::Zipf { a, x_max: None }) } else { None };
    }
    if a > 1.0 && h_target >= zeta(a) * (1.0 - 1e-9) {
        return Some(BaseFamily::Zipf { a, x_max: None });
    }
    // Walk the harmonic sum until it crosses the target, then keep the
    // closer endpoint.
    let mut h = 0.0;
    let mut n = 0u64;
    while h < h_target && n < ZIPF_N_MAX {
        n += 1;
        h += (n as f64).powf(-a);
    }
    if h < h_target {
        return if a > 1.0 { Some(BaseFamily::Zipf { a, x_max: None }) } else { None };
    }
    let prev = h - (n as f64).powf(-a);
    if n > 1 && (h_target - prev).abs() < (h - h_target).abs() {
        n -= 1;
    }
    if n > ZIPF_N_CUTOFF && a > 1.0 {
        // Close enough to the infinite normalizer that the cap is noise.
        return Some(BaseFamily::Zipf { a, x_max: None });
    }
    Some(BaseFamily::Zipfian { a, n })
}

fn logseries(slope: f64) -> Option<BaseFamily> {
    if slope >= 0.0 {
        return None;
    }
    Some(BaseFamily::LogSeries { p: slope.exp() })
}

fn dlaplace((coef, center): (f64, f64)) -> Option<BaseFamily> {
    if coef >= 0.0 {
        return None;
    }
    Some(BaseFamily::DLaplace {
        a: -coef,
        loc: center.round() as i64,
    })
}

fn poisson(slope: f64, lg: LgTerm) -> Option<BaseFamily> {
    if near(lg.coef, -1.0) && near(lg.scale, 1.0) && near(lg.shift, 1.0) {
        Some(BaseFamily::Poisson { lambda: slope.exp() })
    } else {
        None
    }
}

/// Linear plus two logΓ terms: negbinomial (both arguments increasing in x)
/// or binomial (one argument decreasing).
fn two_lg_with_linear(slope: f64, lgs: &[LgTerm]) -> Option<BaseFamily> {
    let (pos_scale, neg_scale): (Vec<&LgTerm>, Vec<&LgTerm>) =
        lgs.iter().partition(|t| t.scale > 0.0);
    match (pos_scale.len(), neg_scale.len()) {
        (2, 0) => {
            // lnΓ(x+r) − lnΓ(x+1) from C(x+r−1, x); slope is ln p.
            let plus = pos_scale.iter().find(|t| near(t.coef, 1.0))?;
            let minus = pos_scale.iter().find(|t| near(t.coef, -1.0))?;
            if !(near(plus.scale, 1.0) && near(minus.scale, 1.0) && near(minus.shift, 1.0)) {
                return None;
            }
            if slope >= 0.0 || plus.shift <= 0.0 {
                return None;
            }
            Some(BaseFamily::NegBinomial {
                r: plus.shift,
                p: slope.exp(),
            })
        }
        (1, 1) => {
            // −lnΓ(x+1) − lnΓ(n−x+1) from C(n, x); slope is the log-odds.
            let up = pos_scale[0];
            let down = neg_scale[0];
            if !(near(up.coef, -1.0) && near(up.scale, 1.0) && near(up.shift, 1.0)) {
                return None;
            }
            if !(near(down.coef, -1.0) && near(down.scale, -1.0)) {
                return None;
            }
            let n = (down.shift - 1.0).round();
            if n < 1.0 {
                return None;
            }
            Some(BaseFamily::Binomial {
                n: n as u64,
                p: sigmoid(slope),
            })
        }
        _ => None,
    }
}

/// Two logΓ terms with no linear part: ln B(x, ρ+1) expanded.
fn yulesimon(lgs: &[LgTerm]) -> Option<BaseFamily> {
    let plus = lgs.iter().find(|t| near(t.coef, 1.0))?;
    let minus = lgs.iter().find(|t| near(t.coef, -1.0))?;
    if !(near(plus.scale, 1.0) && near(minus.scale, 1.0) && near(plus.shift, 0.0)) {
        return None;
    }
    let rho = minus.shift - 1.0;
    if rho <= 0.0 {
        return None;
    }
    Some(BaseFamily::YuleSimon { rho, x_max: None })
}

/// Four logΓ terms: the heavy combinatorial tail of the catalog.
fn four_lg(lgs: &[LgTerm], constant: f64) -> Option<BaseFamily> {
    let rising = lgs.iter().filter(|t| t.scale > 0.0).count();
    match rising {
        4 => betanegbinomial(lgs, constant),
        2 => {
            if lgs.iter().all(|t| near(t.coef, -1.0)) {
                hypergeometric(lgs)
            } else {
                betabinomial_or_neghypergeometric(lgs)
            }
        }
        _ => None,
    }
}

/// All four arguments rise with x: C(x+r−1, x)·B(r+α, x+β)/B(α, β).
///
/// The two positive-coefficient shifts are {r, β}, interchangeable because
/// the family is symmetric under r ↔ β (with α fixed); the reading with the
/// larger value as r is returned.
fn betanegbinomial(lgs: &[LgTerm], _constant: f64) -> Option<BaseFamily> {
    if !lgs.iter().all(|t| near(t.scale, 1.0)) {
        return None;
    }
    let pos: Vec<_> = lgs.iter().filter(|t| near(t.coef, 1.0)).collect();
    let neg: Vec<_> = lgs.iter().filter(|t| near(t.coef, -1.0)).collect();
    if pos.len() != 2 || neg.len() != 2 {
        return None;
    }
    let unit = neg.iter().find(|t| near(t.shift, 1.0))?;
    let top = neg.iter().find(|t| t.shift != unit.shift || !near(t.shift, 1.0))?;
    let r = pos[0].shift.max(pos[1].shift);
    let beta = pos[0].shift.min(pos[1].shift);
    let alpha = top.shift - r - beta;
    if r <= 0.0 || beta <= 0.0 || alpha <= 0.0 {
        return None;
    }
    Some(BaseFamily::BetaNegBinomial { r, alpha, beta })
}

/// All coefficients −1: C(K,x)·C(N−K, n−x)/C(N,n). The two falling shifts
/// are {K+1, n+1}; the reading with K ≥ n is returned (the family is
/// symmetric under K ↔ n).
fn hypergeometric(lgs: &[LgTerm]) -> Option<BaseFamily> {
    let rising: Vec<_> = lgs.iter().filter(|t| t.scale > 0.0).collect();
    let falling: Vec<_> = lgs.iter().filter(|t| t.scale < 0.0).collect();
    if !rising.iter().all(|t| near(t.scale, 1.0)) || !falling.iter().all(|t| near(t.scale, -1.0)) {
        return None;
    }
    rising.iter().find(|t| near(t.shift, 1.0))?;
    let q = rising.iter().map(|t| t.shift).fold(f64::NEG_INFINITY, f64::max);
    let k = falling.iter().map(|t| t.shift).fold(f64::NEG_INFINITY, f64::max) - 1.0;
    let n = falling.iter().map(|t| t.shift).fold(f64::INFINITY, f64::min) - 1.0;
    let npop = q - 1.0 + k + n;
    if k < 1.0 || n < 1.0 || npop < k.max(n) {
        return None;
    }
    Some(BaseFamily::Hypergeometric {
        npop: npop.round() as u64,
        k: k.round() as u64,
        n: n.round() as u64,
    })
}

/// Two rising and two falling logΓ arguments with mixed signs. Read as a
/// betabinomial; when the parameters are integral the same function is also
/// a neghypergeometric (the classic NHG(N,K,r) = BB(N−K, r, K−r+1)
/// identity), and the reading with substantial K/N is reported as NHG.
fn betabinomial_or_neghypergeometric(lgs: &[LgTerm]) -> Option<BaseFamily> {
    let find = |scale_sign: f64, coef_sign: f64| {
        lgs.iter()
            .find(|t| t.scale * scale_sign > 0.0 && near(t.coef, coef_sign))
            .copied()
    };
    let up_pos = find(1.0, 1.0)?;
    let up_neg = find(1.0, -1.0)?;
    let down_pos = find(-1.0, 1.0)?;
    let down_neg = find(-1.0, -1.0)?;
    if !near(up_neg.shift, 1.0) {
        return None;
    }
    if !(near(up_pos.scale, 1.0) && near(down_pos.scale, -1.0) && near(down_neg.scale, -1.0)) {
        return None;
    }

    let alpha = up_pos.shift;
    let n = down_neg.shift - 1.0;
    let beta = down_pos.shift - n;
    if alpha <= 0.0 || beta <= 0.0 || n < 1.0 {
        return None;
    }

    let is_int = |v: f64| (v - v.round()).abs() < 1e-6;
    let r_nhg = alpha;
    let k_nhg = alpha + beta - 1.0;
    let n_nhg = n + alpha + beta - 1.0;
    if is_int(r_nhg) && is_int(k_nhg) && is_int(n_nhg) && k_nhg >= 0.1 * n_nhg && r_nhg >= 1.0 {
        return Some(BaseFamily::NegHypergeometric {
            npop: n_nhg.round() as u64,
            k: k_nhg.round() as u64,
            r: r_nhg.round() as u64,
        });
    }
    Some(BaseFamily::BetaBinomial {
        n: n.round() as u64,
        alpha,
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use exprcore::parse;

    #[test]
    fn poisson_pattern_reads_rate_from_slope() {
        let expr = parse("(x0 * 2.485) + (-logF(x0) - 12.01)").unwrap();
        match identify_family(&expr) {
            Some(BaseFamily::Poisson { lambda }) => {
                assert!((lambda - 12.0f64).abs() < 0.01, "λ₀ = {lambda}");
            }
            other => panic!("expected poisson, got {other:?}"),
        }
    }

    #[test]
    fn yulesimon_pattern_reads_rho_from_beta_argument() {
        let expr = parse("logB(2.69, x0) + 0.521").unwrap();
        match identify_family(&expr) {
            Some(BaseFamily::YuleSimon { rho, .. }) => {
                assert!((rho - 1.69).abs() < 1e-9, "ρ₀ = {rho}");
            }
            other => panic!("expected yulesimon, got {other:?}"),
        }
    }

    #[test]
    fn zipf_pattern_reads_exponent_from_log_coefficient() {
        let expr = parse("-0.719 - (log(x0) * 1.700)").unwrap();
        match identify_family(&expr) {
            Some(BaseFamily::Zipf { a, x_max: None }) => {
                assert!((a - 1.700).abs() < 1e-12, "a₀ = {a}");
            }
            other => panic!("expected zipf, got {other:?}"),
        }
    }

    #[test]
    fn unmatched_shapes_are_unknown() {
        for text in ["sin(x0) * 3", "exp(x0) + 1", "7"] {
            let expr = parse(text).unwrap();
            assert!(
                identify_family(&expr).is_none(),
                "{text} should not match a template"
            );
        }
    }

    #[test]
    fn finite_zipf_support_is_inverted_from_the_constant() {
        // −1.7·ln x − ln H_{1.7,130}; H_{1.7,130} ≈ 2.00684.
        let h: f64 = (1..=130).map(|k| (k as f64).powf(-1.7)).sum();
        let expr = parse(&format!("-({:?} + (log(x0) * 1.7))", h.ln())).unwrap();
        match identify_family(&expr) {
            Some(BaseFamily::Zipfian { a, n }) => {
                assert!((a - 1.7).abs() < 1e-12);
                assert_eq!(n, 130);
            }
            other => panic!("expected zipfian, got {other:?}"),
        }
    }

    #[test]
    fn boltzmann_with_visible_truncation_is_recognized() {
        let beta = 0.3f64;
        let n = 12u64;
        let c = (1.0 - (-beta).exp()).ln() - (1.0 - (-beta * n as f64).exp()).ln();
        let expr = parse(&format!("(x0 * {:?}) + {:?}", -beta, c)).unwrap();
        match identify_family(&expr) {
            Some(BaseFamily::Boltzmann { beta: b, n: m }) => {
                assert!((b - beta).abs() < 1e-12);
                assert_eq!(m, n);
            }
            other => panic!("expected boltzmann, got {other:?}"),
        }
    }

    #[test]
    fn geometric_conventions_are_separated_by_the_intercept() {
        let p = 0.37f64;
        let s = (1.0 - p).ln();
        let first_success = parse(&format!("(x0 * {:?}) + {:?}", s, p.ln() - s)).unwrap();
        match identify_family(&first_success) {
            Some(BaseFamily::Geometric { p: q, start: 1 }) => {
                assert!((q - p).abs() < 1e-12);
            }
            other => panic!("expected start-1 geometric, got {other:?}"),
        }
        let failure_count = parse(&format!("(x0 * {:?}) + {:?}", s, p.ln())).unwrap();
        match identify_family(&failure_count) {
            Some(BaseFamily::Geometric { p: q, start: 0 }) => {
                assert!((q - p).abs() < 1e-12);
            }
            other => panic!("expected start-0 geometric, got {other:?}"),
        }
    }

    #[test]
    fn binomial_pattern_reads_n_and_log_odds() {
        // lnC(10, x) + x·logit(0.3) + 10·ln(0.7)
        let p = 0.3f64;
        let expr = parse(&format!(
            "logC(10, x0) + ((x0 * {:?}) + {:?})",
            (p / (1.0 - p)).ln(),
            10.0 * (1.0 - p).ln()
        ))
        .unwrap();
        match identify_family(&expr) {
            Some(BaseFamily::Binomial { n, p: q }) => {
                assert_eq!(n, 10);
                assert!((q - p).abs() < 1e-12);
            }
            other => panic!("expected binomial, got {other:?}"),
        }
    }

    #[test]
    fn mixture_shapes_are_left_to_the_mixture_extractor() {
        let expr = parse("logaddexp(x0 * -0.5, logdelta0(x0) - 1)").unwrap();
        assert!(identify_family(&expr).is_none());
    }
}
