//! The base-family catalog: fourteen discrete distributions with exact
//! closed-form log-PMFs.
//!
//! Each family knows its parameter constraints, its integer support, and
//! how to evaluate its log-PMF at a support point. Heavy-tailed families
//! (`zipf`, `yulesimon`) optionally carry a support cap `x_max`; when
//! capped, the normalization constant is the corresponding partial sum so
//! the truncated distribution still sums to one exactly.

use crate::zeta::{harmonic, zeta};
use exprcore::ln_gamma;
use thiserror::Error;

/// Integer support of a distribution: a contiguous range with optional
/// bounds on either side (`dlaplace` is unbounded in both directions).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Support {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl Support {
    pub fn bounded(lo: i64, hi: i64) -> Self {
        Support { lo: Some(lo), hi: Some(hi) }
    }

    pub fn from_lo(lo: i64) -> Self {
        Support { lo: Some(lo), hi: None }
    }

    pub fn all() -> Self {
        Support { lo: None, hi: None }
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo.map_or(true, |lo| x >= lo) && self.hi.map_or(true, |hi| x <= hi)
    }

    /// Smallest contiguous range covering both supports.
    pub fn union(&self, other: &Support) -> Support {
        let lo = match (self.lo, other.lo) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        Support { lo, hi }
    }
}

/// A family specification failed parameter validation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid {family} specification: {reason}")]
pub struct InvalidSpec {
    pub family: &'static str,
    pub reason: String,
}

fn reject(family: &'static str, reason: impl Into<String>) -> Result<(), InvalidSpec> {
    Err(InvalidSpec { family, reason: reason.into() })
}

/// ln C(n, k) for real arguments with n, k, n−k > −1.
pub fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// ln B(a, b) for a, b > 0.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// One of the fourteen catalog distributions.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseFamily {
    /// p(x) ∝ x^(−a) on x ≥ 1, normalized by ζ(a), or by H_{a,x_max} when
    /// the support is capped.
    Zipf { a: f64, x_max: Option<u64> },
    /// Finite Zipf: p(x) = x^(−a)/H_{a,N} on 1..=N.
    Zipfian { a: f64, n: u64 },
    /// p(x) = −p^x / (x·ln(1−p)) on x ≥ 1.
    LogSeries { p: f64 },
    /// p(x) = p·(1−p)^(x−start); `start` selects the first-success (1) or
    /// failure-count (0) support convention.
    Geometric { p: f64, start: i64 },
    /// Discrete Laplace: p(x) = tanh(a/2)·e^(−a·|x−loc|) on all integers.
    DLaplace { a: f64, loc: i64 },
    /// p(x) ∝ e^(−βx) on 0..=N−1.
    Boltzmann { beta: f64, n: u64 },
    Poisson { lambda: f64 },
    /// p(x) = C(x+r−1, x)·(1−p)^r·p^x on x ≥ 0 (so the slope of the
    /// log-PMF in x is ln p).
    NegBinomial { r: f64, p: f64 },
    /// p(x) = ρ·B(x, ρ+1) on x ≥ 1, renormalized when capped.
    YuleSimon { rho: f64, x_max: Option<u64> },
    /// p(x) = C(x+r−1, x)·B(r+α, x+β)/B(α, β) on x ≥ 0.
    BetaNegBinomial { r: f64, alpha: f64, beta: f64 },
    Binomial { n: u64, p: f64 },
    /// Population N with K marked, n drawn: p(x) = C(K,x)C(N−K,n−x)/C(N,n).
    Hypergeometric { npop: u64, k: u64, n: u64 },
    /// p(x) = C(x+r−1, x)·C(N−r−x, K−r)/C(N, K) on 0..=N−K.
    NegHypergeometric { npop: u64, k: u64, r: u64 },
    /// p(x) = C(n,x)·B(x+α, n−x+β)/B(α, β) on 0..=n.
    BetaBinomial { n: u64, alpha: f64, beta: f64 },
}

impl BaseFamily {
    /// Catalog name, also the leading token of the spec-string form.
    pub fn name(&self) -> &'static str {
        match self {
            BaseFamily::Zipf { .. } => "zipf",
            BaseFamily::Zipfian { .. } => "zipfian",
            BaseFamily::LogSeries { .. } => "logseries",
            BaseFamily::Geometric { .. } => "geometric",
            BaseFamily::DLaplace { .. } => "dlaplace",
            BaseFamily::Boltzmann { .. } => "boltzmann",
            BaseFamily::Poisson { .. } => "poisson",
            BaseFamily::NegBinomial { .. } => "negbinomial",
            BaseFamily::YuleSimon { .. } => "yulesimon",
            BaseFamily::BetaNegBinomial { .. } => "betanegbinomial",
            BaseFamily::Binomial { .. } => "binomial",
            BaseFamily::Hypergeometric { .. } => "hypergeometric",
            BaseFamily::NegHypergeometric { .. } => "neghypergeometric",
            BaseFamily::BetaBinomial { .. } => "betabinomial",
        }
    }

    pub fn validate(&self) -> Result<(), InvalidSpec> {
        let unit = |v: f64| v > 0.0 && v < 1.0;
        match *self {
            BaseFamily::Zipf { a, x_max } => {
                if x_max.is_none() && !(a > 1.0) {
                    return reject("zipf", format!("a = {a} must exceed 1 for an unbounded tail"));
                }
                if !(a > 0.0) {
                    return reject("zipf", format!("a = {a} must be positive"));
                }
                if x_max == Some(0) {
                    return reject("zipf", "x_max must be at least 1");
                }
            }
            BaseFamily::Zipfian { a, n } => {
                if !(a > 0.0) {
                    return reject("zipfian", format!("a = {a} must be positive"));
                }
                if n == 0 {
                    return reject("zipfian", "N must be at least 1");
                }
            }
            BaseFamily::LogSeries { p } => {
                if !unit(p) {
                    return reject("logseries", format!("p = {p} must lie in (0, 1)"));
                }
            }
            BaseFamily::Geometric { p, start } => {
                if !unit(p) {
                    return reject("geometric", format!("p = {p} must lie in (0, 1)"));
                }
                if start != 0 && start != 1 {
                    return reject("geometric", format!("start = {start} must be 0 or 1"));
                }
            }
            BaseFamily::DLaplace { a, .. } => {
                if !(a > 0.0) {
                    return reject("dlaplace", format!("a = {a} must be positive"));
                }
            }
            BaseFamily::Boltzmann { beta, n } => {
                if !(beta > 0.0) {
                    return reject("boltzmann", format!("beta = {beta} must be positive"));
                }
                if n == 0 {
                    return reject("boltzmann", "N must be at least 1");
                }
            }
            BaseFamily::Poisson { lambda } => {
                if !(lambda > 0.0) {
                    return reject("poisson", format!("lam = {lambda} must be positive"));
                }
            }
            BaseFamily::NegBinomial { r, p } => {
                if !(r > 0.0) {
                    return reject("negbinomial", format!("r = {r} must be positive"));
                }
                if !unit(p) {
                    return reject("negbinomial", format!("p = {p} must lie in (0, 1)"));
                }
            }
            BaseFamily::YuleSimon { rho, x_max } => {
                if !(rho > 0.0) {
                    return reject("yulesimon", format!("rho = {rho} must be positive"));
                }
                if x_max == Some(0) {
                    return reject("yulesimon", "x_max must be at least 1");
                }
            }
            BaseFamily::BetaNegBinomial { r, alpha, beta } => {
                if !(r > 0.0 && alpha > 0.0 && beta > 0.0) {
                    return reject(
                        "betanegbinomial",
                        format!("r = {r}, alpha = {alpha}, beta = {beta} must all be positive"),
                    );
                }
            }
            BaseFamily::Binomial { n, p } => {
                if n == 0 {
                    return reject("binomial", "n must be at least 1");
                }
                if !unit(p) {
                    return reject("binomial", format!("p = {p} must lie in (0, 1)"));
                }
            }
            BaseFamily::Hypergeometric { npop, k, n } => {
                if npop == 0 || k > npop || n > npop {
                    return reject(
                        "hypergeometric",
                        format!("require 0 ≤ K, n ≤ N with N ≥ 1; got N = {npop}, K = {k}, n = {n}"),
                    );
                }
            }
            BaseFamily::NegHypergeometric { npop, k, r } => {
                if r == 0 || r > k || k > npop {
                    return reject(
                        "neghypergeometric",
                        format!("require 1 ≤ r ≤ K ≤ N; got N = {npop}, K = {k}, r = {r}"),
                    );
                }
            }
            BaseFamily::BetaBinomial { n, alpha, beta } => {
                if n == 0 {
                    return reject("betabinomial", "n must be at least 1");
                }
                if !(alpha > 0.0 && beta > 0.0) {
                    return reject(
                        "betabinomial",
                        format!("alpha = {alpha}, beta = {beta} must be positive"),
                    );
                }
            }
        }
        Ok(())
    }

    pub fn support(&self) -> Support {
        match *self {
            BaseFamily::Zipf { x_max, .. } => match x_max {
                Some(m) => Support::bounded(1, m as i64),
                None => Support::from_lo(1),
            },
            BaseFamily::Zipfian { n, .. } => Support::bounded(1, n as i64),
            BaseFamily::LogSeries { .. } => Support::from_lo(1),
            BaseFamily::Geometric { start, .. } => Support::from_lo(start),
            BaseFamily::DLaplace { .. } => Support::all(),
            BaseFamily::Boltzmann { n, .. } => Support::bounded(0, n as i64 - 1),
            BaseFamily::Poisson { .. } => Support::from_lo(0),
            BaseFamily::NegBinomial { .. } => Support::from_lo(0),
            BaseFamily::YuleSimon { x_max, .. } => match x_max {
                Some(m) => Support::bounded(1, m as i64),
                None => Support::from_lo(1),
            },
            BaseFamily::BetaNegBinomial { .. } => Support::from_lo(0),
            BaseFamily::Binomial { n, .. } => Support::bounded(0, n as i64),
            BaseFamily::Hypergeometric { npop, k, n } => {
                let lo = (n + k).saturating_sub(npop) as i64;
                Support::bounded(lo, k.min(n) as i64)
            }
            BaseFamily::NegHypergeometric { npop, k, .. } => {
                Support::bounded(0, (npop - k) as i64)
            }
            BaseFamily::BetaBinomial { n, .. } => Support::bounded(0, n as i64),
        }
    }

    /// Exact log-PMF; `NEG_INFINITY` outside the support.
    pub fn logpmf(&self, x: i64) -> f64 {
        if !self.support().contains(x) {
            return f64::NEG_INFINITY;
        }
        let xf = x as f64;
        match *self {
            BaseFamily::Zipf { a, x_max } => {
                let z = match x_max {
                    Some(m) => harmonic(a, m),
                    None => zeta(a),
                };
                -a * xf.ln() - z.ln()
            }
            BaseFamily::Zipfian { a, n } => -a * xf.ln() - harmonic(a, n).ln(),
            BaseFamily::LogSeries { p } => {
                xf * p.ln() - xf.ln() - (-(-p).ln_1p()).ln()
            }
            BaseFamily::Geometric { p, start } => {
                p.ln() + (xf - start as f64) * (-p).ln_1p()
            }
            BaseFamily::DLaplace { a, loc } => {
                (a / 2.0).tanh().ln() - a * (xf - loc as f64).abs()
            }
            BaseFamily::Boltzmann { beta, n } => {
                let log_one_minus = |t: f64| (-(-t).exp()).ln_1p();
                -beta * xf + log_one_minus(beta) - log_one_minus(beta * n as f64)
            }
            BaseFamily::Poisson { lambda } => xf * lambda.ln() - lambda - ln_gamma(xf + 1.0),
            BaseFamily::NegBinomial { r, p } => {
                ln_choose(xf + r - 1.0, xf) + r * (-p).ln_1p() + xf * p.ln()
            }
            BaseFamily::YuleSimon { rho, x_max } => {
                let raw = rho.ln() + ln_beta(xf, rho + 1.0);
                match x_max {
                    None => raw,
                    Some(m) => {
                        let z: f64 = (1..=m)
                            .map(|k| (rho.ln() + ln_beta(k as f64, rho + 1.0)).exp())
                            .sum();
                        raw - z.ln()
                    }
                }
            }
            BaseFamily::BetaNegBinomial { r, alpha, beta } => {
                ln_choose(xf + r - 1.0, xf) + ln_beta(r + alpha, xf + beta)
                    - ln_beta(alpha, beta)
            }
            BaseFamily::Binomial { n, p } => {
                let nf = n as f64;
                ln_choose(nf, xf) + xf * p.ln() + (nf - xf) * (-p).ln_1p()
            }
            BaseFamily::Hypergeometric { npop, k, n } => {
                let (nf, kf, nd) = (npop as f64, k as f64, n as f64);
                ln_choose(kf, xf) + ln_choose(nf - kf, nd - xf) - ln_choose(nf, nd)
            }
            BaseFamily::NegHypergeometric { npop, k, r } => {
                let (nf, kf, rf) = (npop as f64, k as f64, r as f64);
                ln_choose(xf + rf - 1.0, xf) + ln_choose(nf - rf - xf, kf - rf)
                    - ln_choose(nf, kf)
            }
            BaseFamily::BetaBinomial { n, alpha, beta } => {
                let nf = n as f64;
                ln_choose(nf, xf) + ln_beta(xf + alpha, nf - xf + beta) - ln_beta(alpha, beta)
            }
        }
    }
}
