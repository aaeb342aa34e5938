//! Distribution specifications: a base family, optionally wrapped in a
//! finite mixture or a zero-inflation layer, plus the textual spec-string
//! format used in configs and reports.
//!
//! Spec strings look like `poisson:lam=12`, `zi:pi=0.35;poisson:lam=3`, or
//! `mix:w=0.5,0.3,0.2;binomial:n=7,p=0.25|0.55|0.8` — a family name
//! followed by `key=value` pairs, with `|`-separated per-component values
//! inside a homogeneous mixture.

use crate::family::{BaseFamily, InvalidSpec, Support};
use thiserror::Error;

/// Mixture weights must sum to one within this slack.
const WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum DistributionSpec {
    Base(BaseFamily),
    /// Finite mixture Σ wᵢ·pᵢ(x); weights positive, summing to 1.
    Mixture(Vec<(f64, BaseFamily)>),
    /// π·δ₀(x) + (1−π)·base(x).
    ZeroInflated { pi: f64, base: Box<DistributionSpec> },
}

/// Requested point carries zero probability mass under the spec.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("x = {x} lies outside the support of {spec}")]
pub struct OutOfSupport {
    pub x: i64,
    pub spec: String,
}

impl DistributionSpec {
    pub fn base(family: BaseFamily) -> Self {
        DistributionSpec::Base(family)
    }

    pub fn zero_inflated(pi: f64, base: DistributionSpec) -> Self {
        DistributionSpec::ZeroInflated { pi, base: Box::new(base) }
    }

    pub fn validate(&self) -> Result<(), InvalidSpec> {
        match self {
            DistributionSpec::Base(f) => f.validate(),
            DistributionSpec::Mixture(comps) => {
                if comps.is_empty() {
                    return Err(InvalidSpec {
                        family: "mix",
                        reason: "mixture needs at least one component".into(),
                    });
                }
                let mut total = 0.0;
                for (w, comp) in comps {
                    if !(*w > 0.0) {
                        return Err(InvalidSpec {
                            family: "mix",
                            reason: format!("weight {w} must be positive"),
                        });
                    }
                    total += w;
                    comp.validate()?;
                }
                if (total - 1.0).abs() > WEIGHT_TOL {
                    return Err(InvalidSpec {
                        family: "mix",
                        reason: format!("weights sum to {total}, expected 1"),
                    });
                }
                Ok(())
            }
            DistributionSpec::ZeroInflated { pi, base } => {
                if !(*pi > 0.0 && *pi < 1.0) {
                    return Err(InvalidSpec {
                        family: "zi",
                        reason: format!("pi = {pi} must lie in (0, 1)"),
                    });
                }
                base.validate()
            }
        }
    }

    pub fn support(&self) -> Support {
        match self {
            DistributionSpec::Base(f) => f.support(),
            DistributionSpec::Mixture(comps) => comps
                .iter()
                .map(|(_, c)| c.support())
                .reduce(|a, b| a.union(&b))
                .unwrap_or(Support::bounded(0, 0)),
            DistributionSpec::ZeroInflated { base, .. } => {
                base.support().union(&Support::bounded(0, 0))
            }
        }
    }

    /// Log-probability at `x`; `NEG_INFINITY` where the spec has no mass.
    pub fn logpmf(&self, x: i64) -> f64 {
        match self {
            DistributionSpec::Base(f) => f.logpmf(x),
            DistributionSpec::Mixture(comps) => log_sum_exp(
                comps
                    .iter()
                    .map(|(w, c)| w.ln() + c.logpmf(x))
                    .filter(|t| t.is_finite()),
            ),
            DistributionSpec::ZeroInflated { pi, base } => {
                let rest = (1.0 - pi).ln() + base.logpmf(x);
                if x == 0 {
                    log_sum_exp([pi.ln(), rest].into_iter().filter(|t| t.is_finite()))
                } else {
                    rest
                }
            }
        }
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return f64::NEG_INFINITY;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Exact log-PMF of `spec` at `x`.
///
/// Mixture and zero-inflation wrappers compose exactly: the mixture is a
/// log-sum-exp over weighted component log-PMFs, zero inflation adds an
/// atom at the origin.
pub fn true_logpmf(spec: &DistributionSpec, x: i64) -> Result<f64, OutOfSupport> {
    let v = spec.logpmf(x);
    if v == f64::NEG_INFINITY {
        Err(OutOfSupport { x, spec: format_spec(spec) })
    } else {
        Ok(v)
    }
}

// ---------------------------------------------------------------------------
// Spec-string parsing and formatting
// ---------------------------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseSpecError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("{family}: missing parameter `{key}`")]
    MissingParameter { family: String, key: String },
    #[error("{family}: unexpected parameter `{key}`")]
    UnexpectedParameter { family: String, key: String },
    #[error("{family}: cannot parse `{key}={value}`")]
    BadValue { family: String, key: String, value: String },
    #[error("malformed spec string: {0}")]
    Malformed(String),
    #[error(transparent)]
    Invalid(#[from] InvalidSpec),
}

/// Parsed `key=value` pairs of a single `family:...` section.
struct ParamMap {
    family: String,
    pairs: Vec<(String, String)>,
}

impl ParamMap {
    fn from_section(section: &str) -> Result<ParamMap, ParseSpecError> {
        let (name, rest) = section
            .split_once(':')
            .ok_or_else(|| ParseSpecError::Malformed(format!("`{section}` has no `:`")))?;
        let mut pairs = Vec::new();
        for item in rest.split(',') {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                ParseSpecError::Malformed(format!("`{item}` is not key=value"))
            })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(ParamMap { family: name.trim().to_string(), pairs })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        let idx = self.pairs.iter().position(|(k, _)| k == key)?;
        Some(self.pairs.remove(idx).1)
    }

    fn f64(&mut self, key: &str) -> Result<f64, ParseSpecError> {
        let raw = self.take(key).ok_or_else(|| ParseSpecError::MissingParameter {
            family: self.family.clone(),
            key: key.into(),
        })?;
        raw.parse().map_err(|_| ParseSpecError::BadValue {
            family: self.family.clone(),
            key: key.into(),
            value: raw,
        })
    }

    fn u64(&mut self, key: &str) -> Result<u64, ParseSpecError> {
        let raw = self.take(key).ok_or_else(|| ParseSpecError::MissingParameter {
            family: self.family.clone(),
            key: key.into(),
        })?;
        raw.parse().map_err(|_| ParseSpecError::BadValue {
            family: self.family.clone(),
            key: key.into(),
            value: raw,
        })
    }

    fn u64_opt(&mut self, key: &str) -> Result<Option<u64>, ParseSpecError> {
        match self.take(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| ParseSpecError::BadValue {
                family: self.family.clone(),
                key: key.into(),
                value: raw,
            }),
        }
    }

    fn i64_or(&mut self, key: &str, default: i64) -> Result<i64, ParseSpecError> {
        match self.take(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|_| ParseSpecError::BadValue {
                family: self.family.clone(),
                key: key.into(),
                value: raw,
            }),
        }
    }

    fn finish(self) -> Result<(), ParseSpecError> {
        if let Some((k, _)) = self.pairs.into_iter().next() {
            return Err(ParseSpecError::UnexpectedParameter { family: self.family, key: k });
        }
        Ok(())
    }
}

fn parse_base_section(section: &str) -> Result<BaseFamily, ParseSpecError> {
    let mut m = ParamMap::from_section(section)?;
    let fam = match m.family.as_str() {
        "zipf" => BaseFamily::Zipf { a: m.f64("a")?, x_max: m.u64_opt("xmax")? },
        "zipfian" => BaseFamily::Zipfian { a: m.f64("a")?, n: m.u64("N")? },
        "logseries" => BaseFamily::LogSeries { p: m.f64("p")? },
        "geometric" => BaseFamily::Geometric { p: m.f64("p")?, start: m.i64_or("start", 1)? },
        "dlaplace" => BaseFamily::DLaplace { a: m.f64("a")?, loc: m.i64_or("loc", 0)? },
        "boltzmann" => BaseFamily::Boltzmann { beta: m.f64("beta")?, n: m.u64("N")? },
        "poisson" => BaseFamily::Poisson { lambda: m.f64("lam")? },
        "negbinomial" => BaseFamily::NegBinomial { r: m.f64("r")?, p: m.f64("p")? },
        "yulesimon" => BaseFamily::YuleSimon { rho: m.f64("rho")?, x_max: m.u64_opt("xmax")? },
        "betanegbinomial" => BaseFamily::BetaNegBinomial {
            r: m.f64("r")?,
            alpha: m.f64("alpha")?,
            beta: m.f64("beta")?,
        },
        "binomial" => BaseFamily::Binomial { n: m.u64("n")?, p: m.f64("p")? },
        "hypergeometric" => BaseFamily::Hypergeometric {
            npop: m.u64("N")?,
            k: m.u64("K")?,
            n: m.u64("n")?,
        },
        "neghypergeometric" => BaseFamily::NegHypergeometric {
            npop: m.u64("N")?,
            k: m.u64("K")?,
            r: m.u64("r")?,
        },
        "betabinomial" => BaseFamily::BetaBinomial {
            n: m.u64("n")?,
            alpha: m.f64("alpha")?,
            beta: m.f64("beta")?,
        },
        other => return Err(ParseSpecError::UnknownFamily(other.to_string())),
    };
    m.finish()?;
    Ok(fam)
}

/// Expand a homogeneous-mixture section (`binomial:n=7,p=0.25|0.55|0.8`)
/// into one section string per component.
fn expand_components(section: &str, count: usize) -> Result<Vec<String>, ParseSpecError> {
    let (name, rest) = section
        .split_once(':')
        .ok_or_else(|| ParseSpecError::Malformed(format!("`{section}` has no `:`")))?;
    let mut per_component: Vec<Vec<String>> = vec![Vec::new(); count];
    for item in rest.split(',') {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| ParseSpecError::Malformed(format!("`{item}` is not key=value")))?;
        let values: Vec<&str> = v.split('|').collect();
        if values.len() != 1 && values.len() != count {
            return Err(ParseSpecError::Malformed(format!(
                "parameter `{k}` lists {} values for {count} components",
                values.len()
            )));
        }
        for (i, comp) in per_component.iter_mut().enumerate() {
            let value = if values.len() == 1 { values[0] } else { values[i] };
            comp.push(format!("{k}={value}"));
        }
    }
    Ok(per_component
        .into_iter()
        .map(|kv| format!("{name}:{}", kv.join(",")))
        .collect())
}

/// Parse a spec string (see module docs for the grammar).
pub fn parse_spec(text: &str) -> Result<DistributionSpec, ParseSpecError> {
    let text = text.trim();
    let spec = if let Some(rest) = text.strip_prefix("zi:") {
        let (head, base_text) = rest
            .split_once(';')
            .ok_or_else(|| ParseSpecError::Malformed("zi: needs a base spec after `;`".into()))?;
        let mut m = ParamMap::from_section(&format!("zi:{head}"))?;
        let pi = m.f64("pi")?;
        m.finish()?;
        DistributionSpec::zero_inflated(pi, parse_spec(base_text)?)
    } else if let Some(rest) = text.strip_prefix("mix:") {
        let (head, comp_text) = rest
            .split_once(';')
            .ok_or_else(|| ParseSpecError::Malformed("mix: needs component specs after `;`".into()))?;
        let head = head
            .strip_prefix("w=")
            .ok_or_else(|| ParseSpecError::Malformed("mix: expects `w=...` first".into()))?;
        let weights: Vec<f64> = head
            .split(',')
            .map(|t| {
                t.trim().parse().map_err(|_| ParseSpecError::BadValue {
                    family: "mix".into(),
                    key: "w".into(),
                    value: t.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        let sections: Vec<&str> = comp_text.split(';').collect();
        let expanded = if sections.len() == 1 {
            expand_components(sections[0], weights.len())?
        } else if sections.len() == weights.len() {
            sections.iter().map(|s| s.to_string()).collect()
        } else {
            return Err(ParseSpecError::Malformed(format!(
                "{} weights but {} component sections",
                weights.len(),
                sections.len()
            )));
        };
        let comps = weights
            .into_iter()
            .zip(expanded.iter())
            .map(|(w, sec)| Ok((w, parse_base_section(sec)?)))
            .collect::<Result<Vec<_>, ParseSpecError>>()?;
        DistributionSpec::Mixture(comps)
    } else {
        if text.contains(';') {
            return Err(ParseSpecError::Malformed(
                "`;` outside a mix:/zi: wrapper".into(),
            ));
        }
        DistributionSpec::Base(parse_base_section(text)?)
    };
    spec.validate()?;
    Ok(spec)
}

/// Canonical `key=value` pairs of a base family, optional keys included
/// only when they differ from their defaults.
fn base_params(f: &BaseFamily) -> Vec<(&'static str, String)> {
    fn num(v: f64) -> String {
        v.to_string()
    }
    match f {
        BaseFamily::Zipf { a, x_max } => {
            let mut ps = vec![("a", num(*a))];
            if let Some(m) = x_max {
                ps.push(("xmax", m.to_string()));
            }
            ps
        }
        BaseFamily::Zipfian { a, n } => vec![("a", num(*a)), ("N", n.to_string())],
        BaseFamily::LogSeries { p } => vec![("p", num(*p))],
        BaseFamily::Geometric { p, start } => {
            let mut ps = vec![("p", num(*p))];
            if *start != 1 {
                ps.push(("start", start.to_string()));
            }
            ps
        }
        BaseFamily::DLaplace { a, loc } => {
            let mut ps = vec![("a", num(*a))];
            if *loc != 0 {
                ps.push(("loc", loc.to_string()));
            }
            ps
        }
        BaseFamily::Boltzmann { beta, n } => vec![("beta", num(*beta)), ("N", n.to_string())],
        BaseFamily::Poisson { lambda } => vec![("lam", num(*lambda))],
        BaseFamily::NegBinomial { r, p } => vec![("r", num(*r)), ("p", num(*p))],
        BaseFamily::YuleSimon { rho, x_max } => {
            let mut ps = vec![("rho", num(*rho))];
            if let Some(m) = x_max {
                ps.push(("xmax", m.to_string()));
            }
            ps
        }
        BaseFamily::BetaNegBinomial { r, alpha, beta } => {
            vec![("r", num(*r)), ("alpha", num(*alpha)), ("beta", num(*beta))]
        }
        BaseFamily::Binomial { n, p } => vec![("n", n.to_string()), ("p", num(*p))],
        BaseFamily::Hypergeometric { npop, k, n } => {
            vec![("N", npop.to_string()), ("K", k.to_string()), ("n", n.to_string())]
        }
        BaseFamily::NegHypergeometric { npop, k, r } => {
            vec![("N", npop.to_string()), ("K", k.to_string()), ("r", r.to_string())]
        }
        BaseFamily::BetaBinomial { n, alpha, beta } => {
            vec![("n", n.to_string()), ("alpha", num(*alpha)), ("beta", num(*beta))]
        }
    }
}

fn format_base(f: &BaseFamily) -> String {
    let body: Vec<String> = base_params(f)
        .into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    format!("{}:{}", f.name(), body.join(","))
}

/// Render a spec as its spec string. `parse_spec(&format_spec(s)) == s`.
pub fn format_spec(spec: &DistributionSpec) -> String {
    match spec {
        DistributionSpec::Base(f) => format_base(f),
        DistributionSpec::Mixture(comps) => {
            let weights: Vec<String> = comps.iter().map(|(w, _)| w.to_string()).collect();
            let head = format!("mix:w={}", weights.join(","));
            let params: Vec<Vec<(&'static str, String)>> =
                comps.iter().map(|(_, c)| base_params(c)).collect();
            let same_family = comps.windows(2).all(|w| w[0].1.name() == w[1].1.name());
            let same_keys = params.windows(2).all(|w| {
                w[0].iter().map(|(k, _)| k).eq(w[1].iter().map(|(k, _)| k))
            });
            if same_family && same_keys && !comps.is_empty() {
                // Merged form: one section, `|`-joined where values differ.
                let mut body = Vec::new();
                for key_idx in 0..params[0].len() {
                    let key = params[0][key_idx].0;
                    let vals: Vec<&str> =
                        params.iter().map(|p| p[key_idx].1.as_str()).collect();
                    let joined = if vals.windows(2).all(|w| w[0] == w[1]) {
                        vals[0].to_string()
                    } else {
                        vals.join("|")
                    };
                    body.push(format!("{key}={joined}"));
                }
                format!("{head};{}:{}", comps[0].1.name(), body.join(","))
            } else {
                let sections: Vec<String> =
                    comps.iter().map(|(_, c)| format_base(c)).collect();
                format!("{head};{}", sections.join(";"))
            }
        }
        DistributionSpec::ZeroInflated { pi, base } => {
            format!("zi:pi={};{}", pi, format_spec(base))
        }
    }
}
