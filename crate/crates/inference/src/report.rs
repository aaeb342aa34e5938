//! The fit report: everything a run decided, in one serializable document.
//!
//! The JSON field set is a stable artifact contract — downstream tooling
//! reads these names, so they never change casually.

use std::collections::BTreeMap;

use evosearch::Candidate;
use exprcore::{canonicalize, format_expr};
use serde::{Deserialize, Serialize};
use targets::{BaseFamily, DistributionSpec, TargetDataset};

use crate::mixture::{extract_mixture, MixtureExtraction};
use crate::refine::{refine_params, DEFAULT_GRID};
use crate::validity::Diagnostics;
use crate::identify_family;

/// One mixture component as reported: its branch expression, resolved
/// weight (when the branch structure pins one down) and any family
/// parameters attributed to it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixtureComponentReport {
    pub expression: String,
    pub weight: Option<f64>,
    pub parameters: BTreeMap<String, f64>,
}

/// Structured output of a fit run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitReport {
    pub expression: String,
    pub canonical_expression: String,
    pub family: String,
    pub parameters: BTreeMap<String, f64>,
    pub loss: f64,
    pub normalization_residual: f64,
    pub max_logmass: f64,
    pub operator_counts: BTreeMap<String, usize>,
    pub mixture_components: Vec<MixtureComponentReport>,
    pub relaxation_level: u32,
    pub seed: u64,
    pub config: serde_json::Value,
}

/// Family reading of a chosen expression: name, refined parameters and any
/// mixture components.
#[derive(Clone, Debug)]
pub struct Interpretation {
    pub family: String,
    pub parameters: BTreeMap<String, f64>,
    pub mixture_components: Vec<MixtureComponentReport>,
}

/// Reads family structure out of the chosen expression and refines the
/// initializers against the target.
pub fn interpret(expr: &exprcore::Expr, target: &TargetDataset) -> Interpretation {
    match extract_mixture(expr) {
        Ok(ext) => interpret_mixture(&ext, target),
        Err(_) => interpret_base(expr, target),
    }
}

fn interpret_base(expr: &exprcore::Expr, target: &TargetDataset) -> Interpretation {
    match identify_family(expr) {
        Some(family) => {
            let init = DistributionSpec::base(family);
            let refined = refine_params(&init, target, &DEFAULT_GRID)
                .map(|fit| fit.spec)
                .unwrap_or(init);
            Interpretation {
                family: spec_family_label(&refined),
                parameters: spec_parameters(&refined),
                mixture_components: Vec::new(),
            }
        }
        None => Interpretation {
            family: "unknown".into(),
            parameters: BTreeMap::new(),
            mixture_components: Vec::new(),
        },
    }
}

fn interpret_mixture(ext: &MixtureExtraction, target: &TargetDataset) -> Interpretation {
    if let Some(zi) = &ext.zero_inflation {
        return interpret_zero_inflated(zi.pi, &zi.base_expr, target);
    }
    if let Some(bm) = &ext.binomial_mixture {
        return interpret_binomial_mixture(bm.n, &bm.components, ext, target);
    }

    // Unrecognized mixture: report the branches with softmax weights when
    // every branch exposes a log-weight.
    let weights = branch_weights(ext);
    let components = ext
        .branches
        .iter()
        .zip(weights)
        .map(|(b, w)| MixtureComponentReport {
            expression: format_expr(&b.expr),
            weight: w,
            parameters: BTreeMap::new(),
        })
        .collect();
    Interpretation {
        family: "mixture".into(),
        parameters: BTreeMap::new(),
        mixture_components: components,
    }
}

fn interpret_zero_inflated(
    pi: f64,
    base_expr: &exprcore::Expr,
    target: &TargetDataset,
) -> Interpretation {
    let base_family = identify_family(base_expr);
    let (family, parameters) = match base_family {
        Some(fam) => {
            let init = DistributionSpec::zero_inflated(pi, DistributionSpec::base(fam.clone()));
            let refined = refine_params(&init, target, &DEFAULT_GRID)
                .map(|fit| fit.spec)
                .unwrap_or(init);
            (spec_family_label(&refined), spec_parameters(&refined))
        }
        None => {
            let mut params = BTreeMap::new();
            params.insert("pi".to_string(), pi);
            ("zi-unknown".to_string(), params)
        }
    };

    let atom_weight = parameters.get("pi").copied().unwrap_or(pi);
    let mut components = vec![MixtureComponentReport {
        expression: "logdelta0(x0)".into(),
        weight: Some(atom_weight),
        parameters: BTreeMap::new(),
    }];
    let base_params: BTreeMap<String, f64> = parameters
        .iter()
        .filter(|(k, _)| k.as_str() != "pi")
        .map(|(k, v)| (k.clone(), *v))
        .collect();
    components.push(MixtureComponentReport {
        expression: format_expr(base_expr),
        weight: Some(1.0 - atom_weight),
        parameters: base_params,
    });
    Interpretation {
        family,
        parameters,
        mixture_components: components,
    }
}

fn interpret_binomial_mixture(
    n: f64,
    components: &[(f64, f64)],
    ext: &MixtureExtraction,
    target: &TargetDataset,
) -> Interpretation {
    let n_int = n.round().max(1.0) as u64;
    let spec = DistributionSpec::Mixture(
        components
            .iter()
            .map(|&(p, w)| (w, BaseFamily::Binomial { n: n_int, p }))
            .collect(),
    );
    let refined = refine_params(&spec, target, &DEFAULT_GRID)
        .map(|fit| fit.spec)
        .unwrap_or(spec);

    let mut parameters = BTreeMap::new();
    let mut reports = Vec::new();
    if let DistributionSpec::Mixture(comps) = &refined {
        // All components share n by construction; report it once.
        if let Some((_, BaseFamily::Binomial { n, .. })) = comps.first() {
            parameters.insert("n".to_string(), *n as f64);
        }
        // Keep components ordered by p for stable reporting.
        let mut ordered: Vec<(f64, f64)> = comps
            .iter()
            .map(|(w, f)| match f {
                BaseFamily::Binomial { p, .. } => (*p, *w),
                _ => unreachable!("components are binomials by construction"),
            })
            .collect();
        ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (i, (p, w)) in ordered.iter().enumerate() {
            parameters.insert(format!("p{}", i + 1), *p);
            parameters.insert(format!("w{}", i + 1), *w);
            let mut comp_params = BTreeMap::new();
            comp_params.insert("p".to_string(), *p);
            comp_params.insert("n".to_string(), n_int as f64);
            reports.push(MixtureComponentReport {
                expression: ext
                    .branches
                    .get(i)
                    .map(|b| format_expr(&b.expr))
                    .unwrap_or_default(),
                weight: Some(*w),
                parameters: comp_params,
            });
        }
    }
    Interpretation {
        family: "mix-binomial".into(),
        parameters,
        mixture_components: reports,
    }
}

/// Softmax of branch log-weights when every branch has one.
fn branch_weights(ext: &MixtureExtraction) -> Vec<Option<f64>> {
    let raw: Option<Vec<f64>> = ext.branches.iter().map(|b| b.log_weight).collect();
    match raw {
        Some(lws) => {
            let max = lws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let total: f64 = lws.iter().map(|lw| (lw - max).exp()).sum();
            lws.iter().map(|lw| Some((lw - max).exp() / total)).collect()
        }
        None => ext.branches.iter().map(|_| None).collect(),
    }
}

/// Family label of a refined spec: base name, `zi-<base>` or `mix-<base>`.
fn spec_family_label(spec: &DistributionSpec) -> String {
    match spec {
        DistributionSpec::Base(f) => f.name().to_string(),
        DistributionSpec::Mixture(comps) => match comps.first() {
            Some((_, f)) => format!("mix-{}", f.name()),
            None => "mixture".to_string(),
        },
        DistributionSpec::ZeroInflated { base, .. } => {
            format!("zi-{}", spec_family_label(base))
        }
    }
}

/// Flat parameter map of a spec, including structural extras (geometric
/// start, support caps) that refinement holds fixed.
fn spec_parameters(spec: &DistributionSpec) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    collect_parameters(spec, "", &mut out);
    out
}

fn collect_parameters(spec: &DistributionSpec, prefix: &str, out: &mut BTreeMap<String, f64>) {
    match spec {
        DistributionSpec::Base(f) => {
            for (name, value) in base_parameter_list(f) {
                out.insert(format!("{prefix}{name}"), value);
            }
        }
        DistributionSpec::Mixture(comps) => {
            for (i, (w, f)) in comps.iter().enumerate() {
                out.insert(format!("{prefix}w{}", i + 1), *w);
                let inner = format!("{prefix}c{}.", i + 1);
                collect_parameters(&DistributionSpec::Base(f.clone()), &inner, out);
            }
        }
        DistributionSpec::ZeroInflated { pi, base } => {
            out.insert(format!("{prefix}pi"), *pi);
            collect_parameters(base, prefix, out);
        }
    }
}

fn base_parameter_list(f: &BaseFamily) -> Vec<(&'static str, f64)> {
    use BaseFamily::*;
    match *f {
        Zipf { a, x_max } => {
            let mut v = vec![("a", a)];
            if let Some(m) = x_max {
                v.push(("x_max", m as f64));
            }
            v
        }
        Zipfian { a, n } => vec![("a", a), ("N", n as f64)],
        LogSeries { p } => vec![("p", p)],
        Geometric { p, start } => vec![("p", p), ("start", start as f64)],
        DLaplace { a, loc } => vec![("a", a), ("loc", loc as f64)],
        Boltzmann { beta, n } => vec![("beta", beta), ("N", n as f64)],
        Poisson { lambda } => vec![("lam", lambda)],
        NegBinomial { r, p } => vec![("r", r), ("p", p)],
        YuleSimon { rho, x_max } => {
            let mut v = vec![("rho", rho)];
            if let Some(m) = x_max {
                v.push(("x_max", m as f64));
            }
            v
        }
        BetaNegBinomial { r, alpha, beta } => {
            vec![("r", r), ("alpha", alpha), ("beta", beta)]
        }
        Binomial { n, p } => vec![("n", n as f64), ("p", p)],
        Hypergeometric { npop, k, n } => {
            vec![("N", npop as f64), ("K", k as f64), ("n", n as f64)]
        }
        NegHypergeometric { npop, k, r } => {
            vec![("N", npop as f64), ("K", k as f64), ("r", r as f64)]
        }
        BetaBinomial { n, alpha, beta } => {
            vec![("n", n as f64), ("alpha", alpha), ("beta", beta)]
        }
    }
}

/// Assembles the full report for a chosen candidate.
pub fn build_fit_report(
    chosen: &Candidate,
    target: &TargetDataset,
    diagnostics: &Diagnostics,
    relaxation_level: u32,
    seed: u64,
    config: serde_json::Value,
) -> FitReport {
    let canonical = canonicalize(&chosen.expr);
    let interpretation = interpret(&chosen.expr, target);
    let operator_counts = chosen
        .expr
        .operator_counts()
        .nonzero()
        .into_iter()
        .map(|(name, count)| (name.to_string(), count))
        .collect();
    FitReport {
        expression: format_expr(&chosen.expr),
        canonical_expression: format_expr(&canonical),
        family: interpretation.family,
        parameters: interpretation.parameters,
        loss: diagnostics.loss,
        normalization_residual: diagnostics.normalization_residual,
        max_logmass: diagnostics.max_logmass,
        operator_counts,
        mixture_components: interpretation.mixture_components,
        relaxation_level,
        seed,
        config,
    }
}
