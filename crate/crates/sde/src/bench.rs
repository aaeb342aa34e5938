//! Benchmark orchestration over the named target catalog.
//!
//! Each suite row samples a training set, fits it, then scores the chosen
//! expression on an *independently sampled* target (same family, different
//! derived seed), so the reported MSE measures generalization rather than
//! memorized noise. Rows run concurrently up to a jobs limit, are written
//! out incrementally so interrupted suites stay usable, and failures are
//! recorded as rows instead of aborting the run.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use exprcore::{canonicalize, decompose, format_expr, parse, Expr, Program};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use targets::{
    benchmark_entries, build_target, fast_suite, format_spec, full_suite, sample, subseed,
    BenchEntry, TargetDataset,
};
use thiserror::Error;

use crate::config::FitSettings;
use crate::fit::{select_model, FitError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown family `{name}` (known: {known})")]
    UnknownFamily { name: String, known: String },
    #[error("suite selection is empty")]
    EmptySuite,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// One benchmark run: which rows, how much data, how wide.
#[derive(Clone, Debug)]
pub struct BenchSettings {
    /// Resolved family names (see [`resolve_suite`]).
    pub suite: Vec<String>,
    pub samples: u64,
    pub jobs: usize,
    /// Fit knobs; `fit.seed` is the suite master seed.
    pub fit: FitSettings,
}

/// Per-family result row. `error` is set (and the model fields empty)
/// when any stage failed for this family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchRow {
    pub family: String,
    /// True generating spec, in parseable spec-string form.
    pub spec: String,
    /// Row seed: every stream this row uses is derived from it.
    pub seed: u64,
    pub train_seed: u64,
    pub eval_seed: u64,
    pub expression: Option<String>,
    pub inferred_family: Option<String>,
    pub inferred_params: BTreeMap<String, f64>,
    /// Mean squared error of the model against the held-out target's
    /// smoothed log-PMF over its fit support.
    pub eval_mse: Option<f64>,
    /// First generation at which any population's best candidate had the
    /// structural fingerprint of the final model.
    pub generations_to_discovery: Option<usize>,
    pub relaxation_level: Option<u32>,
    pub wall_time_s: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub suite: Vec<String>,
    pub samples: u64,
    pub seed: u64,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub rows: Vec<BenchRow>,
}

/// Expand a `--suite` selector into catalog names: `fast`, `full`, or a
/// comma list of entry names.
pub fn resolve_suite(selector: &str) -> Result<Vec<String>, BenchError> {
    let known: Vec<&str> = benchmark_entries().iter().map(|e| e.name).collect();
    let names: Vec<String> = match selector {
        "fast" => fast_suite().into_iter().map(String::from).collect(),
        "full" => full_suite().into_iter().map(String::from).collect(),
        list => list
            .split(',')
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
            .collect(),
    };
    if names.is_empty() {
        return Err(BenchError::EmptySuite);
    }
    for name in &names {
        if !known.contains(&name.as_str()) {
            return Err(BenchError::UnknownFamily {
                name: name.clone(),
                known: known.join(", "),
            });
        }
    }
    Ok(names)
}

/// Run the suite. When `out` is given the report is rewritten after every
/// completed row (sorted by family name), so partial runs remain usable.
pub fn run_bench(settings: &BenchSettings, out: Option<&Path>) -> Result<BenchReport, BenchError> {
    let catalog = benchmark_entries();
    let entries: Vec<BenchEntry> = settings
        .suite
        .iter()
        .map(|name| {
            catalog
                .iter()
                .find(|e| e.name == name.as_str())
                .cloned()
                .ok_or_else(|| BenchError::UnknownFamily {
                    name: name.clone(),
                    known: catalog.iter().map(|e| e.name).collect::<Vec<_>>().join(", "),
                })
        })
        .collect::<Result<_, _>>()?;

    let shell = BenchReport {
        suite: settings.suite.clone(),
        samples: settings.samples,
        seed: settings.fit.seed,
        config_hash: settings.fit.config_hash(),
        config: settings.fit.to_json(),
        rows: Vec::new(),
    };
    let report = Mutex::new(shell);
    let out_path: Option<PathBuf> = out.map(Path::to_path_buf);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs.max(1))
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    pool.install(|| {
        entries.par_iter().for_each(|entry| {
            let row = bench_row(entry, settings);
            let mut guard = report.lock().expect("report lock");
            guard.rows.push(row);
            guard.rows.sort_by(|a, b| a.family.cmp(&b.family));
            if let Some(path) = &out_path {
                // Incremental snapshot; the final write below is the one
                // whose failure aborts the run.
                let _ = write_report(path, &guard);
            }
        });
    });

    let report = report.into_inner().expect("report lock");
    if let Some(path) = out {
        write_report(path, &report)
            .map_err(|e| BenchError::Io { path: path.display().to_string(), source: e })?;
    }
    Ok(report)
}

fn write_report(path: &Path, report: &BenchReport) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    fs::write(path, text)
}

fn bench_row(entry: &BenchEntry, settings: &BenchSettings) -> BenchRow {
    let started = Instant::now();
    let row_seed = subseed(settings.fit.seed, &format!("bench/{}", entry.name));
    let train_seed = subseed(row_seed, "train");
    let eval_seed = subseed(row_seed, "eval");
    let mut row = BenchRow {
        family: entry.name.to_string(),
        spec: format_spec(&entry.spec),
        seed: row_seed,
        train_seed,
        eval_seed,
        expression: None,
        inferred_family: None,
        inferred_params: BTreeMap::new(),
        eval_mse: None,
        generations_to_discovery: None,
        relaxation_level: None,
        wall_time_s: 0.0,
        error: None,
    };

    let outcome = (|| -> Result<(), FitError> {
        let counts = sample(&entry.spec, settings.samples, train_seed);
        let target =
            build_target(&counts, settings.fit.alpha, settings.fit.tau, settings.fit.gamma)?;

        let mut fit = settings.fit.clone();
        fit.seed = subseed(row_seed, "search");
        let mut progress: Vec<(usize, String)> = Vec::new();
        let selected = select_model(&target, &fit, &mut |rec| {
            progress.push((rec.generation, rec.best_expr.clone()));
        })?;

        row.expression = Some(format_expr(&selected.candidate.expr));
        row.relaxation_level = Some(selected.relaxation_level);
        row.generations_to_discovery =
            discovery_generation(&progress, &selected.candidate.expr);

        let interp = inference::interpret(&selected.candidate.expr, &target);
        row.inferred_family = Some(interp.family);
        row.inferred_params = interp.parameters;

        let eval_counts = sample(&entry.spec, settings.samples, eval_seed);
        let eval_target = build_target(
            &eval_counts,
            settings.fit.alpha,
            settings.fit.tau,
            settings.fit.gamma,
        )?;
        row.eval_mse = eval_mse(&selected.candidate.expr, &eval_target);
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row.wall_time_s = started.elapsed().as_secs_f64();
    row
}

/// Unweighted MSE of the model log-PMF against the held-out smoothed
/// log-frequencies; `None` if the model is undefined anywhere on the
/// held-out support.
fn eval_mse(expr: &Expr, eval_target: &TargetDataset) -> Option<f64> {
    let program = Program::compile(expr);
    let mut stack = Vec::new();
    let mut sum = 0.0;
    for i in 0..eval_target.len() {
        let f = program.eval_with(eval_target.xs[i], &mut stack)?;
        if !f.is_finite() {
            return None;
        }
        let d = f - eval_target.y[i];
        sum += d * d;
    }
    Some(sum / eval_target.len() as f64)
}

/// First generation whose per-population best matches the final model's
/// structural fingerprint. Stagnant generations repeat the same best
/// expression, so fingerprints are memoized by expression text.
fn discovery_generation(progress: &[(usize, String)], final_expr: &Expr) -> Option<usize> {
    let wanted = decompose(&canonicalize(final_expr)).fingerprint();
    let mut records: Vec<&(usize, String)> = progress.iter().collect();
    records.sort_by_key(|(generation, _)| *generation);
    let mut memo: HashMap<&str, bool> = HashMap::new();
    for (generation, text) in records {
        let hit = *memo.entry(text.as_str()).or_insert_with(|| {
            parse(text)
                .map(|e| decompose(&canonicalize(&e)).fingerprint() == wanted)
                .unwrap_or(false)
        });
        if hit {
            return Some(*generation);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_selectors_expand_and_validate() {
        assert_eq!(
            resolve_suite("fast").unwrap(),
            vec!["poisson", "geometric", "zipf", "zipfian", "yulesimon", "boltzmann"]
        );
        assert_eq!(resolve_suite("full").unwrap().len(), 14);
        assert_eq!(
            resolve_suite("poisson, zig").unwrap(),
            vec!["poisson".to_string(), "zig".to_string()]
        );
        assert!(matches!(
            resolve_suite("poisson,nonesuch"),
            Err(BenchError::UnknownFamily { .. })
        ));
        assert!(matches!(resolve_suite(","), Err(BenchError::EmptySuite)));
    }

    #[test]
    fn discovery_generation_finds_first_structural_match() {
        let final_expr = parse("(x0 * 2.485) - (logF(x0) + 12.01)").unwrap();
        let progress = vec![
            (0, "x0 * -0.3".to_string()),
            (1, "x0 * -0.31".to_string()),
            // Same structure as the final model, different constants.
            (2, "(x0 * 2.4) - (logF(x0) + 11.0)".to_string()),
            (3, "(x0 * 2.485) - (logF(x0) + 12.01)".to_string()),
        ];
        assert_eq!(discovery_generation(&progress, &final_expr), Some(2));
        let never = parse("sin(x0) * 3").unwrap();
        assert_eq!(discovery_generation(&progress, &never), None);
    }

    #[test]
    fn eval_mse_matches_hand_computation_and_flags_domain_errors() {
        let spec = targets::parse_spec("poisson:lam=12").unwrap();
        let eval_target = targets::noiseless_target(&spec, 50_000, 4.0).unwrap();
        // The exact log-PMF reproduces the noiseless target: MSE ~ 0.
        let exact = parse("(x0 * 2.4849066497880004) - (logF(x0) + 12)").unwrap();
        let mse = eval_mse(&exact, &eval_target).unwrap();
        assert!(mse < 1e-12, "{mse}");
        // A shifted model scores its squared offset.
        let off = parse("((x0 * 2.4849066497880004) - (logF(x0) + 12)) + 0.5").unwrap();
        let mse_off = eval_mse(&off, &eval_target).unwrap();
        assert!((mse_off - 0.25).abs() < 1e-9, "{mse_off}");
        // Domain errors yield None rather than a fake number.
        let broken = parse("log(x0 - 100)").unwrap();
        assert_eq!(eval_mse(&broken, &eval_target), None);
    }
}
