//! The end-to-end fit: counts → smoothed weighted target → evolutionary
//! search → validity filter (with loss-threshold relaxation) → stable
//! rank → family identification and parameter refinement → report.

use std::cmp::Ordering;
use std::fs;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use evosearch::{search_with_progress, Candidate, ProgressRecord, SearchError};
use exprcore::{format_expr, Expr, Program};
use inference::{
    build_fit_report, diagnose, filter_with_relaxation, rank, validity_filter, Diagnostics,
    FitReport, ValidityConfig, MAX_RELAXATION_LEVEL,
};
use targets::{build_target, sample, CountTable, CountsError, EmptyFit, TargetDataset};
use thiserror::Error;

use crate::config::{ConfigError, FitSettings, InputSource, RunConfig};

#[derive(Debug, Error)]
pub enum FitError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Counts(#[from] CountsError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    EmptyFit(#[from] EmptyFit),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(
        "no candidate passed validity after {attempts} relaxation levels; nearest miss: {nearest}"
    )]
    NoSurvivors { attempts: u32, nearest: String },
}

fn io_err(path: &Path, source: std::io::Error) -> FitError {
    FitError::Io { path: path.display().to_string(), source }
}

/// The search half of a fit, shared by `run_fit` and the benchmark
/// driver: search the target, filter with relaxation, rank, and return
/// the winner with its acceptance diagnostics.
pub(crate) struct SelectedModel {
    pub candidate: Candidate,
    pub diagnostics: Diagnostics,
    pub relaxation_level: u32,
}

pub(crate) fn select_model(
    target: &TargetDataset,
    settings: &FitSettings,
    sink: &mut dyn FnMut(&ProgressRecord),
) -> Result<SelectedModel, FitError> {
    let profiles = settings.resolve_profiles()?;
    let pool = search_with_progress(target, &settings.search_config(), &profiles, sink)?;
    let vcfg = ValidityConfig::default();
    let outcome = match filter_with_relaxation(&pool, target, &vcfg) {
        Ok(outcome) => outcome,
        Err(_) => return Err(nearest_miss(&pool, target, &vcfg)),
    };
    let ranked = rank(&outcome.survivors).expect("relaxation returned survivors");
    let candidate = ranked.into_iter().next().expect("ranked pool is non-empty");
    // Diagnostics of the winner under the thresholds that admitted it.
    let scaled = vcfg.with_loss_scaled(f64::powi(2.0, outcome.relaxation_level as i32));
    let diagnostics = diagnose(&candidate.expr, target, &scaled);
    Ok(SelectedModel { candidate, diagnostics, relaxation_level: outcome.relaxation_level })
}

/// When even the fully relaxed ladder rejects everything, report the
/// candidate that came closest (fewest failed checks, then lowest loss)
/// so the user sees *why* instead of a bare "no survivors".
fn nearest_miss(pool: &[Candidate], target: &TargetDataset, vcfg: &ValidityConfig) -> FitError {
    let attempts = MAX_RELAXATION_LEVEL + 1;
    let scaled = vcfg.with_loss_scaled(f64::powi(2.0, MAX_RELAXATION_LEVEL as i32));
    let (_, diags) = validity_filter(pool, target, &scaled);
    let nearest = diags
        .iter()
        .zip(pool)
        .min_by(|(a, _), (b, _)| {
            (a.failures.len().cmp(&b.failures.len()))
                .then(a.loss.partial_cmp(&b.loss).unwrap_or(Ordering::Equal))
        })
        .map(|(d, c)| format!("`{}`: {}", format_expr(&c.expr), d.failures.join("; ")))
        .unwrap_or_else(|| "candidate pool is empty".into());
    FitError::NoSurvivors { attempts, nearest }
}

fn load_counts(input: &InputSource, seed: u64) -> Result<CountTable, FitError> {
    match input {
        InputSource::CountsCsv(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            Ok(CountTable::from_csv(&text)?)
        }
        InputSource::Synthetic { spec, samples } => Ok(sample(spec, *samples, seed)),
    }
}

/// Run a complete fit and write whatever outputs the config asks for.
/// The returned report is exactly what lands in `--out`.
pub fn run_fit(cfg: &RunConfig) -> Result<FitReport, FitError> {
    let counts = load_counts(&cfg.input, cfg.settings.seed)?;
    let target =
        build_target(&counts, cfg.settings.alpha, cfg.settings.tau, cfg.settings.gamma)?;

    let mut progress = match &cfg.progress {
        Some(path) => {
            Some(BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?))
        }
        None => None,
    };
    let selected = select_model(&target, &cfg.settings, &mut |rec| {
        if let Some(w) = progress.as_mut() {
            let _ = writeln!(
                w,
                "pop={} profile={} gen={} loss={:.6e} complexity={} expr={}",
                rec.population,
                rec.profile,
                rec.generation,
                rec.best_loss,
                rec.best_complexity,
                rec.best_expr
            );
        }
    })?;
    if let Some(mut w) = progress {
        w.flush().map_err(|e| io_err(cfg.progress.as_ref().unwrap(), e))?;
    }

    let mut config_json = cfg.settings.to_json();
    if let serde_json::Value::Object(map) = &mut config_json {
        for (k, v) in cfg.input.describe() {
            map.insert(k, v);
        }
    }
    let report = build_fit_report(
        &selected.candidate,
        &target,
        &selected.diagnostics,
        selected.relaxation_level,
        cfg.settings.seed,
        config_json,
    );

    if let Some(path) = &cfg.out {
        let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| io_err(path, e))?;
    }
    if let Some(path) = &cfg.plot_data {
        let csv = plot_csv(&target, &selected.candidate.expr);
        fs::write(path, csv).map_err(|e| io_err(path, e))?;
    }
    Ok(report)
}

/// Plot-data table over the retained support: smoothed observation,
/// model value, and fit weight per point.
pub fn plot_csv(target: &TargetDataset, expr: &Expr) -> String {
    let program = Program::compile(expr);
    let mut stack = Vec::new();
    let mut out = String::from("x,y_target,f_model,weight\n");
    for i in 0..target.len() {
        let x = target.xs[i];
        let f = match program.eval_with(x, &mut stack) {
            Some(v) => format!("{v:?}"),
            None => "nan".into(),
        };
        out.push_str(&format!("{},{:?},{},{:?}\n", x, target.y[i], f, target.w[i]));
    }
    out
}
