//! `sde eval`: tabulate an expression over an integer window, optionally
//! running the target-independent validity checks (normalization, log-mass,
//! operator caps) against that window. Reconstruction loss needs observed
//! data and is out of scope here.

use exprcore::{parse, Expr, ParseError, Program};
use inference::{capped_operator_counts, ValidityConfig};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("empty window: --x-min {x_min} exceeds --x-max {x_max}")]
    EmptyWindow { x_min: i64, x_max: i64 },
}

#[derive(Clone, Debug)]
pub struct EvalRequest {
    pub expr_text: String,
    pub x_min: i64,
    pub x_max: i64,
    pub check_validity: bool,
}

/// Window-level validity verdict.
#[derive(Clone, Debug)]
pub struct ValiditySummary {
    pub normalization_residual: f64,
    pub max_logmass: f64,
    pub domain_errors: usize,
    pub operator_counts: Vec<(&'static str, usize)>,
    pub failures: Vec<String>,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct EvalOutcome {
    /// CSV table, header `x,f`, one row per window point; domain errors
    /// render as `nan`.
    pub table: String,
    pub summary: Option<ValiditySummary>,
}

pub fn run_eval(req: &EvalRequest) -> Result<EvalOutcome, EvalError> {
    if req.x_min > req.x_max {
        return Err(EvalError::EmptyWindow { x_min: req.x_min, x_max: req.x_max });
    }
    let expr = parse(&req.expr_text)?;
    let program = Program::compile(&expr);
    let mut stack = Vec::new();

    let mut table = String::from("x,f\n");
    let mut mass = 0.0f64;
    let mut max_logmass = f64::NEG_INFINITY;
    let mut domain_errors = 0usize;
    for x in req.x_min..=req.x_max {
        match program.eval_with(x as f64, &mut stack) {
            Some(f) if f.is_finite() => {
                table.push_str(&format!("{x},{f:?}\n"));
                mass += f.exp();
                max_logmass = max_logmass.max(f);
            }
            _ => {
                table.push_str(&format!("{x},nan\n"));
                domain_errors += 1;
            }
        }
    }

    let summary = req.check_validity.then(|| summarize(&expr, mass, max_logmass, domain_errors));
    Ok(EvalOutcome { table, summary })
}

fn summarize(expr: &Expr, mass: f64, max_logmass: f64, domain_errors: usize) -> ValiditySummary {
    let vcfg = ValidityConfig::default();
    let normalization_residual = if domain_errors > 0 { f64::INFINITY } else { mass - 1.0 };
    let max_logmass = if domain_errors > 0 { f64::INFINITY } else { max_logmass };
    let operator_counts = capped_operator_counts(expr);

    let mut failures = Vec::new();
    if domain_errors > 0 {
        failures.push(format!("undefined at {domain_errors} window point(s)"));
    }
    if !(normalization_residual.abs() < vcfg.normalization_tol) {
        failures.push(format!(
            "normalization residual {normalization_residual:.3e} outside ±{:.3e}",
            vcfg.normalization_tol
        ));
    }
    if !(max_logmass < vcfg.logmass_tol) {
        failures.push(format!("max log-mass {max_logmass:.3e} >= {:.3e}", vcfg.logmass_tol));
    }
    for &(name, n) in &operator_counts {
        if n > vcfg.operator_cap {
            failures.push(format!("operator {name} appears {n} > {}", vcfg.operator_cap));
        }
    }

    ValiditySummary {
        normalization_residual,
        max_logmass,
        domain_errors,
        operator_counts,
        passed: failures.is_empty(),
        failures,
    }
}

/// Render the summary block appended after the table when
/// `--check-validity` is set.
pub fn render_summary(s: &ValiditySummary) -> String {
    let used: Vec<String> = s
        .operator_counts
        .iter()
        .filter(|(_, n)| *n > 0)
        .map(|(name, n)| format!("{name} x{n}"))
        .collect();
    let mut out = String::new();
    out.push_str(&format!(
        "normalization residual: {:.6e}\nmax log-mass: {:.6e}\ndomain errors: {}\n",
        s.normalization_residual, s.max_logmass, s.domain_errors
    ));
    out.push_str(&format!(
        "capped operators: {}\n",
        if used.is_empty() { "none".to_string() } else { used.join(", ") }
    ));
    if s.passed {
        out.push_str("validity: ok\n");
    } else {
        out.push_str(&format!("validity: FAILED ({})\n", s.failures.join("; ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(expr: &str, lo: i64, hi: i64, check: bool) -> EvalRequest {
        EvalRequest { expr_text: expr.into(), x_min: lo, x_max: hi, check_validity: check }
    }

    #[test]
    fn tabulates_inclusive_window() {
        let out = run_eval(&request("x0 * 2", 0, 3, false)).unwrap();
        assert_eq!(out.table, "x,f\n0,0.0\n1,2.0\n2,4.0\n3,6.0\n");
        assert!(out.summary.is_none());
    }

    #[test]
    fn exact_poisson_passes_window_validity() {
        // poisson(12) over 0..=60 holds all but ~1e-15 of the mass.
        let text = "(x0 * 2.4849066497880004) - (logF(x0) + 12)";
        let out = run_eval(&request(text, 0, 60, true)).unwrap();
        let s = out.summary.unwrap();
        assert!(s.passed, "{:?}", s.failures);
        assert!(s.normalization_residual.abs() < 1e-6);
        assert!(s.max_logmass < 0.0);
        assert_eq!(s.domain_errors, 0);
    }

    #[test]
    fn domain_errors_and_caps_fail_the_checks() {
        let out = run_eval(&request("log(x0 - 2)", 0, 5, true)).unwrap();
        assert!(out.table.contains("0,nan\n"));
        assert!(out.table.contains("2,nan\n"));
        let s = out.summary.unwrap();
        assert!(!s.passed);
        assert_eq!(s.domain_errors, 3);

        let heavy = "(((x0 * x0) * x0) * x0) * x0";
        let s = run_eval(&request(heavy, 1, 3, true)).unwrap().summary.unwrap();
        assert!(s.failures.iter().any(|f| f.contains("operator *")), "{:?}", s.failures);
    }

    #[test]
    fn rejects_backwards_window_and_bad_expression() {
        assert!(matches!(
            run_eval(&request("x0", 5, 4, false)),
            Err(EvalError::EmptyWindow { .. })
        ));
        assert!(matches!(run_eval(&request("x0 +", 0, 1, false)), Err(EvalError::Parse(_))));
    }

    #[test]
    fn summary_rendering_mentions_verdict_and_counts() {
        let out = run_eval(&request("(x0 * 2.4849066497880004) - (logF(x0) + 12)", 0, 60, true))
            .unwrap();
        let text = render_summary(&out.summary.unwrap());
        assert!(text.contains("validity: ok"));
        assert!(text.contains("logF x1"));
        assert!(text.contains("* x1"));
    }
}
