//! Numerical refinement of expression constants.
//!
//! Candidate expressions are not differentiable in general (`abs`, domain
//! edges, discrete atoms), so refitting uses a derivative-free simplex
//! search restarted from perturbed incumbents. The incumbent constants
//! always stay in the comparison set, making improvement monotone by
//! construction.

use exprcore::{Expr, Program};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use targets::TargetDataset;

use crate::loss::program_loss;

/// Function-evaluation budget for one simplex run.
const MAX_EVALS: usize = 200;

/// Refit every constant in `expr` by WLS loss; the tree shape is
/// untouched and the returned expression never scores worse than the
/// input. Expressions without constants come back unchanged.
pub fn refit_constants(
    expr: &Expr,
    target: &TargetDataset,
    restarts: usize,
    rng: &mut impl Rng,
) -> Expr {
    let mut program = Program::compile(expr);
    if program.const_count() == 0 {
        return expr.clone();
    }
    let mut stack = Vec::with_capacity(program.stack_need());
    let mut objective = move |theta: &[f64]| {
        if theta.iter().any(|t| !t.is_finite()) {
            return f64::INFINITY;
        }
        program.set_consts(theta);
        program_loss(&program, target, &mut stack)
    };

    let start = expr.constant_values();
    let mut best_theta = start.clone();
    let mut best_loss = objective(&start);

    let jitter = Normal::new(0.0, 0.5).unwrap();
    for restart in 0..restarts {
        let seed: Vec<f64> = if restart == 0 {
            start.clone()
        } else {
            best_theta
                .iter()
                .map(|&t| {
                    let z: f64 = jitter.sample(rng);
                    if t.abs() < 1e-2 {
                        t + 0.2 * z
                    } else {
                        t * z.exp()
                    }
                })
                .collect()
        };
        let (theta, loss) = nelder_mead(&mut objective, &seed, MAX_EVALS);
        if loss < best_loss {
            best_loss = loss;
            best_theta = theta;
        }
    }

    expr.with_constants(&best_theta)
}

/// One simplex run (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5) from `start`, spending at most `max_evals` objective calls.
fn nelder_mead(
    objective: &mut impl FnMut(&[f64]) -> f64,
    start: &[f64],
    max_evals: usize,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut evals = 0usize;
    let mut call = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        objective(x)
    };

    // Initial simplex: the start point plus one vertex per coordinate,
    // nudged 5% (or an absolute step when the coordinate is ~0).
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = call(start, &mut evals);
    simplex.push((start.to_vec(), f0));
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] = if v[i].abs() > 1e-6 {
            v[i] * 1.05
        } else {
            v[i] + 0.25
        };
        let f = call(&v, &mut evals);
        simplex.push((v, f));
    }

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.is_nan() || (spread.is_finite() && spread < 1e-14) {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].0.clone();
        let at = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = at(1.0);
        let fr = call(&reflected, &mut evals);
        if fr < simplex[0].1 {
            let expanded = at(2.0);
            let fe = call(&expanded, &mut evals);
            simplex[n] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[n].1 {
                at(0.5)
            } else {
                at(-0.5)
            };
            let fc = call(&contracted, &mut evals);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                // Shrink toward the best vertex.
                let anchor = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = entry
                        .0
                        .iter()
                        .zip(&anchor)
                        .map(|(x, a)| a + 0.5 * (x - a))
                        .collect();
                    let f = call(&v, &mut evals);
                    *entry = (v, f);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (theta, loss) = simplex.swap_remove(0);
    (theta, loss)
}
