//! Variation operators: mutation (five kinds) and subtree crossover.
//!
//! Every operator rejection-resamples until its output passes the grammar
//! and the size cap, falling back to the unchanged input after a bounded
//! number of attempts — callers never see an invalid tree.

use exprcore::{check_grammar, BinaryOp, Expr, GrammarConfig};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::random::{random_affine, random_constant, random_tree, OperatorSet};

const ATTEMPTS: usize = 24;

/// Context shared by generation, mutation, and crossover.
#[derive(Clone, Debug)]
pub struct TreeFactory {
    pub ops: OperatorSet,
    pub rules: GrammarConfig,
    pub max_size: usize,
}

impl TreeFactory {
    pub fn new(ops: OperatorSet, rules: GrammarConfig, max_size: usize) -> TreeFactory {
        assert!(max_size >= 3, "max size must allow at least one operator");
        TreeFactory {
            ops,
            rules,
            max_size,
        }
    }

    fn admissible(&self, expr: &Expr) -> bool {
        expr.size() <= self.max_size && check_grammar(expr, self.rules).is_empty()
    }

    /// A fresh random tree, valid by construction.
    pub fn generate(&self, rng: &mut impl Rng) -> Expr {
        for _ in 0..ATTEMPTS {
            let tree = random_tree(rng, &self.ops, self.max_size);
            if self.admissible(&tree) {
                return tree;
            }
        }
        Expr::constant(random_constant(rng))
    }

    /// One mutation: kind drawn by weight, rejection-resampled for
    /// validity; returns the input unchanged when every attempt fails.
    pub fn mutate(&self, expr: &Expr, rng: &mut impl Rng) -> Expr {
        for _ in 0..ATTEMPTS {
            let kind = pick_kind(rng);
            let out = match kind {
                MutationKind::ConstantPerturb => self.perturb_constant(expr, rng),
                MutationKind::OperatorSwap => self.swap_operator(expr, rng),
                MutationKind::SubtreeReplace => self.replace_subtree(expr, rng),
                MutationKind::SubtreeInsert => self.insert_node(expr, rng),
                MutationKind::SubtreeDelete => self.delete_node(expr, rng),
            };
            if let Some(out) = out {
                if self.admissible(&out) {
                    return out;
                }
            }
        }
        expr.clone()
    }

    /// Subtree crossover: `a` with one of its subtrees replaced by a
    /// subtree of `b`; falls back to `a` unchanged.
    pub fn crossover(&self, a: &Expr, b: &Expr, rng: &mut impl Rng) -> Expr {
        for _ in 0..ATTEMPTS {
            let site = rng.gen_range(0..a.size());
            let donor = b.subtree(rng.gen_range(0..b.size()));
            let child = a.replace_subtree(site, donor);
            if self.admissible(&child) {
                return child;
            }
        }
        a.clone()
    }

    fn perturb_constant(&self, expr: &Expr, rng: &mut impl Rng) -> Option<Expr> {
        let sites = collect_sites(expr, |e| matches!(e, Expr::Const(_)));
        let site = *pick(&sites, rng)?;
        let Expr::Const(value) = expr.subtree(site) else {
            unreachable!()
        };
        let noise: f64 = Normal::new(0.0, 0.3).unwrap().sample(rng);
        // Multiplicative log-normal jitter; near zero the relative step
        // vanishes, so fall back to an additive one.
        let next = if value.abs() < 1e-3 {
            value + noise
        } else {
            value * noise.exp()
        };
        Some(expr.replace_subtree(site, &Expr::constant(next)))
    }

    fn swap_operator(&self, expr: &Expr, rng: &mut impl Rng) -> Option<Expr> {
        let sites = collect_sites(expr, |e| !e.is_leaf());
        let site = *pick(&sites, rng)?;
        let replacement = match expr.subtree(site) {
            Expr::Unary(op, child) => {
                let next = *pick_other(&self.ops.unary, *op, rng)?;
                Expr::unary(next, (**child).clone())
            }
            Expr::Binary(op, lhs, rhs) => {
                let next = *pick_other(&self.ops.binary, *op, rng)?;
                Expr::binary(next, (**lhs).clone(), (**rhs).clone())
            }
            _ => unreachable!(),
        };
        Some(expr.replace_subtree(site, &replacement))
    }

    fn replace_subtree(&self, expr: &Expr, rng: &mut impl Rng) -> Option<Expr> {
        let site = rng.gen_range(0..expr.size());
        let removed = expr.subtree(site).size();
        let budget = (self.max_size + removed).saturating_sub(expr.size()).max(1);
        // Affine-position sites reject general material; offering affine
        // replacements some of the time keeps acceptance up there.
        let fresh = if rng.gen::<f64>() < 0.3 {
            random_affine(rng, budget)
        } else {
            random_tree(rng, &self.ops, budget)
        };
        Some(expr.replace_subtree(site, &fresh))
    }

    fn insert_node(&self, expr: &Expr, rng: &mut impl Rng) -> Option<Expr> {
        if expr.size() + 2 > self.max_size {
            return None;
        }
        let site = rng.gen_range(0..expr.size());
        let body = expr.subtree(site).clone();
        let use_unary = !self.ops.unary.is_empty() && (self.ops.binary.is_empty() || rng.gen());
        let wrapped = if use_unary {
            let op = *pick(&self.ops.unary, rng)?;
            Expr::unary(op, body)
        } else {
            let op = *pick(&self.ops.binary, rng)?;
            let leaf = if rng.gen() {
                Expr::var()
            } else {
                Expr::constant(random_constant(rng))
            };
            // The exponent slot only admits leaves, so keep the original
            // subtree as the base; elsewhere pick a side at random.
            if op != BinaryOp::Pow && rng.gen() {
                Expr::binary(op, leaf, body)
            } else {
                Expr::binary(op, body, leaf)
            }
        };
        Some(expr.replace_subtree(site, &wrapped))
    }

    fn delete_node(&self, expr: &Expr, rng: &mut impl Rng) -> Option<Expr> {
        let sites = collect_sites(expr, |e| !e.is_leaf());
        let site = *pick(&sites, rng)?;
        let hoisted = match expr.subtree(site) {
            Expr::Unary(_, child) => (**child).clone(),
            Expr::Binary(_, lhs, rhs) => {
                if rng.gen() {
                    (**lhs).clone()
                } else {
                    (**rhs).clone()
                }
            }
            _ => unreachable!(),
        };
        Some(expr.replace_subtree(site, &hoisted))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum MutationKind {
    ConstantPerturb,
    OperatorSwap,
    SubtreeReplace,
    SubtreeInsert,
    SubtreeDelete,
}

/// Kind weights: constants 0.35, operator swap 0.2, replace 0.2,
/// insert 0.15, delete 0.1.
fn pick_kind(rng: &mut impl Rng) -> MutationKind {
    let u: f64 = rng.gen();
    if u < 0.35 {
        MutationKind::ConstantPerturb
    } else if u < 0.55 {
        MutationKind::OperatorSwap
    } else if u < 0.75 {
        MutationKind::SubtreeReplace
    } else if u < 0.90 {
        MutationKind::SubtreeInsert
    } else {
        MutationKind::SubtreeDelete
    }
}

/// Preorder indices of nodes satisfying the predicate.
fn collect_sites(expr: &Expr, mut pred: impl FnMut(&Expr) -> bool) -> Vec<usize> {
    let mut sites = Vec::new();
    let mut index = 0usize;
    expr.visit(&mut |e| {
        if pred(e) {
            sites.push(index);
        }
        index += 1;
    });
    sites
}

fn pick<'a, T>(items: &'a [T], rng: &mut impl Rng) -> Option<&'a T> {
    if items.is_empty() {
        None
    } else {
        Some(&items[rng.gen_range(0..items.len())])
    }
}

fn pick_other<'a, T: PartialEq>(items: &'a [T], current: T, rng: &mut impl Rng) -> Option<&'a T> {
    let others: Vec<&T> = items.iter().filter(|i| **i != current).collect();
    if others.is_empty() {
        None
    } else {
        Some(others[rng.gen_range(0..others.len())])
    }
}

/// Spec-shaped convenience wrappers over the core operator alphabet.
pub fn mutate(expr: &Expr, rng: &mut impl Rng, rules: GrammarConfig, max_size: usize) -> Expr {
    TreeFactory::new(OperatorSet::core(), rules, max_size).mutate(expr, rng)
}

pub fn crossover(
    a: &Expr,
    b: &Expr,
    rng: &mut impl Rng,
    rules: GrammarConfig,
    max_size: usize,
) -> Expr {
    TreeFactory::new(OperatorSet::core(), rules, max_size).crossover(a, b, rng)
}
