//! The generational loop: profile-biased populations, rank-scalarized
//! tournament selection, periodic simplify-and-refit, and Pareto pooling.

use exprcore::{complexity, format_expr, simplify, Expr, GrammarConfig, Profile, Program};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use targets::{subseed, TargetDataset};
use thiserror::Error;

use crate::loss::program_loss;
use crate::ops::TreeFactory;
use crate::random::OperatorSet;
use crate::refit::refit_constants;

/// Knobs of Algorithm 1. Defaults mirror the published configuration;
/// anything can be dialed down for quick runs.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Independent populations, assigned to profiles round-robin.
    pub populations: usize,
    /// Individuals per population.
    pub pop_size: usize,
    /// Maximum generations per population.
    pub iterations: usize,
    /// Stop a population after this many stagnant generations.
    pub patience: usize,
    /// Node-count cap for every expression ever scored.
    pub max_size: usize,
    /// Simplex restarts per constant refit.
    pub refit_restarts: usize,
    /// Candidates retained per profile when pooling.
    pub top_k: usize,
    /// Complexity cap under the originating profile.
    pub complexity_budget: u32,
    /// Master seed; every population derives its own stream.
    pub seed: u64,
    pub enable_logaddexp: bool,
    pub enable_logdelta0: bool,
    pub grammar: GrammarConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            populations: 30,
            pop_size: 60,
            iterations: 3000,
            patience: 300,
            max_size: 15,
            refit_restarts: 8,
            top_k: 20,
            complexity_budget: 75,
            seed: 0,
            enable_logaddexp: false,
            enable_logdelta0: false,
            grammar: GrammarConfig::strict(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let positive = [
            ("populations", self.populations),
            ("pop_size", self.pop_size),
            ("iterations", self.iterations),
            ("patience", self.patience),
            ("refit_restarts", self.refit_restarts),
            ("top_k", self.top_k),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(SearchError::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if self.max_size < 3 {
            return Err(SearchError::InvalidConfig(
                "max_size must be at least 3".into(),
            ));
        }
        if self.complexity_budget == 0 {
            return Err(SearchError::InvalidConfig(
                "complexity_budget must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A scored expression in the shared pool.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub expr: Expr,
    pub loss: f64,
    /// Complexity under the profile of the population that found it.
    pub complexity: u32,
    pub profile: String,
    /// Generation at which this exact expression was first scored.
    pub generation: usize,
}

/// Per-generation progress snapshot for one population.
#[derive(Clone, Debug)]
pub struct ProgressRecord {
    pub population: usize,
    pub profile: String,
    pub generation: usize,
    pub best_loss: f64,
    pub best_complexity: u32,
    pub best_expr: String,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("search target has no fit points")]
    EmptyTarget,
}

/// Run the full multi-population search and return the Pareto-filtered,
/// per-profile top-K pool.
pub fn search(
    target: &TargetDataset,
    config: &SearchConfig,
    profiles: &[Profile],
) -> Result<Vec<Candidate>, SearchError> {
    search_with_progress(target, config, profiles, &mut |_| {})
}

/// As [`search`], streaming per-generation progress to `sink`.
pub fn search_with_progress(
    target: &TargetDataset,
    config: &SearchConfig,
    profiles: &[Profile],
    sink: &mut dyn FnMut(&ProgressRecord),
) -> Result<Vec<Candidate>, SearchError> {
    config.validate()?;
    if target.is_empty() {
        return Err(SearchError::EmptyTarget);
    }
    if profiles.is_empty() {
        return Err(SearchError::InvalidConfig("no profiles supplied".into()));
    }

    let ops = OperatorSet::with_optional(config.enable_logaddexp, config.enable_logdelta0);
    let factory = TreeFactory::new(ops, config.grammar, config.max_size);

    let mut pool: Vec<Candidate> = Vec::new();
    for index in 0..config.populations {
        let profile = &profiles[index % profiles.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(subseed(
            config.seed,
            &format!("evosearch/pop/{index}"),
        ));
        let mut worker = Population::new(index, profile, target, config, &factory, &mut rng);
        worker.run(sink)?;
        pool.extend(worker.into_candidates());
    }

    Ok(pool_topk_and_filter(pool, profiles, config.top_k))
}

/// Keep the top-K per profile (loss-then-complexity, deduplicated by
/// expression text), then the Pareto front of the union.
fn pool_topk_and_filter(pool: Vec<Candidate>, profiles: &[Profile], top_k: usize) -> Vec<Candidate> {
    let mut kept = Vec::new();
    for profile in profiles {
        let mut members: Vec<&Candidate> =
            pool.iter().filter(|c| c.profile == profile.name).collect();
        members.sort_by(|a, b| {
            a.loss
                .total_cmp(&b.loss)
                .then(a.complexity.cmp(&b.complexity))
        });
        let mut seen = std::collections::BTreeSet::new();
        for member in members {
            if seen.insert(format_expr(&member.expr)) {
                kept.push(member.clone());
                if seen.len() == top_k {
                    break;
                }
            }
        }
    }
    pareto_filter(kept)
}

/// Retain exactly the non-dominated candidates under (loss, complexity);
/// ties are kept.
pub fn pareto_filter(cands: Vec<Candidate>) -> Vec<Candidate> {
    let dominated = |c: &Candidate| {
        cands.iter().any(|d| {
            d.loss <= c.loss
                && d.complexity <= c.complexity
                && (d.loss < c.loss || d.complexity < c.complexity)
        })
    };
    cands.iter().filter(|c| !dominated(c)).cloned().collect()
}

struct Individual {
    expr: Expr,
    loss: f64,
    complexity: u32,
}

struct Population<'a> {
    index: usize,
    profile: &'a Profile,
    target: &'a TargetDataset,
    config: &'a SearchConfig,
    factory: &'a TreeFactory,
    rng: &'a mut ChaCha8Rng,
    members: Vec<Individual>,
    archive: Archive,
    stack: Vec<f64>,
}

impl<'a> Population<'a> {
    fn new(
        index: usize,
        profile: &'a Profile,
        target: &'a TargetDataset,
        config: &'a SearchConfig,
        factory: &'a TreeFactory,
        rng: &'a mut ChaCha8Rng,
    ) -> Population<'a> {
        Population {
            index,
            profile,
            target,
            config,
            factory,
            rng,
            members: Vec::with_capacity(config.pop_size),
            archive: Archive::new(config.top_k.max(25) * 4),
            stack: Vec::new(),
        }
    }

    /// Score an expression; None when it busts the profile budget.
    fn score(&mut self, expr: Expr, generation: usize) -> Option<Individual> {
        let cx = complexity(&expr, self.profile).ok()?;
        if cx > self.config.complexity_budget {
            return None;
        }
        let program = Program::compile(&expr);
        let loss = program_loss(&program, self.target, &mut self.stack);
        self.archive.offer(&expr, loss, cx, generation);
        Some(Individual {
            expr,
            loss,
            complexity: cx,
        })
    }

    fn seed_initial(&mut self) -> Result<(), SearchError> {
        let mut attempts = 0usize;
        while self.members.len() < self.config.pop_size {
            attempts += 1;
            if attempts > self.config.pop_size * 200 {
                return Err(SearchError::InvalidConfig(format!(
                    "profile `{}` admits no expressions within its budget",
                    self.profile.name
                )));
            }
            let tree = self.factory.generate(self.rng);
            if let Some(ind) = self.score(tree, 0) {
                self.members.push(ind);
            }
        }
        Ok(())
    }

    fn best_index(&self) -> usize {
        let mut best = 0;
        for i in 1..self.members.len() {
            let (a, b) = (&self.members[i], &self.members[best]);
            if a.loss.total_cmp(&b.loss).then(a.complexity.cmp(&b.complexity))
                == std::cmp::Ordering::Less
            {
                best = i;
            }
        }
        best
    }

    fn run(&mut self, sink: &mut dyn FnMut(&ProgressRecord)) -> Result<(), SearchError> {
        self.seed_initial()?;
        let mut best_loss = f64::INFINITY;
        let mut stagnant = 0usize;

        for generation in 1..=self.config.iterations {
            self.step(generation);
            if generation % 10 == 0 {
                self.polish_elites(generation);
            }

            let best = &self.members[self.best_index()];
            if best.loss < best_loss - 1e-12 {
                best_loss = best.loss;
                stagnant = 0;
            } else {
                stagnant += 1;
            }
            sink(&ProgressRecord {
                population: self.index,
                profile: self.profile.name.clone(),
                generation,
                best_loss: best.loss,
                best_complexity: best.complexity,
                best_expr: format_expr(&best.expr),
            });
            if stagnant >= self.config.patience {
                break;
            }
        }
        self.final_polish();
        Ok(())
    }

    /// One generation: elitism plus tournament-selected offspring.
    fn step(&mut self, generation: usize) {
        let scores = self.selection_scores();
        let elite = self.elite_indices(2);

        let mut next: Vec<Individual> = Vec::with_capacity(self.config.pop_size);
        for &i in &elite {
            let m = &self.members[i];
            next.push(Individual {
                expr: m.expr.clone(),
                loss: m.loss,
                complexity: m.complexity,
            });
        }

        let mut attempts = 0usize;
        while next.len() < self.config.pop_size {
            attempts += 1;
            // Breeding can stall only when edits keep busting the profile
            // budget; past a generous allowance, recycle parents verbatim.
            let child = if attempts > self.config.pop_size * 50 {
                let parent = self.tournament(&scores);
                self.members[parent].expr.clone()
            } else {
                self.breed(&scores)
            };
            if let Some(ind) = self.score(child, generation) {
                next.push(ind);
            }
        }
        self.members = next;
    }

    /// Rank-scalarized selection score: loss rank + 0.1 · complexity rank
    /// (lower is fitter).
    fn selection_scores(&self) -> Vec<f64> {
        let n = self.members.len();
        let mut by_loss: Vec<usize> = (0..n).collect();
        by_loss.sort_by(|&a, &b| self.members[a].loss.total_cmp(&self.members[b].loss));
        let mut by_cx: Vec<usize> = (0..n).collect();
        by_cx.sort_by_key(|&i| self.members[i].complexity);

        let mut scores = vec![0.0; n];
        for (rank, &i) in by_loss.iter().enumerate() {
            scores[i] += rank as f64;
        }
        for (rank, &i) in by_cx.iter().enumerate() {
            scores[i] += 0.1 * rank as f64;
        }
        scores
    }

    fn elite_indices(&self, count: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        order.sort_by(|&a, &b| {
            self.members[a]
                .loss
                .total_cmp(&self.members[b].loss)
                .then(self.members[a].complexity.cmp(&self.members[b].complexity))
        });
        order.truncate(count);
        order
    }

    fn tournament(&mut self, scores: &[f64]) -> usize {
        let mut winner = self.rng.gen_range(0..scores.len());
        for _ in 0..2 {
            let rival = self.rng.gen_range(0..scores.len());
            if scores[rival] < scores[winner] {
                winner = rival;
            }
        }
        winner
    }

    /// Crossover with probability 0.3, mutation otherwise.
    fn breed(&mut self, scores: &[f64]) -> Expr {
        let a = self.tournament(scores);
        if self.rng.gen::<f64>() < 0.3 {
            let b = self.tournament(scores);
            let (pa, pb) = (self.members[a].expr.clone(), self.members[b].expr.clone());
            self.factory.crossover(&pa, &pb, self.rng)
        } else {
            let parent = self.members[a].expr.clone();
            self.factory.mutate(&parent, self.rng)
        }
    }

    /// Simplify-and-refit pass over the current elites.
    fn polish_elites(&mut self, generation: usize) {
        for i in self.elite_indices(2) {
            let simplified = simplify(&self.members[i].expr);
            let polished = refit_constants(
                &simplified,
                self.target,
                self.config.refit_restarts,
                self.rng,
            );
            if !self.factory_admissible(&polished) {
                continue;
            }
            if let Some(ind) = self.score(polished, generation) {
                if ind.loss < self.members[i].loss
                    || (ind.loss == self.members[i].loss
                        && ind.complexity < self.members[i].complexity)
                {
                    self.members[i] = ind;
                }
            }
        }
    }

    fn factory_admissible(&self, expr: &Expr) -> bool {
        expr.size() <= self.config.max_size
            && exprcore::check_grammar(expr, self.config.grammar).is_empty()
    }

    /// Final refit of the population's best survivors so pooled constants
    /// are polished even mid-stagnation.
    fn final_polish(&mut self) {
        for i in self.elite_indices(4) {
            let expr = self.members[i].expr.clone();
            let polished = refit_constants(
                &expr,
                self.target,
                self.config.refit_restarts,
                self.rng,
            );
            if self.factory_admissible(&polished) {
                let last_gen = self.config.iterations;
                self.score(polished, last_gen);
            }
        }
    }

    fn into_candidates(self) -> Vec<Candidate> {
        let profile = self.profile.name.clone();
        self.archive
            .into_sorted()
            .into_iter()
            .map(|mut c| {
                c.profile = profile.clone();
                c
            })
            .collect()
    }
}

/// Bounded best-seen store; avoids string work in the hot path by
/// deduplicating only at extraction time.
struct Archive {
    cap: usize,
    items: Vec<Candidate>,
    worst_kept: f64,
}

impl Archive {
    fn new(cap: usize) -> Archive {
        Archive {
            cap,
            items: Vec::new(),
            worst_kept: f64::INFINITY,
        }
    }

    fn offer(&mut self, expr: &Expr, loss: f64, complexity: u32, generation: usize) {
        if !loss.is_finite() {
            return;
        }
        if self.items.len() >= self.cap && loss >= self.worst_kept {
            return;
        }
        self.items.push(Candidate {
            expr: expr.clone(),
            loss,
            complexity,
            profile: String::new(),
            generation,
        });
        if self.items.len() > self.cap * 2 {
            self.shrink();
        }
    }

    fn shrink(&mut self) {
        self.items.sort_by(|a, b| {
            a.loss
                .total_cmp(&b.loss)
                .then(a.complexity.cmp(&b.complexity))
                .then(a.generation.cmp(&b.generation))
        });
        self.items.truncate(self.cap);
        if let Some(last) = self.items.last() {
            self.worst_kept = last.loss;
        }
    }

    fn into_sorted(mut self) -> Vec<Candidate> {
        self.shrink();
        self.items
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use targets::{build_target, noiseless_target, parse_spec, CountTable};

    fn tiny_config(seed: u64) -> SearchConfig {
        SearchConfig {
            populations: 2,
            pop_size: 30,
            iterations: 120,
            patience: 60,
            refit_restarts: 2,
            top_k: 8,
            seed,
            ..SearchConfig::default()
        }
    }

    fn make_candidate(loss: f64, complexity: u32) -> Candidate {
        Candidate {
            expr: Expr::constant(1.0),
            loss,
            complexity,
            profile: "uniform".into(),
            generation: 0,
        }
    }

    #[test]
    fn pareto_keeps_the_dominant_of_equal_complexity() {
        let out = pareto_filter(vec![make_candidate(1.0, 5), make_candidate(2.0, 5)]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].loss, 1.0);
    }

    #[test]
    fn pareto_keeps_incomparable_candidates() {
        let out = pareto_filter(vec![make_candidate(1.0, 5), make_candidate(0.5, 9)]);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn pareto_keeps_exact_ties() {
        let out = pareto_filter(vec![make_candidate(1.0, 5), make_candidate(1.0, 5)]);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn search_is_deterministic() {
        let spec = parse_spec("geometric:p=0.37").unwrap();
        let target = noiseless_target(&spec, 50_000, 4.0).unwrap();
        let config = tiny_config(42);
        let profiles = [Profile::profile1(), Profile::profile2()];
        let a = search(&target, &config, &profiles).unwrap();
        let b = search(&target, &config, &profiles).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(format_expr(&x.expr), format_expr(&y.expr));
            assert_eq!(x.loss.to_bits(), y.loss.to_bits());
            assert_eq!(x.complexity, y.complexity);
            assert_eq!(x.profile, y.profile);
            assert_eq!(x.generation, y.generation);
        }
    }

    #[test]
    fn single_bin_target_yields_zero_loss_constant() {
        let counts = CountTable::new(5, vec![1000]).unwrap();
        let target = build_target(&counts, 0.5, 0.0, 1.0).unwrap();
        let config = tiny_config(7);
        let pool = search(&target, &config, &[Profile::uniform()]).unwrap();
        let best = pool
            .iter()
            .min_by(|a, b| a.loss.total_cmp(&b.loss))
            .unwrap();
        assert!(best.loss < 1e-12, "best loss {}", best.loss);
        assert!(matches!(best.expr, Expr::Const(_)), "{:?}", best.expr);
    }

    #[test]
    fn progress_best_loss_is_monotone_per_population() {
        let spec = parse_spec("geometric:p=0.4").unwrap();
        let target = noiseless_target(&spec, 20_000, 4.0).unwrap();
        let config = tiny_config(3);
        let mut per_pop: std::collections::BTreeMap<usize, f64> = Default::default();
        search_with_progress(&target, &config, &[Profile::uniform()], &mut |rec| {
            let entry = per_pop.entry(rec.population).or_insert(f64::INFINITY);
            assert!(
                rec.best_loss <= *entry + 1e-12,
                "pop {} regressed: {} -> {}",
                rec.population,
                entry,
                rec.best_loss
            );
            *entry = rec.best_loss;
        })
        .unwrap();
        assert!(!per_pop.is_empty());
    }

    #[test]
    fn pool_is_nondominated_and_within_caps() {
        let spec = parse_spec("geometric:p=0.37").unwrap();
        let target = noiseless_target(&spec, 50_000, 4.0).unwrap();
        let config = tiny_config(5);
        let profiles = [Profile::profile1(), Profile::profile2()];
        let pool = search(&target, &config, &profiles).unwrap();
        assert!(!pool.is_empty());
        for c in &pool {
            assert!(c.expr.size() <= config.max_size);
            assert!(c.complexity <= config.complexity_budget);
            assert!(c.loss.is_finite());
        }
        for a in &pool {
            for b in &pool {
                let dominates = b.loss <= a.loss
                    && b.complexity <= a.complexity
                    && (b.loss < a.loss || b.complexity < a.complexity);
                assert!(!dominates, "dominated candidate left in pool");
            }
        }
        // A noiseless geometric target is a line; the pool must contain an
        // essentially exact fit.
        assert!(pool.iter().any(|c| c.loss < 1e-9));
    }

    #[test]
    fn rejects_degenerate_configs() {
        let spec = parse_spec("geometric:p=0.37").unwrap();
        let target = noiseless_target(&spec, 1_000, 4.0).unwrap();
        let bad = SearchConfig {
            max_size: 2,
            ..SearchConfig::default()
        };
        assert!(matches!(
            search(&target, &bad, &[Profile::uniform()]),
            Err(SearchError::InvalidConfig(_))
        ));
    }
}
