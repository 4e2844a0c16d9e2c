//! The (μ+λ) memetic algorithm: uniform parent choice, standard bit
//! mutation, scheduled or probabilistic local search, and elitist selection
//! that breaks ties in favor of offspring.

use std::cmp::Reverse;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitstring::{mutate, BitString};
use crate::fitness::Fitness;
use crate::functions::{Classification, FitnessFunction};
use crate::localsearch::{local_search_from, PivotRule};
use crate::rng::RngStream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("config dimension {config} does not match function dimension {function}")]
    DimensionMismatch { config: usize, function: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LsSchedule {
    /// Local search in generations `t` with `t mod tau == 0`, starting at `t = 0`.
    EveryTau(u64),
    /// Independent coin per offspring.
    Probability(f64),
    Never,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    UniformRandom,
    CopiesOf(BitString),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_generations: Option<u64>,
    pub max_evaluations: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaConfig {
    pub n: usize,
    pub mu: usize,
    pub lambda: usize,
    /// Mutation probability; `None` means `1/n`.
    pub p_m: Option<f64>,
    pub schedule: LsSchedule,
    pub depth: u64,
    pub pivot: PivotRule,
    pub init: InitStrategy,
    pub budget: Budget,
    pub seed: u64,
}

impl MaConfig {
    /// A (1+1) EA with mutation rate 1/n, no local search and no budget.
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            mu: 1,
            lambda: 1,
            p_m: None,
            schedule: LsSchedule::Never,
            depth: 0,
            pivot: PivotRule::default(),
            init: InitStrategy::UniformRandom,
            budget: Budget::default(),
            seed,
        }
    }

    pub fn mutation_rate(&self) -> f64 {
        self.p_m.unwrap_or(1.0 / self.n as f64)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |msg: String| Err(EngineError::InvalidConfig(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.mu == 0 || self.lambda == 0 {
            return bad(format!("mu and lambda must be >= 1 (mu={}, lambda={})", self.mu, self.lambda));
        }
        let p = self.mutation_rate();
        if !(0.0..=1.0).contains(&p) {
            return bad(format!("p_m = {p} outside [0, 1]"));
        }
        match self.schedule {
            LsSchedule::EveryTau(0) => return bad("tau must be >= 1".into()),
            LsSchedule::Probability(q) if !(0.0..=1.0).contains(&q) => {
                return bad(format!("p_ls = {q} outside [0, 1]"))
            }
            _ => {}
        }
        if let InitStrategy::CopiesOf(x) = &self.init {
            if x.len() != self.n {
                return bad(format!("initial point has {} bits, n = {}", x.len(), self.n));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    OptimumFound,
    Trapped,
    BudgetExhausted,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::OptimumFound => "OPTIMUM_FOUND",
            Outcome::Trapped => "TRAPPED",
            Outcome::BudgetExhausted => "BUDGET_EXHAUSTED",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluations {
    /// Initialization plus one evaluation per mutated offspring.
    pub mutation_evals: u64,
    /// Neighbor probes inside local search.
    pub ls_evals: u64,
    pub total: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub outcome: Outcome,
    /// Generations executed. A run that terminates during generation
    /// `t = 0` reports 1; a run whose initial population is already
    /// terminal reports 0.
    pub generations: u64,
    pub evaluations: Evaluations,
    pub ls_invocations: u64,
    /// `(generations executed, best fitness)` at the start and whenever the
    /// best fitness changes.
    pub best_fitness_trace: Vec<(u64, Fitness)>,
    pub final_best: BitString,
    pub final_best_fitness: Fitness,
    pub config_echo: MaConfig,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Individual {
    pub point: BitString,
    pub fitness: Fitness,
    /// Creation order; unique within a run.
    pub tag: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PopulationStatus {
    Continue,
    Terminal(Outcome),
}

/// Global optimum beats trap beats continue.
pub fn classify_population<F: FitnessFunction + ?Sized>(
    population: &[BitString],
    f: &F,
) -> PopulationStatus {
    let mut trapped = false;
    for x in population {
        match f.classify(x) {
            Classification::GlobalOptimum => return PopulationStatus::Terminal(Outcome::OptimumFound),
            Classification::Trap => trapped = true,
            Classification::Regular => {}
        }
    }
    if trapped {
        PopulationStatus::Terminal(Outcome::Trapped)
    } else {
        PopulationStatus::Continue
    }
}

/// Best `mu` of parents and offspring. Higher fitness first, then offspring
/// before parents, then creation order.
pub fn select(parents: Vec<Individual>, offspring: Vec<Individual>, mu: usize) -> Vec<Individual> {
    let mut pool: Vec<(bool, Individual)> = offspring
        .into_iter()
        .map(|i| (false, i))
        .chain(parents.into_iter().map(|i| (true, i)))
        .collect();
    pool.sort_by_key(|(is_parent, ind)| (Reverse(ind.fitness), *is_parent, ind.tag));
    pool.into_iter().take(mu).map(|(_, i)| i).collect()
}

fn best_of(pop: &[Individual]) -> &Individual {
    pop.iter()
        .max_by_key(|i| (i.fitness, Reverse(i.tag)))
        .expect("population is never empty")
}

struct Runner<'a, F: ?Sized> {
    config: &'a MaConfig,
    f: &'a F,
    rng: RngStream,
    next_tag: u64,
    evals: Evaluations,
    ls_invocations: u64,
}

impl<F: FitnessFunction + ?Sized> Runner<'_, F> {
    fn fresh(&mut self, point: BitString, fitness: Fitness) -> Individual {
        let tag = self.next_tag;
        self.next_tag += 1;
        Individual { point, fitness, tag }
    }

    fn initial_population(&mut self) -> Vec<Individual> {
        (0..self.config.mu)
            .map(|_| {
                let x = match &self.config.init {
                    InitStrategy::UniformRandom => BitString::random(self.config.n, &mut self.rng),
                    InitStrategy::CopiesOf(x) => x.clone(),
                };
                let fx = self.f.evaluate(&x);
                self.evals.mutation_evals += 1;
                self.fresh(x, fx)
            })
            .collect()
    }

    fn offspring(&mut self, pop: &[Individual], generation: u64) -> Result<Vec<Individual>, EngineError> {
        let cfg = self.config;
        let p_m = cfg.mutation_rate();
        let scheduled = match cfg.schedule {
            LsSchedule::EveryTau(tau) => generation.is_multiple_of(tau),
            _ => false,
        };
        let mut out = Vec::with_capacity(cfg.lambda);
        for _ in 0..cfg.lambda {
            let parent = &pop[self.rng.gen_range(0..pop.len())];
            let y = mutate(&parent.point, p_m, &mut self.rng)
                .map_err(|e| EngineError::InvalidConfig(e.to_string()))?;
            let fy = self.f.evaluate(&y);
            self.evals.mutation_evals += 1;
            let apply_ls = match cfg.schedule {
                LsSchedule::EveryTau(_) => scheduled,
                LsSchedule::Probability(q) => self.rng.gen::<f64>() < q,
                LsSchedule::Never => false,
            };
            let (y, fy) = if apply_ls {
                self.ls_invocations += 1;
                let out = local_search_from(y, fy, self.f, cfg.depth, cfg.pivot, &mut self.rng, &mut self.evals.ls_evals);
                (out.point, out.fitness)
            } else {
                (y, fy)
            };
            out.push(self.fresh(y, fy));
        }
        Ok(out)
    }
}

/// Runs the memetic algorithm until an optimum or trap enters the population
/// or the budget is spent. Budgets are checked between generations.
pub fn run<F: FitnessFunction + ?Sized>(config: &MaConfig, f: &F) -> Result<RunRecord, EngineError> {
    if config.n != f.dim() {
        return Err(EngineError::DimensionMismatch {
            config: config.n,
            function: f.dim(),
        });
    }
    config.validate()?;

    let mut runner = Runner {
        config,
        f,
        rng: RngStream::new(config.seed),
        next_tag: 0,
        evals: Evaluations::default(),
        ls_invocations: 0,
    };
    let mut pop = runner.initial_population();
    let mut best = best_of(&pop).fitness;
    let mut trace = vec![(0, best)];
    let mut generation = 0u64;

    let status = |pop: &[Individual]| {
        let points: Vec<BitString> = pop.iter().map(|i| i.point.clone()).collect();
        classify_population(&points, f)
    };

    let outcome = loop {
        if let PopulationStatus::Terminal(o) = status(&pop) {
            break o;
        }
        let total = runner.evals.mutation_evals + runner.evals.ls_evals;
        if config.budget.max_generations.is_some_and(|g| generation >= g)
            || config.budget.max_evaluations.is_some_and(|e| total >= e)
        {
            break Outcome::BudgetExhausted;
        }
        let children = runner.offspring(&pop, generation)?;
        pop = select(pop, children, config.mu);
        generation += 1;

        let new_best = best_of(&pop).fitness;
        if new_best < best {
            return Err(EngineError::InvariantViolation(format!(
                "best fitness fell from {best} to {new_best} in generation {generation}"
            )));
        }
        if new_best != best {
            best = new_best;
            trace.push((generation, best));
        }
    };

    let champion = best_of(&pop).clone();
    let mut evaluations = runner.evals;
    evaluations.total = evaluations.mutation_evals + evaluations.ls_evals;
    Ok(RunRecord {
        outcome,
        generations: generation,
        evaluations,
        ls_invocations: runner.ls_invocations,
        best_fitness_trace: trace,
        final_best: champion.point,
        final_best_fitness: champion.fitness,
        config_echo: config.clone(),
    })
}
