//! Distributional and bookkeeping checks on the engine and the sweep
//! commands.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use memetic_lab::experiment::commands::connected_won;
use memetic_lab::experiment::output::{csv_body, quantile, RunRow, SweepRow};
use memetic_lab::experiment::{execute, Format, Spec};
use memetic_lab::functions::{LongPathFn, OneMax, RaceVariant};
use memetic_lab::rng::child_seed;
use memetic_lab::{
    run, BitString, Fitness, FitnessFunction, InitStrategy, LsSchedule, MaConfig, Outcome, PivotRule,
};

/// Plain (1+1) EA on OneMax, written without the engine: evaluations until
/// the optimum.
fn oracle_one_plus_one(n: usize, seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut fx = x.iter().filter(|b| **b).count();
    let mut evals = 1;
    while fx < n {
        let y: Vec<bool> = x.iter().map(|&b| b ^ rng.gen_bool(1.0 / n as f64)).collect();
        let fy = y.iter().filter(|b| **b).count();
        evals += 1;
        if fy >= fx {
            x = y;
            fx = fy;
        }
    }
    evals
}

fn median(mut v: Vec<u64>) -> f64 {
    v.sort_unstable();
    quantile(&v, 0.5)
}

#[test]
fn one_plus_one_ea_on_onemax_matches_oracle_band() {
    let n = 20;
    let f = OneMax::new(n);
    let engine: Vec<u64> = (0..200)
        .map(|i| {
            let r = run(&MaConfig::new(n, child_seed(1, i)), &f).unwrap();
            assert_eq!(r.outcome, Outcome::OptimumFound);
            assert_eq!(r.ls_invocations, 0);
            r.evaluations.total
        })
        .collect();
    let oracle: Vec<u64> = (0..200).map(|i| oracle_one_plus_one(n, 1000 + i)).collect();
    let (me, mo) = (median(engine), median(oracle));
    let enlnn = std::f64::consts::E * n as f64 * (n as f64).ln();
    for m in [me, mo] {
        assert!(m >= enlnn / 3.0 && m <= 3.0 * enlnn, "median {m}, e n ln n = {enlnn}");
    }
    assert!((me / mo - 1.0).abs() < 0.25, "engine {me} vs oracle {mo}");
}

#[test]
fn sectioned_four_sections_with_two_parents() {
    let spec = Spec::parse(
        "function = f_d
dim = 13
k = 3
fd_depth = 8
fd_gap = 3
fd_sections = 4
mu = 2
lambda = 2
tau = 1
delta_values = 8
replicates = 50
pilot_replicates = 20
pilot_max_generations = 200000
master_seed = 11
",
    )
    .unwrap();
    let out = execute("sweep-delta", &spec, Format::Csv).unwrap();
    let summary = csv_body(out.file("summary.csv").unwrap());
    let row: Vec<&str> = summary.lines().nth(1).unwrap().split(',').collect();
    let success: f64 = row[5].parse().unwrap();
    assert!(success >= 0.8, "success rate {success}");
}

struct Counting<F> {
    inner: F,
    calls: AtomicU64,
}

impl<F: FitnessFunction> FitnessFunction for Counting<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn evaluate(&self, x: &BitString) -> Fitness {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate(x)
    }
    fn is_global_optimum(&self, x: &BitString) -> bool {
        self.inner.is_global_optimum(x)
    }
    fn metadata(&self) -> String {
        self.inner.metadata()
    }
}

#[test]
fn every_evaluation_is_counted() {
    for (schedule, pivot) in [
        (LsSchedule::EveryTau(3), PivotRule::default()),
        (LsSchedule::Probability(0.3), PivotRule::SteepestAscent),
        (LsSchedule::Never, PivotRule::RandomImprovement),
    ] {
        let f = Counting { inner: LongPathFn::new(11).unwrap(), calls: AtomicU64::new(0) };
        let mut cfg = MaConfig::new(11, 4);
        cfg.mu = 3;
        cfg.lambda = 2;
        cfg.depth = 4;
        cfg.schedule = schedule;
        cfg.pivot = pivot;
        cfg.budget.max_generations = Some(300);
        let r = run(&cfg, &f).unwrap();
        let e = r.evaluations;
        assert_eq!(e.total, e.mutation_evals + e.ls_evals);
        assert_eq!(f.calls.load(Ordering::Relaxed), e.total);
        // Initialization plus one evaluation per offspring.
        assert_eq!(e.mutation_evals, 3 + 2 * r.generations);
        assert!(r.best_fitness_trace.windows(2).all(|w| w[0].1 < w[1].1));
    }
}

#[test]
fn identical_configs_serialize_identically() {
    let f = LongPathFn::new(9).unwrap();
    let mut cfg = MaConfig::new(9, 99);
    cfg.mu = 2;
    cfg.lambda = 3;
    cfg.schedule = LsSchedule::Probability(0.5);
    cfg.depth = 2;
    cfg.pivot = PivotRule::RandomImprovement;
    cfg.init = InitStrategy::UniformRandom;
    let a = serde_json::to_string(&run(&cfg, &f).unwrap()).unwrap();
    let b = serde_json::to_string(&run(&cfg, &f).unwrap()).unwrap();
    assert_eq!(a, b);
}

fn parse_rows(csv: &str) -> Vec<Vec<String>> {
    csv_body(csv).lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn summaries_are_recomputable_from_raw_rows() {
    let spec = Spec::parse(
        "function = f_d
dim = 13
k = 3
fd_depth = 4
fd_gap = 2
fd_sections = 4
lambda = 2
tau = 1
delta_values = 0,2,4,6
replicates = 12
max_generations = 400
master_seed = 5
",
    )
    .unwrap();
    let out = execute("sweep-delta", &spec, Format::Csv).unwrap();
    let runs = parse_rows(out.file("runs.csv").unwrap());
    let summary = parse_rows(out.file("summary.csv").unwrap());
    assert_eq!(runs.len(), 48);
    assert_eq!(summary.len(), 4);
    for s in &summary {
        let group: Vec<&Vec<String>> = runs.iter().filter(|r| r[8] == s[3]).collect();
        let n = group.len() as f64;
        let rate = |o: &str| group.iter().filter(|r| r[11] == o).count() as f64 / n;
        assert_eq!(s[5].parse::<f64>().unwrap(), rate("OPTIMUM_FOUND"));
        assert_eq!(s[6].parse::<f64>().unwrap(), rate("TRAPPED"));
        assert_eq!(s[7].parse::<f64>().unwrap(), rate("BUDGET_EXHAUSTED"));
        let total: f64 = (5..8).map(|i| s[i].parse::<f64>().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mut gens: Vec<u64> = group.iter().map(|r| r[12].parse().unwrap()).collect();
        gens.sort_unstable();
        assert_eq!(s[9].parse::<f64>().unwrap(), quantile(&gens, 0.5));
    }
}

#[test]
fn zero_depth_fails_within_a_small_budget() {
    // Wide copies leave mutation no shortcut between sections.
    let spec = Spec::parse(
        "function = f_d
dim = 46
k = 5
fd_depth = 20
fd_gap = 6
fd_sections = 4
lambda = 4
tau = 1
delta_values = 0
replicates = 30
max_generations = 2000
master_seed = 3
",
    )
    .unwrap();
    let out = execute("sweep-delta", &spec, Format::Csv).unwrap();
    let summary = parse_rows(out.file("summary.csv").unwrap());
    assert_eq!(summary[0][3], "0");
    assert_eq!(summary[0][5], "0");
}

#[test]
fn aggregation_ignores_completion_order() {
    let f = OneMax::new(10);
    let rows: Vec<RunRow> = (0..9)
        .map(|i| {
            let mut cfg = MaConfig::new(10, i);
            cfg.budget.max_generations = Some(20 + 5 * i);
            RunRow { function: "onemax".into(), variant: "-".into(), replicate: i, record: run(&cfg, &f).unwrap() }
        })
        .collect();
    let forward: Vec<&RunRow> = rows.iter().collect();
    let mut shuffled = forward.clone();
    shuffled.reverse();
    shuffled.swap(1, 4);
    assert_eq!(SweepRow::from_runs("x", "1", &forward), SweepRow::from_runs("x", "1", &shuffled));
}

#[test]
fn race_variants_mirror_each_other() {
    let spec = Spec::parse(
        "function = race_con
half_dim = 13
l_con = 30
l_unc = 2
delta = 2
tau_values = 3,200
replicates = 25
max_generations = 100000
master_seed = 8
",
    )
    .unwrap();
    let a = execute("sweep-tau", &spec, Format::Csv).unwrap();
    let b = execute("sweep-tau", &spec, Format::Csv).unwrap();
    assert_eq!(a.files, b.files);
    let rows = parse_rows(a.file("runs.csv").unwrap());
    let outcome = |s: &str| match s {
        "OPTIMUM_FOUND" => Outcome::OptimumFound,
        "TRAPPED" => Outcome::Trapped,
        _ => Outcome::BudgetExhausted,
    };
    let mut compared = 0;
    for con in rows.iter().filter(|r| r[1] == "con") {
        let uncon = rows.iter().find(|r| r[1] == "uncon" && r[10] == con[10] && r[7] == con[7]).unwrap();
        let wc = connected_won(RaceVariant::Con, outcome(&con[11]));
        let wu = connected_won(RaceVariant::Uncon, outcome(&uncon[11]));
        assert_eq!(wc, wu, "seed {}", con[10]);
        // The same trajectory reaches the same end at the same generation.
        assert_eq!(con[12], uncon[12]);
        compared += 1;
    }
    assert_eq!(compared, 50);
}
