//! One memetic algorithm run on OneMax and one on the long path, compared
//! with plain mutation.

use memetic_lab::functions::{LongPathFn, OneMax};
use memetic_lab::{run, FitnessFunction, LsSchedule, MaConfig};

fn report(label: &str, cfg: &MaConfig, f: &dyn FitnessFunction) {
    let r = run(cfg, f).unwrap();
    println!(
        "{label:<28} {:?} after {} generations, {} evaluations ({} in local search), best {}",
        r.outcome, r.generations, r.evaluations.total, r.evaluations.ls_evals, r.final_best_fitness
    );
}

fn main() {
    let onemax = OneMax::new(64);
    let mut ea = MaConfig::new(64, 7);
    ea.budget.max_generations = Some(100_000);
    report("onemax (1+1) EA", &ea, &onemax);
    let mut ma = ea.clone();
    ma.schedule = LsSchedule::EveryTau(10);
    ma.depth = 64;
    report("onemax MA, tau 10 delta 64", &ma, &onemax);

    let long = LongPathFn::new(15).unwrap();
    let mut ea = MaConfig::new(15, 7);
    ea.mu = 4;
    ea.lambda = 4;
    ea.budget.max_generations = Some(100_000);
    report("long path (4+4) EA", &ea, &long);
    let mut ma = ea.clone();
    ma.schedule = LsSchedule::Probability(0.2);
    ma.depth = 8;
    report("long path MA, p_ls 0.2 delta 8", &ma, &long);
}
