//! Races the connected and unconnected paths of the race functions under
//! frequent and rare local search. At this dimension mutation alone climbs
//! the connected path much faster than the unconnected one, so the
//! connected path wins for every period.

use memetic_lab::experiment::commands::connected_won;
use memetic_lab::functions::{RaceFn, RaceParams, RaceVariant};
use memetic_lab::rng::child_seed;
use memetic_lab::{run, InitStrategy, LsSchedule, MaConfig};

fn main() {
    let replicates = 40;
    for tau in [1, 10, 100] {
        let mut wins = [0; 2];
        for (slot, variant) in [RaceVariant::Con, RaceVariant::Uncon].into_iter().enumerate() {
            let f = RaceFn::new(RaceParams { half_dim: 13, k: 4, l_con: 30, l_unc: 3, weight: None, variant }).unwrap();
            for i in 0..replicates {
                let mut cfg = MaConfig::new(f.params().dim(), child_seed(5, i));
                cfg.schedule = LsSchedule::EveryTau(tau);
                cfg.depth = 2;
                cfg.init = InitStrategy::CopiesOf(f.point(0, 0).unwrap());
                cfg.budget.max_generations = Some(200_000);
                let r = run(&cfg, &f).unwrap();
                if connected_won(variant, r.outcome) == Some(true) {
                    wins[slot] += 1;
                }
            }
        }
        println!(
            "tau {tau:>3}: connected path first in {}/{replicates} (con) and {}/{replicates} (uncon)",
            wins[0], wins[1]
        );
    }
}
