//! Runs depth-bounded hill climbing with every pivot rule on the long path.

use memetic_lab::functions::LongPathFn;
use memetic_lab::localsearch::UNBOUNDED;
use memetic_lab::{local_search, FitnessFunction, NeighborOrder, PivotRule, RngStream};

fn main() {
    let f = LongPathFn::new(11).unwrap();
    let start = f.path().points()[0].clone();
    println!("long path dim 11, {} points, start {start}", f.path().len());
    let pivots = [
        PivotRule::FirstImprovement(NeighborOrder::Fixed),
        PivotRule::FirstImprovement(NeighborOrder::Shuffled),
        PivotRule::SteepestAscent,
        PivotRule::RandomImprovement,
    ];
    for depth in [5, 20, UNBOUNDED] {
        for pivot in pivots {
            let mut rng = RngStream::new(1);
            let mut evals = 0;
            let out = local_search(&start, &f, depth, pivot, &mut rng, &mut evals);
            println!(
                "depth {:>4} {:<15} iterations {:>3} evaluations {:>4} fitness {:>3} converged {}",
                if depth == UNBOUNDED { "inf".to_string() } else { depth.to_string() },
                pivot.name(),
                out.iterations_used,
                evals,
                f.evaluate(&out.point),
                out.converged
            );
        }
    }
}
