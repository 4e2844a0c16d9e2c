//! Exhaustive landscape analysis: sinks, longest improving path and the
//! spread of local search trajectory lengths.

use memetic_lab::functions::{LongPathFn, SectionedPathFn, SectionedPathParams};
use memetic_lab::stategraph::{build_state_graph, longest_improving_path, pivot_trajectory_stats, sinks};
use memetic_lab::{FitnessFunction, PivotRule, RngStream};

fn describe(name: &str, f: &dyn FitnessFunction) {
    let g = build_state_graph(f).unwrap();
    let s = sinks(&g);
    let lp = longest_improving_path(&g);
    let rows = pivot_trajectory_stats(f, PivotRule::SteepestAscent, &mut RngStream::new(0), 1, 20).unwrap();
    let longest = rows.iter().map(|r| r.max_iterations).max().unwrap();
    println!(
        "{name}: {} vertices, {} edges, {} sinks, longest improving path {}, longest steepest ascent {longest}",
        g.vertex_count(),
        g.edge_count(),
        s.len(),
        lp.length
    );
}

fn main() {
    describe("long path dim 11", &LongPathFn::new(11).unwrap());
    let p = SectionedPathParams { dim: 13, k: 3, depth: 4, gap: 2, sections: 4 };
    describe("sectioned path dim 13", &SectionedPathFn::new(p).unwrap());
}
