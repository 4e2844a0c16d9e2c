//! Sweeps the local search depth on the sectioned path function. Only
//! depths near the section depth reach the optimum.

use memetic_lab::experiment::output::csv_body;
use memetic_lab::experiment::{execute, Format, Spec};

fn main() {
    let spec = Spec::parse(
        "function = f_d
dim = 46
k = 5
fd_depth = 20
fd_gap = 6
fd_sections = 20
lambda = 4
delta_values = 8,14,20,26,32
replicates = 20
max_generations = 5000
master_seed = 1
",
    )
    .unwrap();
    let out = execute("sweep-delta", &spec, Format::Csv).unwrap();
    for m in &out.messages {
        eprintln!("{m}");
    }
    for line in csv_body(out.file("summary.csv").unwrap()).lines() {
        let cols: Vec<&str> = line.split(',').collect();
        println!("{:>6} {:>14} {:>10} {:>12}", cols[3], cols[5], cols[6], cols[9]);
    }
}
