//! Builds long k-paths, checks their invariants and locates a few points.

use memetic_lab::paths::{build_long_k_path, recurrence_length};
use memetic_lab::BitString;

fn main() {
    for (dim, k) in [(5, 2), (9, 2), (13, 3), (21, 4)] {
        let path = build_long_k_path(dim, k).expect("dim is 1 mod k");
        let report = path.verify();
        println!(
            "dim {dim:>2} k {k}: length {:>5} (recurrence {}), invariants ok: {}",
            path.len(),
            recurrence_length(dim, k).unwrap(),
            report.ok()
        );
    }

    let path = build_long_k_path(9, 2).unwrap();
    println!("first points of the dim 9 path:");
    for (i, p) in path.points().iter().take(6).enumerate() {
        println!("  {i:>2} {p}");
    }
    for s in ["000000000", "111111111", "000000011"] {
        let x: BitString = s.parse().unwrap();
        println!("position of {s}: {:?}", path.position_of(&x).unwrap());
    }
}
