//! Depth-bounded strict-improvement hill climbing over the Hamming-1
//! neighborhood.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::{BitString, NeighborOrder};
use crate::fitness::Fitness;
use crate::functions::FitnessFunction;
use crate::rng::RngStream;

/// Depth that is never reached in practice.
pub const UNBOUNDED: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotRule {
    FirstImprovement(NeighborOrder),
    /// Best neighbor; ties go to the lowest flipped-bit index.
    SteepestAscent,
    /// Uniform choice among strictly improving neighbors.
    RandomImprovement,
}

impl Default for PivotRule {
    fn default() -> Self {
        PivotRule::FirstImprovement(NeighborOrder::Fixed)
    }
}

impl PivotRule {
    pub fn name(self) -> &'static str {
        match self {
            PivotRule::FirstImprovement(NeighborOrder::Fixed) => "first",
            PivotRule::FirstImprovement(NeighborOrder::Shuffled) => "first_shuffled",
            PivotRule::SteepestAscent => "steepest",
            PivotRule::RandomImprovement => "random",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "first" => PivotRule::FirstImprovement(NeighborOrder::Fixed),
            "first_shuffled" => PivotRule::FirstImprovement(NeighborOrder::Shuffled),
            "steepest" => PivotRule::SteepestAscent,
            "random" => PivotRule::RandomImprovement,
            _ => return None,
        })
    }

    pub fn is_deterministic(self) -> bool {
        matches!(
            self,
            PivotRule::FirstImprovement(NeighborOrder::Fixed) | PivotRule::SteepestAscent
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LsOutcome {
    pub point: BitString,
    pub fitness: Fitness,
    pub iterations_used: u64,
    /// The returned point has no strictly better neighbor. Set when the
    /// search stopped for lack of an improving neighbor, or when the depth ran
    /// out exactly at a global optimum. Never set for depth 0.
    pub converged: bool,
    /// Fitness evaluations performed by this call.
    pub evaluations: u64,
}

/// Local search from `y`, which is evaluated first (and counted).
pub fn local_search<F: FitnessFunction + ?Sized>(
    y: &BitString,
    f: &F,
    depth: u64,
    pivot: PivotRule,
    rng: &mut RngStream,
    counter: &mut u64,
) -> LsOutcome {
    let fy = f.evaluate(y);
    *counter += 1;
    let mut out = local_search_from(y.clone(), fy, f, depth, pivot, rng, counter);
    out.evaluations += 1;
    out
}

/// Local search from `y` whose fitness `fy` is already known. Only neighbor
/// probes are evaluated; each one increments `counter`.
pub fn local_search_from<F: FitnessFunction + ?Sized>(
    mut y: BitString,
    mut fy: Fitness,
    f: &F,
    depth: u64,
    pivot: PivotRule,
    rng: &mut RngStream,
    counter: &mut u64,
) -> LsOutcome {
    let n = y.len();
    let start = *counter;
    let mut iterations = 0u64;
    let mut stuck = false;
    let mut order: Vec<usize> = (0..n).collect();
    let mut improving: Vec<(usize, Fitness)> = Vec::new();

    while iterations < depth {
        let step = match pivot {
            PivotRule::FirstImprovement(ord) => {
                if ord == NeighborOrder::Shuffled {
                    order.shuffle(rng);
                }
                let mut found = None;
                for &i in &order {
                    y.flip(i);
                    let fz = f.evaluate(&y);
                    *counter += 1;
                    y.flip(i);
                    if fz > fy {
                        found = Some((i, fz));
                        break;
                    }
                }
                found
            }
            PivotRule::SteepestAscent => {
                let mut best: Option<(usize, Fitness)> = None;
                for i in 0..n {
                    y.flip(i);
                    let fz = f.evaluate(&y);
                    *counter += 1;
                    y.flip(i);
                    if fz > fy && best.is_none_or(|(_, fb)| fz > fb) {
                        best = Some((i, fz));
                    }
                }
                best
            }
            PivotRule::RandomImprovement => {
                improving.clear();
                for i in 0..n {
                    y.flip(i);
                    let fz = f.evaluate(&y);
                    *counter += 1;
                    y.flip(i);
                    if fz > fy {
                        improving.push((i, fz));
                    }
                }
                (!improving.is_empty()).then(|| improving[rng.gen_range(0..improving.len())])
            }
        };
        match step {
            Some((i, fz)) => {
                y.flip(i);
                fy = fz;
                iterations += 1;
            }
            None => {
                stuck = true;
                break;
            }
        }
    }

    let converged = stuck || (depth > 0 && f.is_global_optimum(&y));
    LsOutcome {
        point: y,
        fitness: fy,
        iterations_used: iterations,
        converged,
        evaluations: *counter - start,
    }
}
