//! Exhaustive landscape analysis over `{0,1}^dim`.
//!
//! The state graph has one vertex per bit string and an edge `x -> y`
//! whenever `y` is a Hamming neighbor of `x` with strictly larger fitness.
//! Vertex `v` is the string whose bits spell `v` in binary, leftmost bit most
//! significant.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bitstring::BitString;
use crate::fitness::Fitness;
use crate::functions::FitnessFunction;
use crate::localsearch::{local_search, PivotRule};
use crate::rng::RngStream;

/// Default exhaustive limit: 2^20 vertices.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 20;
pub const DOT_LIMIT: usize = 8;
pub const DEFAULT_BURN_IN: u64 = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("dimension {dim} exceeds the exhaustive limit of {limit} bits")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("walk length {walk} is below 100 * max_lag = {floor}")]
    WalkTooShort { walk: u64, floor: u64 },
    #[error("autocorrelation undefined: fitness series has zero variance")]
    ZeroVariance,
}

#[derive(Clone, Debug)]
pub struct StateGraph {
    dim: usize,
    fitness: Vec<Fitness>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

fn check_dim(dim: usize, limit: usize) -> Result<(), GraphError> {
    if dim > limit || dim > 31 {
        return Err(GraphError::DimensionTooLarge { dim, limit: limit.min(31) });
    }
    Ok(())
}

fn vertex_point(v: usize, dim: usize) -> BitString {
    BitString::from_index(v as u64, dim).expect("dimension checked against the limit")
}

pub fn build_state_graph<F: FitnessFunction + ?Sized>(f: &F) -> Result<StateGraph, GraphError> {
    build_state_graph_with_limit(f, DEFAULT_EXHAUSTIVE_LIMIT)
}

pub fn build_state_graph_with_limit<F: FitnessFunction + ?Sized>(
    f: &F,
    limit: usize,
) -> Result<StateGraph, GraphError> {
    let dim = f.dim();
    check_dim(dim, limit)?;
    let size = 1usize << dim;
    let fitness: Vec<Fitness> = (0..size)
        .into_par_iter()
        .map(|v| f.evaluate(&vertex_point(v, dim)))
        .collect();
    let adjacency: Vec<Vec<u32>> = (0..size)
        .into_par_iter()
        .map(|v| {
            (0..dim)
                .map(|i| v ^ (1usize << (dim - 1 - i)))
                .filter(|&w| fitness[w] > fitness[v])
                .map(|w| w as u32)
                .collect()
        })
        .collect();
    let mut offsets = Vec::with_capacity(size + 1);
    offsets.push(0);
    for adj in &adjacency {
        offsets.push(offsets.last().unwrap() + adj.len());
    }
    let targets = adjacency.into_iter().flatten().collect();
    Ok(StateGraph {
        dim,
        fitness,
        offsets,
        targets,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LongestPath {
    /// Number of edges.
    pub length: usize,
    pub witness: Vec<BitString>,
}

impl StateGraph {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.fitness.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn fitness(&self, v: usize) -> Fitness {
        self.fitness[v]
    }

    pub fn point(&self, v: usize) -> BitString {
        vertex_point(v, self.dim)
    }

    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.targets[self.offsets[v]..self.offsets[v + 1]]
            .iter()
            .map(|&w| w as usize)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn sink_indices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.out_degree(v) == 0).collect()
    }

    /// Kahn's algorithm, independent of the fitness ordering.
    pub fn is_acyclic(&self) -> bool {
        let n = self.vertex_count();
        let mut indegree = vec![0usize; n];
        for &w in &self.targets {
            indegree[w as usize] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop_front() {
            seen += 1;
            for w in self.successors(v) {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        seen == n
    }

    /// Graphviz rendering; labels are `bits:fitness`.
    pub fn to_dot(&self) -> Result<String, GraphError> {
        check_dim(self.dim, DOT_LIMIT)?;
        let mut s = String::from("digraph state_graph {\n");
        for v in 0..self.vertex_count() {
            let shape = if self.out_degree(v) == 0 { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  v{v} [label=\"{}:{}\", shape={shape}];", self.point(v), self.fitness[v]);
        }
        for v in 0..self.vertex_count() {
            for w in self.successors(v) {
                let _ = writeln!(s, "  v{v} -> v{w};");
            }
        }
        s.push_str("}\n");
        Ok(s)
    }
}

/// Local optima: vertices without outgoing edges, in index order.
pub fn sinks(g: &StateGraph) -> Vec<BitString> {
    g.sink_indices().into_iter().map(|v| g.point(v)).collect()
}

/// Longest directed path, by dynamic programming over vertices in order of
/// decreasing fitness (a topological order, since edges raise fitness).
pub fn longest_improving_path(g: &StateGraph) -> LongestPath {
    let n = g.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.fitness[v]));
    let mut dist = vec![0usize; n];
    let mut next = vec![usize::MAX; n];
    for &v in &order {
        for w in g.successors(v) {
            if dist[w] + 1 > dist[v] {
                dist[v] = dist[w] + 1;
                next[v] = w;
            }
        }
    }
    let start = (0..n).max_by_key(|&v| (dist[v], std::cmp::Reverse(v))).unwrap_or(0);
    let mut witness = vec![g.point(start)];
    let mut v = start;
    while next[v] != usize::MAX {
        v = next[v];
        witness.push(g.point(v));
    }
    LongestPath {
        length: dist[start],
        witness,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub start: BitString,
    pub mean_iterations: f64,
    pub min_iterations: u64,
    pub max_iterations: u64,
    /// Where the last sampled search ended.
    pub end: BitString,
}

/// Iterations until local search converges, from every start, with an
/// effectively unbounded depth (`2^dim`). Deterministic pivots give exact
/// counts; randomized pivots are averaged over `samples` runs.
pub fn pivot_trajectory_stats<F: FitnessFunction + ?Sized>(
    f: &F,
    pivot: PivotRule,
    rng: &mut RngStream,
    samples: usize,
    limit: usize,
) -> Result<Vec<TrajectoryRow>, GraphError> {
    let dim = f.dim();
    check_dim(dim, limit)?;
    let depth = 1u64 << dim;
    let size = 1usize << dim;
    let one = |start: &BitString, rng: &mut RngStream| {
        let mut c = 0;
        local_search(start, f, depth, pivot, rng, &mut c)
    };
    if pivot.is_deterministic() {
        Ok((0..size)
            .into_par_iter()
            .map(|v| {
                let start = vertex_point(v, dim);
                let out = one(&start, &mut RngStream::new(0));
                TrajectoryRow {
                    mean_iterations: out.iterations_used as f64,
                    min_iterations: out.iterations_used,
                    max_iterations: out.iterations_used,
                    end: out.point,
                    start,
                }
            })
            .collect())
    } else {
        let samples = samples.max(1);
        Ok((0..size)
            .map(|v| {
                let start = vertex_point(v, dim);
                let mut total = 0u64;
                let mut min = u64::MAX;
                let mut max = 0;
                let mut end = start.clone();
                for _ in 0..samples {
                    let out = one(&start, rng);
                    total += out.iterations_used;
                    min = min.min(out.iterations_used);
                    max = max.max(out.iterations_used);
                    end = out.point;
                }
                TrajectoryRow {
                    mean_iterations: total as f64 / samples as f64,
                    min_iterations: min,
                    max_iterations: max,
                    end,
                    start,
                }
            })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Autocorrelation {
    /// `r[s]` for lags `0..=max_lag`; `r[0] = 1`.
    pub r: Vec<f64>,
    /// `-1 / ln r(1)` when `0 < r(1) < 1`.
    pub correlation_length: Option<f64>,
}

pub fn autocorrelation<F: FitnessFunction + ?Sized>(
    f: &F,
    walk_length: u64,
    max_lag: usize,
    rng: &mut RngStream,
) -> Result<Autocorrelation, GraphError> {
    autocorrelation_with_burn_in(f, walk_length, max_lag, DEFAULT_BURN_IN, rng)
}

/// Random-walk autocorrelation of the fitness series. The walk moves to a
/// uniformly chosen Hamming neighbor each step; `burn_in` steps are
/// discarded before `walk_length` values are recorded.
pub fn autocorrelation_with_burn_in<F: FitnessFunction + ?Sized>(
    f: &F,
    walk_length: u64,
    max_lag: usize,
    burn_in: u64,
    rng: &mut RngStream,
) -> Result<Autocorrelation, GraphError> {
    let floor = 100 * max_lag.max(1) as u64;
    if walk_length < floor {
        return Err(GraphError::WalkTooShort { walk: walk_length, floor });
    }
    let dim = f.dim();
    let mut x = BitString::random(dim, rng);
    for _ in 0..burn_in {
        x.flip(rng.gen_range(0..dim));
    }
    let mut series = Vec::with_capacity(walk_length as usize);
    for _ in 0..walk_length {
        series.push(f.evaluate(&x).value() as f64);
        x.flip(rng.gen_range(0..dim));
    }
    let r = correlation_series(&series, max_lag)?;
    let r1 = r.get(1).copied().unwrap_or(f64::NAN);
    let correlation_length = (r1 > 0.0 && r1 < 1.0).then(|| -1.0 / r1.ln());
    Ok(Autocorrelation { r, correlation_length })
}

/// Empirical autocorrelation `c(s) / c(0)` with lag covariances averaged over
/// the `T - s` available pairs.
pub fn correlation_series(series: &[f64], max_lag: usize) -> Result<Vec<f64>, GraphError> {
    let t = series.len();
    let mean = series.iter().sum::<f64>() / t as f64;
    let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let c0 = centered.iter().map(|v| v * v).sum::<f64>() / t as f64;
    if c0 <= 0.0 || !c0.is_finite() {
        return Err(GraphError::ZeroVariance);
    }
    Ok((0..=max_lag)
        .map(|s| {
            if s == 0 {
                return 1.0;
            }
            if s >= t {
                return 0.0;
            }
            let cs = centered[..t - s]
                .iter()
                .zip(&centered[s..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / (t - s) as f64;
            (cs / c0).clamp(-1.0, 1.0)
        })
        .collect())
}

pub fn sinks_csv(g: &StateGraph) -> String {
    let mut s = String::from("point,fitness\n");
    for v in g.sink_indices() {
        let _ = writeln!(s, "{},{}", g.point(v), g.fitness[v]);
    }
    s
}

pub fn trajectories_csv(rows: &[TrajectoryRow]) -> String {
    let mut s = String::from("start,mean_iterations,min_iterations,max_iterations,end\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.start, r.mean_iterations, r.min_iterations, r.max_iterations, r.end
        );
    }
    s
}

pub fn autocorrelation_csv(a: &Autocorrelation) -> String {
    let mut s = String::from("lag,r\n");
    for (lag, r) in a.r.iter().enumerate() {
        let _ = writeln!(s, "{lag},{r}");
    }
    s
}
