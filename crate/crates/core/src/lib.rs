//! A laboratory for studying how global search (population and mutation)
//! and local search (depth and frequency) interact in memetic algorithms.
//!
//! The crate provides
//!
//! - [`bitstring`], [`fitness`], [`rng`]: genotypes, exact fitness values and
//!   reproducible random streams;
//! - [`paths`]: long k-paths with constant-time position lookup;
//! - [`functions`]: OneMax, the long path problem, the sectioned path
//!   function whose optimization needs one particular local search depth,
//!   and the race functions whose outcome hinges on the local search
//!   frequency;
//! - [`localsearch`] and [`engine`]: depth-bounded hill climbing and the
//!   (μ+λ) memetic algorithm;
//! - [`stategraph`]: exhaustive state-graph analysis and random-walk
//!   autocorrelation;
//! - [`experiment`]: config files, replicated runs, parameter sweeps, race
//!   calibration and CSV / JSON-lines output used by the `memlab` binary.

pub mod bitstring;
pub mod engine;
pub mod experiment;
pub mod fitness;
pub mod functions;
pub mod localsearch;
pub mod paths;
pub mod rng;
pub mod stategraph;

pub use bitstring::{hamming, mutate, neighbors, BitString, NeighborOrder};
pub use engine::{run, InitStrategy, LsSchedule, MaConfig, Outcome, RunRecord};
pub use fitness::Fitness;
pub use functions::FitnessFunction;
pub use localsearch::{local_search, PivotRule};
pub use rng::RngStream;
