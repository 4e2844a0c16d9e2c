use crate::bitstring::BitString;
use crate::fitness::Fitness;
use crate::paths::{build_long_k_path, LongKPath};

use super::{FitnessFunction, FunctionError};

/// Long path problem over the 2-path: on-path points score `dim + 1 + position`,
/// off-path points score `dim - ones(x)`, which leads back to the all-zeros
/// path start.
#[derive(Clone, Debug)]
pub struct LongPathFn {
    path: LongKPath,
}

impl LongPathFn {
    /// `dim` must be odd.
    pub fn new(dim: usize) -> Result<Self, FunctionError> {
        Ok(Self {
            path: build_long_k_path(dim, 2)?,
        })
    }

    pub fn path(&self) -> &LongKPath {
        &self.path
    }
}

impl FitnessFunction for LongPathFn {
    fn dim(&self) -> usize {
        self.path.dim()
    }

    fn evaluate(&self, x: &BitString) -> Fitness {
        let dim = self.path.dim() as i128;
        match self.path.lookup(x) {
            Some(p) => Fitness(dim + 1 + p as i128),
            None => Fitness(dim - x.count_ones() as i128),
        }
    }

    fn is_global_optimum(&self, x: &BitString) -> bool {
        x == self.path.last()
    }

    fn metadata(&self) -> String {
        format!("longpath dim={} k=2 length={}", self.path.dim(), self.path.len())
    }
}
