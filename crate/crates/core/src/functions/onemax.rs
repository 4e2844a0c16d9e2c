use crate::bitstring::BitString;
use crate::fitness::Fitness;

use super::FitnessFunction;

/// Number of one-bits.
#[derive(Clone, Debug)]
pub struct OneMax {
    dim: usize,
}

impl OneMax {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl FitnessFunction for OneMax {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &BitString) -> Fitness {
        Fitness(x.count_ones() as i128)
    }

    fn is_global_optimum(&self, x: &BitString) -> bool {
        x.count_ones() == self.dim
    }

    fn metadata(&self) -> String {
        format!("onemax dim={}", self.dim)
    }
}

/// Flat landscape; every point is optimal.
#[derive(Clone, Debug)]
pub struct Constant {
    dim: usize,
    value: i128,
}

impl Constant {
    pub fn new(dim: usize, value: i128) -> Self {
        Self { dim, value }
    }
}

impl FitnessFunction for Constant {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, _x: &BitString) -> Fitness {
        Fitness(self.value)
    }

    fn is_global_optimum(&self, _x: &BitString) -> bool {
        true
    }

    fn metadata(&self) -> String {
        format!("constant dim={} value={}", self.dim, self.value)
    }
}
