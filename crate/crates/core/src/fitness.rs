//! Exact integer fitness values.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("fitness arithmetic overflow")]
pub struct FitnessOverflow;

/// Totally ordered, exact fitness. Backed by `i128`, which covers ±2^63.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fitness(pub i128);

impl Fitness {
    pub const ZERO: Fitness = Fitness(0);

    pub fn new(value: i128) -> Self {
        Self(value)
    }

    pub fn value(self) -> i128 {
        self.0
    }

    pub fn checked_add(self, rhs: Fitness) -> Result<Fitness, FitnessOverflow> {
        self.0.checked_add(rhs.0).map(Fitness).ok_or(FitnessOverflow)
    }

    pub fn checked_sub(self, rhs: Fitness) -> Result<Fitness, FitnessOverflow> {
        self.0.checked_sub(rhs.0).map(Fitness).ok_or(FitnessOverflow)
    }

    pub fn checked_mul(self, rhs: i128) -> Result<Fitness, FitnessOverflow> {
        self.0.checked_mul(rhs).map(Fitness).ok_or(FitnessOverflow)
    }
}

impl From<i64> for Fitness {
    fn from(v: i64) -> Self {
        Self(v as i128)
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fitness({})", self.0)
    }
}
