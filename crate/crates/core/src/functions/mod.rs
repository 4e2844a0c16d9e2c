//! Benchmark fitness functions behind one evaluation interface.
//!
//! All functions are maximized and integer valued.

mod longpath;
mod onemax;
mod race;
mod sectioned;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitstring::BitString;
use crate::fitness::{Fitness, FitnessOverflow};
use crate::paths::PathError;

pub use longpath::LongPathFn;
pub use onemax::{Constant, OneMax};
pub use race::{RaceFn, RaceParams, RaceVariant};
pub use sectioned::{SectionedPathFn, SectionedPathParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Regular,
    GlobalOptimum,
    Trap,
}

pub trait FitnessFunction: Send + Sync {
    fn dim(&self) -> usize;

    /// Fitness of `x`. `x.len()` must equal [`FitnessFunction::dim`].
    fn evaluate(&self, x: &BitString) -> Fitness;

    fn is_global_optimum(&self, x: &BitString) -> bool;

    fn classify(&self, x: &BitString) -> Classification {
        if self.is_global_optimum(x) {
            Classification::GlobalOptimum
        } else {
            Classification::Regular
        }
    }

    /// Human-readable construction parameters.
    fn metadata(&self) -> String;
}

impl<F: FitnessFunction + ?Sized> FitnessFunction for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn evaluate(&self, x: &BitString) -> Fitness {
        (**self).evaluate(x)
    }
    fn is_global_optimum(&self, x: &BitString) -> bool {
        (**self).is_global_optimum(x)
    }
    fn classify(&self, x: &BitString) -> Classification {
        (**self).classify(x)
    }
    fn metadata(&self) -> String {
        (**self).metadata()
    }
}

impl<F: FitnessFunction + ?Sized> FitnessFunction for Box<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn evaluate(&self, x: &BitString) -> Fitness {
        (**self).evaluate(x)
    }
    fn is_global_optimum(&self, x: &BitString) -> bool {
        (**self).is_global_optimum(x)
    }
    fn classify(&self, x: &BitString) -> Classification {
        (**self).classify(x)
    }
    fn metadata(&self) -> String {
        (**self).metadata()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Overflow(#[from] FitnessOverflow),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("section {section}: no bit pair yields a target at distance >= 2 from the path")]
    NoTarget { section: usize },
}
