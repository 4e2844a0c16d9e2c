//! Race functions: a connected path in the left half of the bit string
//! (climbable by local search) races an unconnected path of isolated peaks in
//! the right half (every third point of the long k-path, climbable only by
//! 3-bit mutations).
//!
//! Regular fitness is `1 + w pos_con + pos_unc`. Reaching the winning end
//! gives the global optimum `G = 1 + w L_con + L_unc + 2`; reaching the
//! losing end first gives the absorbing trap value `G - 1`.

use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::fitness::Fitness;
use crate::paths::{build_long_k_path, LongKPath};

use super::{Classification, FitnessFunction, FunctionError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RaceVariant {
    /// The connected path's end is optimal.
    Con,
    /// The unconnected path's end is optimal.
    Uncon,
}

impl RaceVariant {
    pub fn name(self) -> &'static str {
        match self {
            RaceVariant::Con => "race_con",
            RaceVariant::Uncon => "race_uncon",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaceParams {
    pub half_dim: usize,
    pub k: usize,
    pub l_con: usize,
    pub l_unc: usize,
    /// Connected-path weight; defaults to the total dimension.
    pub weight: Option<u64>,
    pub variant: RaceVariant,
}

impl RaceParams {
    pub fn dim(&self) -> usize {
        2 * self.half_dim
    }

    pub fn effective_weight(&self) -> i128 {
        self.weight.map_or(self.dim() as i128, |w| w as i128)
    }
}

#[derive(Clone, Debug)]
pub struct RaceFn {
    params: RaceParams,
    path: LongKPath,
    optimum: Fitness,
}

impl RaceFn {
    pub fn new(params: RaceParams) -> Result<Self, FunctionError> {
        if params.k < 4 {
            return Err(FunctionError::InvalidParams(format!(
                "race functions need k >= 4, got {}",
                params.k
            )));
        }
        if params.weight == Some(0) {
            return Err(FunctionError::InvalidParams("weight must be positive".into()));
        }
        let path = build_long_k_path(params.half_dim, params.k)?;
        Self::with_path(params, path)
    }

    /// Reuses an already built path over `half_dim` bits.
    pub fn with_path(params: RaceParams, path: LongKPath) -> Result<Self, FunctionError> {
        if path.dim() != params.half_dim || path.k() != params.k {
            return Err(FunctionError::InvalidParams("path does not match race parameters".into()));
        }
        if params.l_con >= path.len() {
            return Err(FunctionError::InvalidParams(format!(
                "l_con = {} must be below the path length {}",
                params.l_con,
                path.len()
            )));
        }
        if params.l_unc.checked_mul(3).is_none_or(|v| v >= path.len()) {
            return Err(FunctionError::InvalidParams(format!(
                "3 * l_unc = {} must be below the path length {}",
                3 * params.l_unc as u128,
                path.len()
            )));
        }
        let w = Fitness(params.effective_weight());
        let optimum = Fitness(1)
            .checked_add(w.checked_mul(params.l_con as i128)?)?
            .checked_add(Fitness(params.l_unc as i128 + 2))?;
        Ok(Self { params, path, optimum })
    }

    pub fn params(&self) -> &RaceParams {
        &self.params
    }

    pub fn path(&self) -> &LongKPath {
        &self.path
    }

    pub fn optimum_value(&self) -> Fitness {
        self.optimum
    }

    /// The point at connected position `pos_con` and peak `pos_unc`.
    pub fn point(&self, pos_con: usize, pos_unc: usize) -> Option<BitString> {
        if pos_con > self.params.l_con || pos_unc > self.params.l_unc {
            return None;
        }
        let left = self.path.point(pos_con)?;
        let right = self.path.point(3 * pos_unc)?;
        Some(left.concat(right))
    }

    /// `(pos_con, pos_unc)` when both halves are valid.
    pub fn decode(&self, x: &BitString) -> Option<(usize, usize)> {
        let h = self.params.half_dim;
        let pos_con = self.path.lookup(&x.slice(0, h)).filter(|&p| p <= self.params.l_con)?;
        let raw = self.path.lookup(&x.slice(h, h))?;
        let pos_unc = (raw % 3 == 0).then_some(raw / 3).filter(|&j| j <= self.params.l_unc)?;
        Some((pos_con, pos_unc))
    }

    fn classify_decoded(&self, pos: Option<(usize, usize)>) -> (Classification, Fitness) {
        let Some((pos_con, pos_unc)) = pos else {
            return (Classification::Regular, Fitness::ZERO);
        };
        let con_end = pos_con == self.params.l_con;
        let unc_end = pos_unc == self.params.l_unc;
        let (win, lose) = match self.params.variant {
            RaceVariant::Con => (con_end, unc_end),
            RaceVariant::Uncon => (unc_end, con_end),
        };
        if win {
            (Classification::GlobalOptimum, self.optimum)
        } else if lose {
            (Classification::Trap, Fitness(self.optimum.0 - 1))
        } else {
            let w = self.params.effective_weight();
            (Classification::Regular, Fitness(1 + w * pos_con as i128 + pos_unc as i128))
        }
    }
}

impl FitnessFunction for RaceFn {
    fn dim(&self) -> usize {
        self.params.dim()
    }

    fn evaluate(&self, x: &BitString) -> Fitness {
        self.classify_decoded(self.decode(x)).1
    }

    fn is_global_optimum(&self, x: &BitString) -> bool {
        self.classify(x) == Classification::GlobalOptimum
    }

    fn classify(&self, x: &BitString) -> Classification {
        self.classify_decoded(self.decode(x)).0
    }

    fn metadata(&self) -> String {
        let p = &self.params;
        format!(
            "{} half_dim={} k={} l_con={} l_unc={} weight={} path_length={}",
            p.variant.name(),
            p.half_dim,
            p.k,
            p.l_con,
            p.l_unc,
            p.effective_weight(),
            self.path.len()
        )
    }
}
