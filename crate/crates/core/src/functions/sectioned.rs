//! Sectioned long-path function whose optimization hinges on the local
//! search depth.
//!
//! The path is cut into `S` sections of length `L_s = D + gap`. With
//! `A = 2 gap - 1`, the point at depth `d` of section `i` (1-based) scores
//! `1 + i A + d`; every section end is a local optimum because the next
//! section starts `D - gap` lower. A section point beats the previous
//! section end iff `d >= D - gap + 1`. Each section has one target, two bit
//! flips away from its depth-`D` point and at Hamming distance at least two
//! from the whole path; targets score `G = 1 + (S + 1) A + L_s`. Everything
//! else scores 0.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::fitness::Fitness;
use crate::paths::{build_long_k_path, LongKPath};

use super::{FitnessFunction, FunctionError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionedPathParams {
    pub dim: usize,
    pub k: usize,
    /// Local search depth that lands exactly next to a target.
    pub depth: usize,
    pub gap: usize,
    pub sections: usize,
}

impl SectionedPathParams {
    pub fn section_len(&self) -> usize {
        self.depth + self.gap
    }

    pub fn offset(&self) -> i128 {
        2 * self.gap as i128 - 1
    }

    /// First depth at which a section point beats the previous section end.
    pub fn acceptance_depth(&self) -> usize {
        self.depth - self.gap + 1
    }
}

#[derive(Clone, Debug)]
pub struct SectionedPathFn {
    params: SectionedPathParams,
    path: LongKPath,
    targets: Vec<BitString>,
    target_index: FxHashMap<BitString, usize>,
    optimum: Fitness,
}

impl SectionedPathFn {
    pub fn new(params: SectionedPathParams) -> Result<Self, FunctionError> {
        let SectionedPathParams {
            dim,
            k,
            depth,
            gap,
            sections,
        } = params;
        if gap < 2 || depth <= gap {
            return Err(FunctionError::InvalidParams(format!(
                "need depth > gap >= 2, got depth={depth} gap={gap}"
            )));
        }
        if sections == 0 {
            return Err(FunctionError::InvalidParams("sections must be >= 1".into()));
        }
        let path = build_long_k_path(dim, k)?;
        let used = sections
            .checked_mul(params.section_len())
            .ok_or_else(|| FunctionError::InvalidParams("sections * section length overflows".into()))?;
        if used > path.len() {
            return Err(FunctionError::InvalidParams(format!(
                "{sections} sections of length {} need {used} path points, path has {}",
                params.section_len(),
                path.len()
            )));
        }

        let far_from_path = |x: &BitString| {
            path.lookup(x).is_none() && (0..dim).all(|j| path.lookup(&x.flipped(j)).is_none())
        };
        let mut targets = Vec::with_capacity(sections);
        let mut target_index = FxHashMap::default();
        for section in 1..=sections {
            let base = &path.points()[(section - 1) * params.section_len() + depth];
            let found = (0..dim)
                .flat_map(|a| (a + 1..dim).map(move |b| (a, b)))
                .map(|(a, b)| {
                    let mut t = base.clone();
                    t.flip(a);
                    t.flip(b);
                    t
                })
                .find(|t| !target_index.contains_key(t) && far_from_path(t));
            match found {
                Some(t) => {
                    target_index.insert(t.clone(), section);
                    targets.push(t);
                }
                None => return Err(FunctionError::NoTarget { section }),
            }
        }

        let optimum = Fitness(1)
            .checked_add(Fitness(sections as i128 + 1).checked_mul(params.offset())?)?
            .checked_add(Fitness(params.section_len() as i128))?;
        Ok(Self {
            params,
            path,
            targets,
            target_index,
            optimum,
        })
    }

    pub fn params(&self) -> &SectionedPathParams {
        &self.params
    }

    pub fn path(&self) -> &LongKPath {
        &self.path
    }

    /// Targets in section order.
    pub fn targets(&self) -> &[BitString] {
        &self.targets
    }

    pub fn optimum_value(&self) -> Fitness {
        self.optimum
    }

    /// Path point at `depth` of `section` (1-based).
    pub fn section_point(&self, section: usize, depth: usize) -> Option<&BitString> {
        if section == 0 || section > self.params.sections || depth >= self.params.section_len() {
            return None;
        }
        self.path
            .point((section - 1) * self.params.section_len() + depth)
    }

    pub fn section_end(&self, section: usize) -> Option<&BitString> {
        self.section_point(section, self.params.section_len() - 1)
    }

    pub fn path_start(&self) -> &BitString {
        &self.path.points()[0]
    }

    /// `(section, depth)` of a used path point.
    pub fn locate(&self, x: &BitString) -> Option<(usize, usize)> {
        let p = self.path.lookup(x)?;
        let len = self.params.section_len();
        (p < self.params.sections * len).then(|| (p / len + 1, p % len))
    }

    /// Fitness formula for a section point, independent of any bit string.
    pub fn section_value(&self, section: usize, depth: usize) -> Fitness {
        Fitness(1 + section as i128 * self.params.offset() + depth as i128)
    }
}

impl FitnessFunction for SectionedPathFn {
    fn dim(&self) -> usize {
        self.params.dim
    }

    fn evaluate(&self, x: &BitString) -> Fitness {
        if self.target_index.contains_key(x) {
            return self.optimum;
        }
        match self.locate(x) {
            Some((section, depth)) => self.section_value(section, depth),
            None => Fitness::ZERO,
        }
    }

    fn is_global_optimum(&self, x: &BitString) -> bool {
        self.target_index.contains_key(x)
    }

    fn metadata(&self) -> String {
        let p = &self.params;
        format!(
            "f_d dim={} k={} depth={} gap={} sections={} path_length={}",
            p.dim,
            p.k,
            p.depth,
            p.gap,
            p.sections,
            self.path.len()
        )
    }
}
