//! Long k-paths: Hamming-1 connected paths through `{0,1}^dim` on which any
//! shortcut needs at least `k` simultaneous bit flips.
//!
//! Construction, for `dim ≡ 1 (mod k)`: the 1-bit path is `(0, 1)`. Given the
//! path `P` over `d` bits, the path over `d + k` bits is
//!
//! ```text
//! [0^k ++ p for p in P]
//!   ++ [0^(k-i) 1^i ++ last(P) for i in 1..k]
//!   ++ [1^k ++ p for p in reverse(P)]
//! ```
//!
//! so the length obeys `L(1) = 2`, `L(d + k) = 2 L(d) + k - 1`.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::bitstring::{hamming, BitError, BitString};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("k must be at least 1")]
    InvalidK,
    #[error("dimension {dim} is not congruent to 1 modulo k = {k}")]
    BadDimension { dim: usize, k: usize },
    #[error(transparent)]
    Bits(#[from] BitError),
}

#[derive(Clone, Debug)]
pub struct LongKPath {
    k: usize,
    dim: usize,
    points: Vec<BitString>,
    index: FxHashMap<BitString, usize>,
}

/// Length of the long k-path over `dim` bits by the recurrence.
pub fn recurrence_length(dim: usize, k: usize) -> Result<u128, PathError> {
    check_params(dim, k)?;
    let mut len: u128 = 2;
    let mut d = 1;
    while d < dim {
        len = 2 * len + k as u128 - 1;
        d += k;
    }
    Ok(len)
}

fn check_params(dim: usize, k: usize) -> Result<(), PathError> {
    if k < 1 {
        return Err(PathError::InvalidK);
    }
    if dim == 0 || dim % k != 1 % k {
        return Err(PathError::BadDimension { dim, k });
    }
    Ok(())
}

pub fn build_long_k_path(dim: usize, k: usize) -> Result<LongKPath, PathError> {
    check_params(dim, k)?;
    let mut points = vec![BitString::zeros(1), BitString::ones(1)];
    let mut d = 1;
    while d < dim {
        let zeros = BitString::zeros(k);
        let ones = BitString::ones(k);
        let last = points.last().expect("paths are never empty").clone();
        let mut next = Vec::with_capacity(2 * points.len() + k - 1);
        next.extend(points.iter().map(|p| zeros.concat(p)));
        for i in 1..k {
            let bridge = BitString::zeros(k - i).concat(&BitString::ones(i));
            next.push(bridge.concat(&last));
        }
        next.extend(points.iter().rev().map(|p| ones.concat(p)));
        points = next;
        d += k;
    }
    let index = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    Ok(LongKPath {
        k,
        dim,
        points,
        index,
    })
}

impl LongKPath {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[BitString] {
        &self.points
    }

    pub fn point(&self, position: usize) -> Option<&BitString> {
        self.points.get(position)
    }

    pub fn last(&self) -> &BitString {
        self.points.last().expect("paths are never empty")
    }

    pub fn position_of(&self, x: &BitString) -> Result<Option<usize>, PathError> {
        if x.len() != self.dim {
            return Err(BitError::LengthMismatch {
                left: x.len(),
                right: self.dim,
            }
            .into());
        }
        Ok(self.lookup(x))
    }

    /// Position lookup without the length check, for hot evaluation loops.
    #[inline]
    pub(crate) fn lookup(&self, x: &BitString) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// Checks every structural invariant exhaustively and reports violations.
    pub fn verify(&self) -> PathReport {
        let mut report = PathReport {
            dim: self.dim,
            k: self.k,
            length: self.points.len(),
            expected_length: recurrence_length(self.dim, self.k).unwrap_or(0),
            ..PathReport::default()
        };
        let distinct: std::collections::HashSet<&BitString> = self.points.iter().collect();
        report.duplicate_points = self.points.len() - distinct.len();
        for w in self.points.windows(2) {
            if hamming(&w[0], &w[1]).unwrap_or(0) != 1 {
                report.adjacency_violations += 1;
            }
        }
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let path_dist = j - i;
                let h = hamming(&self.points[i], &self.points[j]).unwrap_or(0);
                if path_dist < self.k {
                    if h != path_dist {
                        report.shortcut_violations += 1;
                    }
                } else if h < self.k {
                    report.shortcut_violations += 1;
                }
            }
        }
        if self.points[0] != BitString::zeros(self.dim) {
            report.start_violation = true;
        }
        report
    }
}

/// Outcome of [`LongKPath::verify`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathReport {
    pub dim: usize,
    pub k: usize,
    pub length: usize,
    pub expected_length: u128,
    pub duplicate_points: usize,
    pub adjacency_violations: usize,
    /// Pairs at path distance `d < k` with Hamming distance other than `d`,
    /// plus pairs at path distance `>= k` closer than `k` in Hamming distance.
    pub shortcut_violations: usize,
    pub start_violation: bool,
}

impl PathReport {
    pub fn ok(&self) -> bool {
        self.duplicate_points == 0
            && self.adjacency_violations == 0
            && self.shortcut_violations == 0
            && !self.start_violation
            && self.length as u128 == self.expected_length
    }
}
