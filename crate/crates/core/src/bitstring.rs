//! Fixed-length bit strings, the genotype shared by every module.
//!
//! Bit index 0 is the leftmost bit. Strings are stored packed, 64 bits per
//! word, so hashing and comparison stay cheap for the dimensions used here.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RngStream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BitError {
    #[error("length mismatch: {left} bits vs {right} bits")]
    LengthMismatch { left: usize, right: usize },
    #[error("mutation probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid bit character {0:?}; expected '0' or '1'")]
    InvalidChar(char),
    #[error("bit strings must have at least one bit")]
    Empty,
    #[error("dimension {0} does not fit an integer index (max 64)")]
    IndexTooWide(usize),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Box<[u64]>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitString {
    /// All-zeros string of `len` bits.
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)].into_boxed_slice(),
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut x = Self::zeros(len);
        for w in x.words.iter_mut() {
            *w = u64::MAX;
        }
        x.clear_tail();
        x
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut x = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                x.set(i, true);
            }
        }
        x
    }

    /// Uniformly random string.
    pub fn random(len: usize, rng: &mut RngStream) -> Self {
        let mut x = Self::zeros(len);
        for w in x.words.iter_mut() {
            *w = rng.gen();
        }
        x.clear_tail();
        x
    }

    /// Builds the string whose bits, read left to right, are the binary
    /// digits of `index` (most significant first).
    pub fn from_index(index: u64, len: usize) -> Result<Self, BitError> {
        if len > 64 {
            return Err(BitError::IndexTooWide(len));
        }
        let mut x = Self::zeros(len);
        for i in 0..len {
            if (index >> (len - 1 - i)) & 1 == 1 {
                x.set(i, true);
            }
        }
        Ok(x)
    }

    /// Inverse of [`BitString::from_index`].
    pub fn to_index(&self) -> Result<u64, BitError> {
        if self.len > 64 {
            return Err(BitError::IndexTooWide(self.len));
        }
        Ok((0..self.len).fold(0u64, |acc, i| (acc << 1) | self.get(i) as u64))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Copy with bit `i` flipped.
    pub fn flipped(&self, i: usize) -> Self {
        let mut y = self.clone();
        y.flip(i);
        y
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn complement(&self) -> Self {
        let mut y = self.clone();
        for w in y.words.iter_mut() {
            *w = !*w;
        }
        y.clear_tail();
        y
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &BitString) -> Self {
        let mut x = Self::zeros(self.len + other.len);
        for i in 0..self.len {
            if self.get(i) {
                x.set(i, true);
            }
        }
        for i in 0..other.len {
            if other.get(i) {
                x.set(self.len + i, true);
            }
        }
        x
    }

    /// Bits `[start, start + len)` as a new string.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        debug_assert!(start + len <= self.len);
        let mut x = Self::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                x.set(i, true);
            }
        }
        x
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl Ord for BitString {
    /// Lexicographic in bit order; shorter strings sort first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for i in 0..self.len {
                match (self.get(i), other.get(i)) {
                    (false, true) => return Ordering::Less,
                    (true, false) => return Ordering::Greater,
                    _ => {}
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = BitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(BitError::Empty);
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitError::InvalidChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bits(&bits))
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming(a: &BitString, b: &BitString) -> Result<usize, BitError> {
    if a.len != b.len {
        return Err(BitError::LengthMismatch {
            left: a.len,
            right: b.len,
        });
    }
    Ok(a.words
        .iter()
        .zip(b.words.iter())
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum())
}

/// Standard bit mutation: every bit flips independently with probability `p_m`.
///
/// Flip positions are drawn by geometric skipping, which has the same
/// distribution as one Bernoulli trial per bit but costs O(flips).
pub fn mutate(x: &BitString, p_m: f64, rng: &mut RngStream) -> Result<BitString, BitError> {
    if !(0.0..=1.0).contains(&p_m) || p_m.is_nan() {
        return Err(BitError::InvalidProbability(p_m));
    }
    if p_m == 0.0 {
        return Ok(x.clone());
    }
    if p_m == 1.0 {
        return Ok(x.complement());
    }
    let mut y = x.clone();
    let log_q = (1.0 - p_m).ln();
    let mut i = 0usize;
    loop {
        // u in (0, 1]
        let u: f64 = 1.0 - rng.gen::<f64>();
        let skip = (u.ln() / log_q).floor();
        if skip >= (y.len - i) as f64 {
            break;
        }
        i += skip as usize;
        y.flip(i);
        i += 1;
        if i >= y.len {
            break;
        }
    }
    Ok(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborOrder {
    Fixed,
    Shuffled,
}

/// The Hamming-1 neighborhood of `x`. Fixed order lists neighbors by
/// ascending flipped-bit index; shuffled order needs an rng.
pub fn neighbors(x: &BitString, order: NeighborOrder, rng: Option<&mut RngStream>) -> Vec<BitString> {
    let mut out: Vec<BitString> = (0..x.len).map(|i| x.flipped(i)).collect();
    if order == NeighborOrder::Shuffled {
        let rng = rng.expect("shuffled neighbor order requires an rng");
        out.shuffle(rng);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&bs("0000"), &bs("0000")).unwrap(), 0);
        assert_eq!(hamming(&bs("0101"), &bs("0011")).unwrap(), 2);
        for n in [1, 7, 64, 65, 130] {
            assert_eq!(hamming(&BitString::ones(n), &BitString::zeros(n)).unwrap(), n);
        }
        assert_eq!(
            hamming(&bs("01"), &bs("011")),
            Err(BitError::LengthMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn mutate_extremes() {
        let mut rng = RngStream::new(3);
        let x = bs("1100101");
        for _ in 0..20 {
            assert_eq!(mutate(&x, 0.0, &mut rng).unwrap(), x);
            assert_eq!(mutate(&x, 1.0, &mut rng).unwrap(), bs("0011010"));
        }
        assert!(mutate(&x, 1.5, &mut rng).is_err());
        assert!(mutate(&x, -0.1, &mut rng).is_err());
        assert!(mutate(&x, f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn mutate_mean_flip_count() {
        // Binomial(100, 1/100) has mean 1 and variance 0.99.
        let n = 100;
        let samples = 100_000;
        let mut rng = RngStream::new(11);
        let x = BitString::zeros(n);
        let total: usize = (0..samples)
            .map(|_| mutate(&x, 1.0 / n as f64, &mut rng).unwrap().count_ones())
            .sum();
        let mean = total as f64 / samples as f64;
        let se = (0.99f64 / samples as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn mutate_per_bit_frequency() {
        let n = 50;
        let samples = 100_000;
        let p = 1.0 / n as f64;
        let mut rng = RngStream::new(12);
        let x = BitString::zeros(n);
        let mut counts = vec![0usize; n];
        for _ in 0..samples {
            let y = mutate(&x, p, &mut rng).unwrap();
            for (i, c) in counts.iter_mut().enumerate() {
                *c += y.get(i) as usize;
            }
        }
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        for (i, c) in counts.iter().enumerate() {
            let freq = *c as f64 / samples as f64;
            assert!((freq - p).abs() < 3.0 * se, "bit {i}: {freq}");
        }
    }

    #[test]
    fn neighbor_examples() {
        assert_eq!(neighbors(&bs("00"), NeighborOrder::Fixed, None), vec![bs("10"), bs("01")]);
        let mut got = neighbors(&bs("101"), NeighborOrder::Fixed, None);
        got.sort();
        assert_eq!(got, vec![bs("001"), bs("100"), bs("111")]);

        let mut rng = RngStream::new(5);
        let x = BitString::random(70, &mut rng);
        let mut shuffled = neighbors(&x, NeighborOrder::Shuffled, Some(&mut rng));
        assert_eq!(shuffled.len(), 70);
        shuffled.sort();
        shuffled.dedup();
        assert_eq!(shuffled.len(), 70);
        assert!(shuffled.iter().all(|y| hamming(&x, y).unwrap() == 1));
    }

    #[test]
    fn index_round_trip_and_order() {
        let x = BitString::from_index(0b1011, 4).unwrap();
        assert_eq!(x.to_string(), "1011");
        assert_eq!(x.to_index().unwrap(), 11);
        assert!(bs("0111") < bs("1000"));
        assert!(BitString::from_index(0, 65).is_err());
    }

    #[test]
    fn triangle_inequality() {
        let mut rng = RngStream::new(99);
        for _ in 0..10_000 {
            let n = 1 + (rng.gen::<u32>() % 80) as usize;
            let a = BitString::random(n, &mut rng);
            let b = BitString::random(n, &mut rng);
            let c = BitString::random(n, &mut rng);
            let ab = hamming(&a, &b).unwrap();
            let bc = hamming(&b, &c).unwrap();
            let ac = hamming(&a, &c).unwrap();
            assert!(ac <= ab + bc);
            assert_eq!(ab, hamming(&b, &a).unwrap());
        }
    }

    proptest::proptest! {
        #[test]
        fn display_parse_round_trip(bits in proptest::collection::vec(proptest::bool::ANY, 1..150)) {
            let x = BitString::from_bits(&bits);
            let y: BitString = x.to_string().parse().unwrap();
            proptest::prop_assert_eq!(&x, &y);
            proptest::prop_assert_eq!(x.count_ones(), bits.iter().filter(|b| **b).count());
        }
    }
}
