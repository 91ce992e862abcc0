//! Points of the hypercube `{0,1}^d` stored as packed 64-bit words, plus
//! Hamming-ball and Hamming-sphere enumeration.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// A fixed-length bit vector. Bit `i` is coordinate `i`; coordinate 0 is the
/// first character in the textual form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryPoint {
    dim: usize,
    words: Vec<u64>,
}

impl BinaryPoint {
    pub fn zeros(dim: usize) -> Self {
        BinaryPoint {
            dim,
            words: vec![0; dim.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut p = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                p.set(i, true);
            }
        }
        p
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..dim.div_ceil(64)).map(|_| rng.random()).collect();
        mask_tail(&mut words, dim);
        BinaryPoint { dim, words }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.dim);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.dim);
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.dim);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.dim).map(|i| self.get(i)).collect()
    }

    /// First `len` coordinates as a bool slice.
    pub fn prefix_bits(&self, len: usize) -> Vec<bool> {
        debug_assert!(len <= self.dim);
        (0..len).map(|i| self.get(i)).collect()
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of set bits with coordinate in `[lo, hi)`.
    pub fn weight_in_range(&self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi && hi <= self.dim);
        if lo == hi {
            return 0;
        }
        let (wl, wh) = (lo / 64, (hi - 1) / 64);
        let lo_mask = !0u64 << (lo % 64);
        let hi_mask = if hi.is_multiple_of(64) { !0u64 } else { !0u64 >> (64 - hi % 64) };
        if wl == wh {
            (self.words[wl] & lo_mask & hi_mask).count_ones() as usize
        } else {
            let mut total = (self.words[wl] & lo_mask).count_ones() as usize;
            for w in &self.words[wl + 1..wh] {
                total += w.count_ones() as usize;
            }
            total + (self.words[wh] & hi_mask).count_ones() as usize
        }
    }

    pub fn distance(&self, other: &Self) -> usize {
        assert_eq!(self.dim, other.dim, "Hamming distance needs equal dimensions");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        BinaryPoint {
            dim: self.dim,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// Coordinate-wise lexicographic order: the first differing coordinate
    /// decides, 0 before 1.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let bit = diff.trailing_zeros();
                return if a >> bit & 1 == 0 { Ordering::Less } else { Ordering::Greater };
            }
        }
        Ordering::Equal
    }
}

fn mask_tail(words: &mut [u64], dim: usize) {
    if !dim.is_multiple_of(64) {
        if let Some(last) = words.last_mut() {
            *last &= !0u64 >> (64 - dim % 64);
        }
    }
}

impl PartialOrd for BinaryPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BinaryPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_cmp(other)
    }
}

impl fmt::Display for BinaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryPoint({self})")
    }
}

impl std::str::FromStr for BinaryPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = BinaryPoint::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => p.set(i, true),
                _ => return Err(Error::Parse(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(p)
    }
}

/// Iterator over all size-`k` index subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    indices: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            indices: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.indices.clone();
        let k = self.indices.len();
        if k == 0 {
            self.done = true;
            return Some(current);
        }
        // Advance the rightmost index that still has room.
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.indices[i] < self.n - (k - i) {
                self.indices[i] += 1;
                for j in i + 1..k {
                    self.indices[j] = self.indices[j - 1] + 1;
                }
                break;
            }
        }
        Some(current)
    }
}

pub(crate) fn index_subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    Combinations::new(n, k)
}

/// All points at Hamming distance exactly `radius` from `center`, in
/// lexicographic flip-index order.
pub fn hamming_sphere(center: &BinaryPoint, radius: usize) -> Result<impl Iterator<Item = BinaryPoint>> {
    let d = center.dim();
    if radius > d {
        return Err(Error::RadiusOutOfRange { radius, d });
    }
    let center = center.clone();
    Ok(Combinations::new(d, radius).map(move |flips| {
        let mut p = center.clone();
        for i in flips {
            p.flip(i);
        }
        p
    }))
}

/// All points at Hamming distance at most `radius` from `center`, in
/// increasing distance and then lexicographic flip-index order.
pub fn hamming_ball(center: &BinaryPoint, radius: usize) -> Result<impl Iterator<Item = BinaryPoint>> {
    let d = center.dim();
    if radius > d {
        return Err(Error::RadiusOutOfRange { radius, d });
    }
    let center = center.clone();
    Ok((0..=radius).flat_map(move |r| {
        let center = center.clone();
        Combinations::new(d, r).map(move |flips| {
            let mut p = center.clone();
            for i in flips {
                p.flip(i);
            }
            p
        })
    }))
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}
