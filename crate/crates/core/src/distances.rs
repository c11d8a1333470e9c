//! Edit distances on finite words.
//!
//! The Levenshtein variant here only deletes letters: `d_L(u, v)` is half the
//! smallest total number of deletions from `u` and `v` that leaves equal words.
//! It is computed as `(|u| + |v|) / 2 - lcs(u, v)`;
//! [`levenshtein_oracle`] evaluates the deletion definition literally.

use std::collections::HashMap;
use std::fmt;
use std::ops::Add;

use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::words::{Configuration, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistanceError {
    #[error("Hamming distance needs equal lengths, got {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("deletion oracle limited to |u|+|v| <= {bound}, got {total}")]
    OracleBound { bound: usize, total: usize },
}

/// Largest `|u| + |v|` accepted by [`levenshtein_oracle`].
pub const ORACLE_BOUND: usize = 16;

/// Exact value `doubled / 2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt {
    doubled: u64,
}

impl HalfInt {
    pub const ZERO: Self = Self { doubled: 0 };

    pub fn from_doubled(doubled: u64) -> Self {
        Self { doubled }
    }

    pub fn from_int(n: u64) -> Self {
        Self { doubled: 2 * n }
    }

    pub fn doubled(self) -> u64 {
        self.doubled
    }

    pub fn is_integer(self) -> bool {
        self.doubled.is_multiple_of(2)
    }

    pub fn to_ratio(self) -> Ratio<i64> {
        Ratio::new(self.doubled as i64, 2)
    }
}

impl Add for HalfInt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            doubled: self.doubled + rhs.doubled,
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn hamming(u: &[Letter], v: &[Letter]) -> Result<usize, DistanceError> {
    if u.len() != v.len() {
        return Err(DistanceError::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(u.iter().zip(v).filter(|(a, b)| a != b).count())
}

/// Length of a longest common subsequence, in `O(|u|·|v|)` time and
/// `O(min(|u|, |v|))` space.
pub fn lcs_length(u: &[Letter], v: &[Letter]) -> usize {
    let (long, short) = if u.len() >= v.len() { (u, v) } else { (v, u) };
    if short.is_empty() {
        return 0;
    }
    let mut row = vec![0usize; short.len() + 1];
    for &a in long {
        // row[j] holds the previous row's value until overwritten
        let mut diag = 0;
        for (j, &b) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if a == b { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()]
}

pub fn levenshtein(u: &[Letter], v: &[Letter]) -> HalfInt {
    let common = lcs_length(u, v);
    HalfInt::from_doubled((u.len() + v.len() - 2 * common) as u64)
}

/// Literal deletion search: minimizes `m + m'` over all deletion sets of both
/// words. Exponential; test oracle only.
pub fn levenshtein_oracle(u: &[Letter], v: &[Letter]) -> Result<HalfInt, DistanceError> {
    let total = u.len() + v.len();
    if total > ORACLE_BOUND {
        return Err(DistanceError::OracleBound {
            bound: ORACLE_BOUND,
            total,
        });
    }
    // survivor word -> fewest deletions from u producing it
    let mut from_u: HashMap<Vec<Letter>, usize> = HashMap::new();
    for (kept, deleted) in deletion_images(u) {
        let slot = from_u.entry(kept).or_insert(deleted);
        *slot = (*slot).min(deleted);
    }
    let best = deletion_images(v)
        .filter_map(|(kept, deleted)| from_u.get(&kept).map(|m| m + deleted))
        .min()
        .expect("deleting everything always matches");
    Ok(HalfInt::from_doubled(best as u64))
}

/// Every way of deleting a set of positions: `(remaining word, deletions)`.
fn deletion_images(u: &[Letter]) -> impl Iterator<Item = (Vec<Letter>, usize)> + '_ {
    (0u32..1 << u.len()).map(move |deleted_mask| {
        let kept = u
            .iter()
            .enumerate()
            .filter(|(j, _)| deleted_mask & (1 << j) == 0)
            .map(|(_, &l)| l)
            .collect();
        (kept, deleted_mask.count_ones() as usize)
    })
}

/// Cantor distance observed on a finite prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CantorDistance {
    /// `2^{-index}`, `index` being the first disagreement.
    Differ { index: usize },
    /// The prefixes of length `budget` agree; says nothing beyond them.
    ZeroAtBudget { budget: usize },
}

impl CantorDistance {
    /// The value as a rational, when the exponent fits.
    pub fn value(&self) -> Option<Ratio<u128>> {
        match *self {
            Self::Differ { index } if index < 128 => Some(Ratio::new(1, 1u128 << index)),
            Self::Differ { .. } => None,
            Self::ZeroAtBudget { .. } => Some(Ratio::new(0, 1)),
        }
    }
}

impl fmt::Display for CantorDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Differ { index: 0 } => write!(f, "1"),
            Self::Differ { index } if index < 128 => write!(f, "1/{}", 1u128 << index),
            Self::Differ { index } => write!(f, "2^-{index}"),
            Self::ZeroAtBudget { budget } => write!(f, "zero-at-budget({budget})"),
        }
    }
}

pub fn cantor(x: &dyn Configuration, y: &dyn Configuration, budget: usize) -> CantorDistance {
    let (px, py) = (x.prefix(budget), y.prefix(budget));
    match px.iter().zip(py.iter()).position(|(a, b)| a != b) {
        Some(index) => CantorDistance::Differ { index },
        None => CantorDistance::ZeroAtBudget { budget },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{Alphabet, ConfigGenerator};

    fn w(text: &str) -> Vec<Letter> {
        Alphabet::binary().parse_word(text).unwrap().into_letters()
    }

    fn d(text: &str) -> Vec<Letter> {
        Alphabet::new("01").unwrap().parse_word(text).unwrap().into_letters()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&w("ab"), &w("ba")), Ok(2));
        assert_eq!(hamming(&w("abba"), &w("abba")), Ok(0));
        assert_eq!(hamming(&d("00000000"), &d("11111111")), Ok(8));
        assert_eq!(
            hamming(&w("ab"), &w("a")),
            Err(DistanceError::LengthMismatch { left: 2, right: 1 })
        );
    }

    #[test]
    fn lcs_examples() {
        assert_eq!(lcs_length(&w("abba"), &w("baab")), 2);
        assert_eq!(lcs_length(&w("abab"), &w("abab")), 4);
        assert_eq!(lcs_length(&w("abab"), &[]), 0);
        assert_eq!(lcs_length(&w("aab"), &w("abaab")), 3);
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein(&d("000"), &d("111")), HalfInt::from_int(3));
        assert_eq!(levenshtein(&w("ab"), &w("a")), HalfInt::from_doubled(1));
        assert_eq!(levenshtein(&w("abba"), &w("abba")), HalfInt::ZERO);
        assert_eq!(levenshtein(&w("abba"), &w("baab")), HalfInt::from_int(2));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(levenshtein_oracle(&w("abba"), &w("baab")), Ok(HalfInt::from_int(2)));
        assert_eq!(levenshtein_oracle(&[], &[]), Ok(HalfInt::ZERO));
        assert_eq!(levenshtein_oracle(&w("ab"), &w("a")), Ok(HalfInt::from_doubled(1)));
        let long = vec![0; 9];
        assert_eq!(
            levenshtein_oracle(&long, &long),
            Err(DistanceError::OracleBound { bound: 16, total: 18 })
        );
    }

    #[test]
    fn half_int_text() {
        assert_eq!(HalfInt::from_doubled(1).to_string(), "1/2");
        assert_eq!(HalfInt::from_doubled(7).to_string(), "7/2");
        assert_eq!(HalfInt::from_int(3).to_string(), "3");
        assert_eq!(HalfInt::from_doubled(3).to_ratio(), Ratio::new(3, 2));
    }

    #[test]
    fn cantor_examples() {
        let a = Alphabet::binary();
        let x = ConfigGenerator::periodic(a.parse_word("a").unwrap()).unwrap();
        let y = ConfigGenerator::eventually_periodic(a.parse_word("b").unwrap(), a.parse_word("a").unwrap()).unwrap();
        assert_eq!(cantor(&x, &y, 8), CantorDistance::Differ { index: 0 });
        assert_eq!(cantor(&x, &y, 8).to_string(), "1");
        assert_eq!(cantor(&x, &x, 8), CantorDistance::ZeroAtBudget { budget: 8 });
        let ab = ConfigGenerator::periodic(a.parse_word("ab").unwrap()).unwrap();
        let aa = ConfigGenerator::periodic(a.parse_word("aa").unwrap()).unwrap();
        let dist = cantor(&ab, &aa, 8);
        assert_eq!(dist.value(), Some(Ratio::new(1, 2)));
        assert_eq!(dist.to_string(), "1/2");
    }
}
