//! Finite-budget estimators for the sliding pseudo-metrics.
//!
//! The sliding Hamming (Weyl) and sliding Levenshtein pseudo-metrics are
//! `limsup` over window lengths of a supremum over all offsets, which cannot
//! be evaluated on arbitrary configurations. Everything here works at an
//! explicit budget: a window length `ℓ` and a largest offset `K`. Reports
//! carry that budget and never claim the limit value.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::distances::{hamming, levenshtein, HalfInt};
use crate::scalar::{reduced, Scalar};
use crate::words::{Configuration, Letter};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseDistance {
    Hamming,
    Levenshtein,
}

impl BaseDistance {
    /// Distance between two equal-length windows.
    pub fn between(self, u: &[Letter], v: &[Letter]) -> HalfInt {
        match self {
            Self::Hamming => HalfInt::from_int(hamming(u, v).expect("windows have equal length") as u64),
            Self::Levenshtein => levenshtein(u, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimateError {
    #[error("window length must be at least 1")]
    ZeroWindow,
    #[error("window list is empty")]
    EmptyLadder,
    #[error("window lengths must be strictly increasing")]
    NotIncreasing,
    #[error("explicit offset list has {got} entries for {expected} windows")]
    OffsetCount { expected: usize, got: usize },
}

/// `max_{0≤k≤K} d(x_{[k,k+ℓ)}, y_{[k,k+ℓ)}) / ℓ` at one budget.
#[derive(Debug, Clone, PartialEq)]
pub struct SlidingEstimate<T> {
    pub base: BaseDistance,
    pub window: usize,
    pub max_offset: usize,
    /// Largest window distance found, before dividing by `window`.
    pub max_distance: HalfInt,
    /// Smallest offset attaining `max_distance`.
    pub argmax: usize,
    pub value: T,
}

impl<T> SlidingEstimate<T> {
    /// Reduced `(numerator, denominator)` of the value.
    pub fn num_den(&self) -> (u64, u64) {
        reduced(self.max_distance.doubled(), 2 * self.window as u64)
    }

    pub fn exact(&self) -> Rational {
        Rational::new(self.max_distance.doubled() as i64, 2 * self.window as i64)
    }
}

/// Sliding maximum over offsets `0..=max_offset` on two materialized prefixes
/// of length at least `max_offset + window`. Returns `(distance, argmax)`.
pub fn sliding_max(
    base: BaseDistance,
    x: &[Letter],
    y: &[Letter],
    window: usize,
    max_offset: usize,
) -> (HalfInt, usize) {
    let need = max_offset + window;
    assert!(x.len() >= need && y.len() >= need, "prefixes shorter than K + ℓ");
    match base {
        BaseDistance::Hamming => {
            let differs = |i: usize| usize::from(x[i] != y[i]);
            let mut current: usize = (0..window).map(differs).sum();
            let (mut best, mut argmax) = (current, 0);
            for k in 1..=max_offset {
                current = current + differs(k + window - 1) - differs(k - 1);
                if current > best {
                    best = current;
                    argmax = k;
                }
            }
            (HalfInt::from_int(best as u64), argmax)
        }
        BaseDistance::Levenshtein => (0..=max_offset)
            .into_par_iter()
            .map(|k| (levenshtein(&x[k..k + window], &y[k..k + window]), k))
            .reduce(
                || (HalfInt::ZERO, usize::MAX),
                |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
            ),
    }
}

/// Panics if `window == 0`.
pub fn sliding_estimate<T: Scalar>(
    base: BaseDistance,
    x: &dyn Configuration,
    y: &dyn Configuration,
    window: usize,
    max_offset: usize,
) -> SlidingEstimate<T> {
    assert!(window >= 1, "window length must be at least 1");
    let px = x.prefix(max_offset + window);
    let py = y.prefix(max_offset + window);
    let (max_distance, argmax) = sliding_max(base, &px, &py, window, max_offset);
    SlidingEstimate {
        base,
        window,
        max_offset,
        max_distance,
        argmax,
        value: T::from_ratio(max_distance.doubled(), 2 * window as u64),
    }
}

/// Prefix-anchored `d(x_{[0,ℓ)}, y_{[0,ℓ)}) / ℓ`, with no maximization over offsets.
pub fn besicovitch_estimate<T: Scalar>(
    base: BaseDistance,
    x: &dyn Configuration,
    y: &dyn Configuration,
    window: usize,
) -> SlidingEstimate<T> {
    assert!(window >= 1, "window length must be at least 1");
    let distance = base.between(&x.prefix(window), &y.prefix(window));
    SlidingEstimate {
        base,
        window,
        max_offset: 0,
        max_distance: distance,
        argmax: 0,
        value: T::from_ratio(distance.doubled(), 2 * window as u64),
    }
}

/// How the largest offset `K` is chosen for each window length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OffsetPolicy {
    /// `K = c·ℓ`.
    Proportional(usize),
    Fixed(usize),
    /// One `K` per window, in ladder order.
    Explicit(Vec<usize>),
}

impl Default for OffsetPolicy {
    fn default() -> Self {
        Self::Proportional(4)
    }
}

pub const TRUNCATION_NOTE: &str =
    "finite-budget estimates at (ell, K); the limsup over ell and the supremum over all offsets are not evaluated";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Trend {
    pub non_increasing: bool,
    pub strictly_decreasing: bool,
    pub final_num: u64,
    pub final_den: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderReport<T> {
    pub base: BaseDistance,
    pub entries: Vec<SlidingEstimate<T>>,
    pub trend: Trend,
    pub disclaimer: &'static str,
}

#[derive(Serialize)]
struct LadderRow {
    ell: usize,
    #[serde(rename = "K")]
    max_offset: usize,
    value_num: u64,
    value_den: u64,
}

#[derive(Serialize)]
struct LadderDocument<'a> {
    base: BaseDistance,
    entries: Vec<LadderRow>,
    trend: Trend,
    disclaimer: &'a str,
}

impl<T> LadderReport<T> {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("ell\tK\tvalue_num\tvalue_den\n");
        for e in &self.entries {
            let (num, den) = e.num_den();
            out.push_str(&format!("{}\t{}\t{}\t{}\n", e.window, e.max_offset, num, den));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = LadderDocument {
            base: self.base,
            entries: self
                .entries
                .iter()
                .map(|e| {
                    let (value_num, value_den) = e.num_den();
                    LadderRow {
                        ell: e.window,
                        max_offset: e.max_offset,
                        value_num,
                        value_den,
                    }
                })
                .collect(),
            trend: self.trend,
            disclaimer: self.disclaimer,
        };
        serde_json::to_string_pretty(&doc).expect("ladder serializes")
    }
}

/// One [`sliding_estimate`] per window length, with trend flags.
pub fn weyl_ladder<T: Scalar>(
    base: BaseDistance,
    x: &dyn Configuration,
    y: &dyn Configuration,
    windows: &[usize],
    policy: &OffsetPolicy,
) -> Result<LadderReport<T>, EstimateError> {
    if windows.is_empty() {
        return Err(EstimateError::EmptyLadder);
    }
    if windows[0] == 0 {
        return Err(EstimateError::ZeroWindow);
    }
    if windows.windows(2).any(|p| p[0] >= p[1]) {
        return Err(EstimateError::NotIncreasing);
    }
    if let OffsetPolicy::Explicit(ks) = policy {
        if ks.len() != windows.len() {
            return Err(EstimateError::OffsetCount {
                expected: windows.len(),
                got: ks.len(),
            });
        }
    }
    let entries: Vec<SlidingEstimate<T>> = windows
        .iter()
        .enumerate()
        .map(|(i, &ell)| {
            let k = match policy {
                OffsetPolicy::Proportional(c) => c * ell,
                OffsetPolicy::Fixed(k) => *k,
                OffsetPolicy::Explicit(ks) => ks[i],
            };
            sliding_estimate(base, x, y, ell, k)
        })
        .collect();
    let exact: Vec<Rational> = entries.iter().map(SlidingEstimate::exact).collect();
    let (final_num, final_den) = entries.last().expect("nonempty").num_den();
    let trend = Trend {
        non_increasing: exact.windows(2).all(|p| p[1] <= p[0]),
        strictly_decreasing: exact.windows(2).all(|p| p[1] < p[0]),
        final_num,
        final_den,
    };
    Ok(LadderReport {
        base,
        entries,
        trend,
        disclaimer: TRUNCATION_NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{Alphabet, ConfigGenerator};

    fn gen(text: &str) -> ConfigGenerator {
        ConfigGenerator::parse(text, &Alphabet::binary()).unwrap()
    }

    #[test]
    fn alternating_pair() {
        let (x, y) = (gen("periodic:ab"), gen("periodic:ba"));
        let h: SlidingEstimate<Rational> = sliding_estimate(BaseDistance::Hamming, &x, &y, 16, 64);
        assert_eq!(h.exact(), Rational::from_integer(1));
        let l: SlidingEstimate<Rational> = sliding_estimate(BaseDistance::Levenshtein, &x, &y, 16, 64);
        assert_eq!(l.value, Rational::new(1, 16));
        assert_eq!(l.num_den(), (1, 16));
        let f: SlidingEstimate<f64> = sliding_estimate(BaseDistance::Levenshtein, &x, &y, 16, 64);
        assert_eq!(f.value, 1.0 / 16.0);
    }

    #[test]
    fn identical_configurations_give_zero() {
        let x = gen("ramp:1,0,1,0");
        for base in [BaseDistance::Hamming, BaseDistance::Levenshtein] {
            let e: SlidingEstimate<Rational> = sliding_estimate(base, &x, &x, 10, 30);
            assert_eq!(e.value, Rational::from_integer(0));
            assert_eq!(e.argmax, 0);
        }
    }

    #[test]
    fn argmax_is_first_maximizing_offset() {
        let (x, y) = (gen("word:aaaaab!a"), gen("periodic:a"));
        let e: SlidingEstimate<Rational> = sliding_estimate(BaseDistance::Hamming, &x, &y, 3, 10);
        assert_eq!(e.max_distance, HalfInt::from_int(1));
        assert_eq!(e.argmax, 3);
        let e: SlidingEstimate<Rational> = sliding_estimate(BaseDistance::Levenshtein, &x, &y, 3, 10);
        assert_eq!(e.argmax, 3);
    }

    #[test]
    fn besicovitch_examples() {
        let b: SlidingEstimate<Rational> =
            besicovitch_estimate(BaseDistance::Hamming, &gen("periodic:ab"), &gen("periodic:ba"), 10);
        assert_eq!(b.value, Rational::from_integer(1));
        let b: SlidingEstimate<Rational> =
            besicovitch_estimate(BaseDistance::Hamming, &gen("evp:b|a"), &gen("periodic:a"), 100);
        assert_eq!(b.value, Rational::new(1, 100));
        let x = gen("periodic:abb");
        let b: SlidingEstimate<Rational> = besicovitch_estimate(BaseDistance::Levenshtein, &x, &x, 7);
        assert_eq!(b.value, Rational::from_integer(0));
    }

    #[test]
    fn ladder_finite_difference_decreases() {
        let (x, y) = (gen("word:abba!a"), gen("periodic:a"));
        let report: LadderReport<Rational> =
            weyl_ladder(BaseDistance::Hamming, &x, &y, &[4, 8, 16, 32], &OffsetPolicy::default()).unwrap();
        for e in &report.entries {
            assert!(e.exact() <= Rational::new(2, e.window as i64));
        }
        assert!(report.trend.strictly_decreasing);
        assert_eq!((report.trend.final_num, report.trend.final_den), (1, 16));
        assert_eq!(
            report.to_tsv(),
            "ell\tK\tvalue_num\tvalue_den\n4\t16\t1\t2\n8\t32\t1\t4\n16\t64\t1\t8\n32\t128\t1\t16\n"
        );
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["entries"][1]["K"], 32);
        assert_eq!(json["entries"][1]["value_den"], 4);
        assert_eq!(json["base"], "hamming");
    }

    #[test]
    fn ladder_equal_pair_is_all_zero() {
        let x = gen("periodic:aab");
        let report: LadderReport<Rational> =
            weyl_ladder(BaseDistance::Levenshtein, &x, &x, &[2, 5, 9], &OffsetPolicy::Fixed(7)).unwrap();
        assert!(report.entries.iter().all(|e| e.max_distance == HalfInt::ZERO));
        assert!(report.trend.non_increasing);
        assert!(!report.trend.strictly_decreasing);
    }

    #[test]
    fn ladder_validation() {
        let x = gen("periodic:a");
        let run =
            |ws: &[usize], p: OffsetPolicy| weyl_ladder::<Rational>(BaseDistance::Hamming, &x, &x, ws, &p).map(|_| ());
        assert_eq!(run(&[], OffsetPolicy::default()), Err(EstimateError::EmptyLadder));
        assert_eq!(run(&[4, 4], OffsetPolicy::default()), Err(EstimateError::NotIncreasing));
        assert_eq!(run(&[0, 4], OffsetPolicy::default()), Err(EstimateError::ZeroWindow));
        assert_eq!(
            run(&[1, 4], OffsetPolicy::Explicit(vec![3])),
            Err(EstimateError::OffsetCount { expected: 2, got: 1 })
        );
        assert!(run(&[1, 4], OffsetPolicy::Explicit(vec![3, 0])).is_ok());
    }

    #[test]
    fn parallel_levenshtein_matches_sequential_scan() {
        let x = gen("ramp:1,0,1,0").prefix(300);
        let y = gen("ramp:1,1,1,-1").prefix(300);
        let mut best = (HalfInt::ZERO, 0);
        for k in 0..=200 {
            let d = levenshtein(&x[k..k + 40], &y[k..k + 40]);
            if d > best.0 {
                best = (d, k);
            }
        }
        assert_eq!(sliding_max(BaseDistance::Levenshtein, &x, &y, 40, 200), best);
    }
}
