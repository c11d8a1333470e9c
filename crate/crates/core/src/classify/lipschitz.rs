//! Numerical checks of the Lipschitz bounds on the two sliding spaces, and of
//! the two combinatorial lemmas behind them.

use rayon::prelude::*;
use serde::Serialize;

use super::{decide_diamond_uniform, delta_norms, length_defect_bound, ClassifyError, DiamondUniformity, Space};
use crate::dillmaps::RuleTable;
use crate::distances::{hamming, levenshtein};
use crate::pseudometrics::{sliding_estimate, BaseDistance, OffsetPolicy, SlidingEstimate};
use crate::words::{ConfigGenerator, Configuration, Word};
use crate::Rational;

/// Lipschitz constant of `F` on `space`.
///
/// Sliding Hamming: `δ·maxd / minf`, uniform rules only.
/// Sliding Levenshtein: `(2δ−1)·maxf / minf`, diamond-uniform rules only.
pub fn lipschitz_constant(f: &RuleTable, space: Space) -> Result<Rational, ClassifyError> {
    let n = f.norms();
    let delta = f.diameter() as i64;
    match space {
        Space::WeylH => {
            let d = delta_norms(f)?;
            Ok(Rational::new(delta * d.maxd as i64, n.minf as i64))
        }
        Space::WeylL => match decide_diamond_uniform(f) {
            DiamondUniformity::DiamondUniform { .. } => {
                Ok(Rational::new((2 * delta - 1) * n.maxf as i64, n.minf as i64))
            }
            DiamondUniformity::NotDiamondUniform { .. } => Err(ClassifyError::NotDiamondUniform),
        },
    }
}

/// Window and offset range on the input side matching an image window `ℓ`
/// and offset range `K`: `(⌊ℓ/minf⌋ + δ − 1, ⌈K/minf⌉)`.
pub fn input_budget(f: &RuleTable, window: usize, max_offset: usize) -> (usize, usize) {
    let minf = f.norms().minf;
    (window / minf + f.diameter() - 1, max_offset.div_ceil(minf))
}

/// Additive term, times `ℓ`, accounting for boundary effects at finite windows.
pub fn slack_numerator(f: &RuleTable, space: Space) -> Result<i64, ClassifyError> {
    let n = f.norms();
    let delta = f.diameter() as i64;
    match space {
        Space::WeylH => {
            let d = delta_norms(f)?;
            Ok(delta * delta * d.maxd as i64 + 2 * n.minf as i64)
        }
        Space::WeylL => {
            let c = length_defect_bound(f)? as i64;
            Ok(n.maxf as i64 * (2 * delta * delta - delta + 2) + 2 * c)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzRow {
    pub pair: usize,
    pub window: usize,
    pub image: SlidingEstimate<Rational>,
    pub input: Option<SlidingEstimate<Rational>>,
    /// `L·input + slack/ℓ`.
    pub bound: Rational,
}

impl LipschitzRow {
    pub fn margin(&self) -> Rational {
        self.bound - self.image.value
    }

    pub fn holds(&self) -> bool {
        self.image.value <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport {
    pub space: Space,
    pub constant: Rational,
    pub slack_numerator: i64,
    pub rows: Vec<LipschitzRow>,
}

impl LipschitzReport {
    pub fn violations(&self) -> impl Iterator<Item = &LipschitzRow> {
        self.rows.iter().filter(|r| !r.holds())
    }

    pub fn all_hold(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn tightest(&self) -> Option<&LipschitzRow> {
        self.rows.iter().min_by_key(|r| r.margin())
    }
}

/// Checks `image ≤ L·input + slack/ℓ` for every pair and window, where the
/// image estimate uses `(ℓ, K)` and the input estimate uses [`input_budget`].
pub fn lipschitz_check(
    f: &RuleTable,
    pairs: &[(ConfigGenerator, ConfigGenerator)],
    windows: &[usize],
    offsets: &OffsetPolicy,
    space: Space,
) -> Result<LipschitzReport, ClassifyError> {
    let constant = lipschitz_constant(f, space)?;
    let slack = slack_numerator(f, space)?;
    let base = match space {
        Space::WeylH => BaseDistance::Hamming,
        Space::WeylL => BaseDistance::Levenshtein,
    };
    let jobs: Vec<(usize, usize, usize)> = pairs
        .iter()
        .enumerate()
        .flat_map(|(p, _)| windows.iter().enumerate().map(move |(i, &w)| (p, i, w)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(p, i, window)| {
            let (x, y) = &pairs[p];
            let k = match offsets {
                OffsetPolicy::Proportional(c) => c * window,
                OffsetPolicy::Fixed(k) => *k,
                OffsetPolicy::Explicit(ks) => ks[i],
            };
            let image = sliding_estimate::<Rational>(base, &f.apply(x), &f.apply(y), window, k);
            let (in_window, in_offsets) = input_budget(f, window, k);
            let input = (in_window > 0).then(|| sliding_estimate::<Rational>(base, x, y, in_window, in_offsets));
            let input_value = input.as_ref().map_or(Rational::from_integer(0), |e| e.value);
            let bound = constant * input_value + Rational::new(slack, window as i64);
            LipschitzRow {
                pair: p,
                window,
                image,
                input,
                bound,
            }
        })
        .collect();
    Ok(LipschitzReport {
        space,
        constant,
        slack_numerator: slack,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaLevCase {
    pub u: Word,
    pub v: Word,
    /// Twice `d_L(f*u, f*v)`.
    pub lhs_doubled: i64,
    /// `2·maxf·(2δ−1)·d_L(u,v) − ||f*u| − |f*v||`.
    pub rhs_doubled: i64,
}

impl LemmaLevCase {
    pub fn margin_doubled(&self) -> i64 {
        self.rhs_doubled - self.lhs_doubled
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaLevReport {
    pub max_len: usize,
    pub pairs_checked: u64,
    pub violations: Vec<LemmaLevCase>,
    /// Smallest margin over pairs with `u ≠ v`.
    pub tightest: Option<LemmaLevCase>,
}

/// Exhaustive check of `d_L(f*u, f*v) ≤ maxf(2δ−1)·d_L(u,v) − ||f*u|−|f*v||/2`
/// over all pairs of equal-length words of length at most `max_len`.
pub fn lemma_lev_check(f: &RuleTable, max_len: usize) -> LemmaLevReport {
    let factor = (f.norms().maxf * (2 * f.diameter() - 1)) as i64;
    let case = |u: &Word, v: &Word| {
        let (fu, fv) = (f.star(u), f.star(v));
        LemmaLevCase {
            u: u.clone(),
            v: v.clone(),
            lhs_doubled: levenshtein(&fu, &fv).doubled() as i64,
            rhs_doubled: factor * levenshtein(u, v).doubled() as i64 - (fu.len() as i64 - fv.len() as i64).abs(),
        }
    };
    let mut report = LemmaLevReport {
        max_len,
        pairs_checked: 0,
        violations: Vec::new(),
        tightest: None,
    };
    for len in 0..=max_len {
        let words: Vec<Word> = f.alphabet().words_of_length(len).collect();
        let (count, violations, tightest) = words
            .par_iter()
            .enumerate()
            .map(|(i, u)| {
                let mut violations = Vec::new();
                let mut tightest: Option<LemmaLevCase> = None;
                for v in &words[i..] {
                    let c = case(u, v);
                    if c.margin_doubled() < 0 {
                        violations.push(c.clone());
                    }
                    if c.u != c.v
                        && tightest
                            .as_ref()
                            .is_none_or(|t| c.margin_doubled() < t.margin_doubled())
                    {
                        tightest = Some(c);
                    }
                }
                ((words.len() - i) as u64, violations, tightest)
            })
            .reduce(
                || (0, Vec::new(), None),
                |mut a, b| {
                    a.0 += b.0;
                    a.1.extend(b.1);
                    a.2 = tighter(a.2, b.2);
                    a
                },
            );
        report.pairs_checked += count;
        report.violations.extend(violations);
        report.tightest = tighter(report.tightest.take(), tightest);
    }
    report
}

fn tighter(a: Option<LemmaLevCase>, b: Option<LemmaLevCase>) -> Option<LemmaLevCase> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.margin_doubled() < a.margin_doubled() { b } else { a }),
        (a, b) => a.or(b),
    }
}

/// One `(k, ℓ)` case of the uniform-rule window lemma.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaLipCase {
    pub pair: usize,
    pub offset: usize,
    pub window: usize,
    /// `d_H(F(x)_{[k,k+ℓ)}, F(y)_{[k,k+ℓ)})`.
    pub lhs: usize,
    /// `δ·maxd·d_H(x_{[m,m+p+δ)}, y_{[m,m+p+δ)}) + 2·minf`.
    pub lemma_rhs: usize,
    /// `δ·maxd·d_H(x_{[m,m+p)}, y_{[m,m+p)}) + δ²·maxd + 2·minf`.
    pub proposition_rhs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaLipReport {
    pub cases: u64,
    pub lemma_violations: Vec<LemmaLipCase>,
    pub proposition_violations: Vec<LemmaLipCase>,
    /// Smallest `lemma_rhs − lhs` seen.
    pub tightest_lemma_margin: Option<i64>,
    pub tightest_proposition_margin: Option<i64>,
}

/// Checks the window lemma for uniform rules at every listed `(k, ℓ)`, with
/// `m = ⌈k/minf⌉` and `p = ⌊(ℓ+k)/minf⌋ − (m+1)`.
pub fn lemma_lip_h_check(
    f: &RuleTable,
    pairs: &[(ConfigGenerator, ConfigGenerator)],
    windows: &[usize],
    offsets: &[usize],
) -> Result<LemmaLipReport, ClassifyError> {
    let d = delta_norms(f)?;
    let minf = f.norms().minf;
    let delta = f.diameter();
    let max_window = windows.iter().copied().max().unwrap_or(0);
    let max_offset = offsets.iter().copied().max().unwrap_or(0);
    let image_len = max_window + max_offset;
    let input_len = (image_len / minf) + delta + 1;
    let mut report = LemmaLipReport {
        cases: 0,
        lemma_violations: Vec::new(),
        proposition_violations: Vec::new(),
        tightest_lemma_margin: None,
        tightest_proposition_margin: None,
    };
    for (p_idx, (x, y)) in pairs.iter().enumerate() {
        let (xs, ys) = (x.prefix(input_len), y.prefix(input_len));
        let (fx, fy) = (f.image_prefix(x, image_len), f.image_prefix(y, image_len));
        let dh = |from: usize, to: usize| {
            if to <= from {
                0
            } else {
                hamming(&xs[from..to], &ys[from..to]).expect("equal lengths")
            }
        };
        for &k in offsets {
            for &ell in windows {
                let lhs = hamming(&fx[k..k + ell], &fy[k..k + ell]).expect("equal lengths");
                let m = k.div_ceil(minf) as i64;
                let p = ((ell + k) / minf) as i64 - (m + 1);
                let m = m as usize;
                let lemma_end = (m as i64 + p + delta as i64).max(m as i64) as usize;
                let prop_end = (m as i64 + p).max(m as i64) as usize;
                let case = LemmaLipCase {
                    pair: p_idx,
                    offset: k,
                    window: ell,
                    lhs,
                    lemma_rhs: delta * d.maxd * dh(m, lemma_end) + 2 * minf,
                    proposition_rhs: delta * d.maxd * dh(m, prop_end) + delta * delta * d.maxd + 2 * minf,
                };
                report.cases += 1;
                let lm = case.lemma_rhs as i64 - lhs as i64;
                let pm = case.proposition_rhs as i64 - lhs as i64;
                report.tightest_lemma_margin = Some(report.tightest_lemma_margin.map_or(lm, |t| t.min(lm)));
                report.tightest_proposition_margin = Some(report.tightest_proposition_margin.map_or(pm, |t| t.min(pm)));
                if lm < 0 {
                    report.lemma_violations.push(case.clone());
                }
                if pm < 0 {
                    report.proposition_violations.push(case);
                }
            }
        }
    }
    Ok(report)
}
