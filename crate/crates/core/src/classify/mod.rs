//! Decision procedures behind the well-definedness characterizations.
//!
//! * On the sliding Hamming space a dill map is well-defined iff it is uniform
//!   or constant. Both are decided exactly; failures come with a pair of
//!   configurations at pseudo-distance zero whose images stay apart.
//! * On the sliding Levenshtein space it is well-defined iff it is
//!   diamond-uniform or constant up to the pseudo-metric. Diamond-uniformity
//!   is decided exactly through cycle means of the de Bruijn graph; the second
//!   condition only gets a sampling semi-test.

pub mod graph;
pub mod lipschitz;
pub mod report;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::dillmaps::RuleTable;
use crate::distances::hamming;
use crate::pseudometrics::{weyl_ladder, BaseDistance, LadderReport, OffsetPolicy, SlidingEstimate};
use crate::words::{ConfigGenerator, Configuration, Letter, Word};
use crate::Rational;

pub use graph::{Cycle, DeBruijnGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("rule is not uniform (norms {minf} and {maxf})")]
    NotUniform { minf: usize, maxf: usize },
    #[error("rule is not diamond-uniform")]
    NotDiamondUniform,
    #[error("cycles have the same mean {0}; no witness exists")]
    EqualMeans(Rational),
    #[error("witness has zero length defect")]
    ZeroDefect,
    #[error("witness does not satisfy its invariants for this rule")]
    InvalidWitness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeltaNorms {
    pub mind: usize,
    pub maxd: usize,
}

/// Extreme Hamming distances between images, for uniform rules.
///
/// With a single window there is no pair of distinct windows; `mind` is then
/// reported as 0.
pub fn delta_norms(f: &RuleTable) -> Result<DeltaNorms, ClassifyError> {
    let norms = f.norms();
    if !norms.uniform {
        return Err(ClassifyError::NotUniform {
            minf: norms.minf,
            maxf: norms.maxf,
        });
    }
    let images = f.images();
    let mut mind = usize::MAX;
    let mut maxd = 0;
    for (i, a) in images.iter().enumerate() {
        for (j, b) in images.iter().enumerate() {
            let d = hamming(a, b).expect("uniform images have equal length");
            maxd = maxd.max(d);
            if i != j {
                mind = mind.min(d);
            }
        }
    }
    Ok(DeltaNorms {
        mind: if mind == usize::MAX { 0 } else { mind },
        maxd,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constancy {
    /// Every image equals `period^∞`.
    Constant { period: Word },
    /// `F(x)` and `F(y)` differ at `position`.
    NotConstant {
        x: ConfigGenerator,
        y: ConfigGenerator,
        position: usize,
    },
}

/// Decides whether `F` maps every configuration to the same point.
///
/// The only candidate is `F(a^∞) = f(a^δ)^∞` for the first letter `a`. A
/// breadth-first search over (de Bruijn node, phase in the candidate period)
/// checks every edge image against the candidate; a mismatch yields an
/// explicit configuration whose image departs from it.
pub fn decide_constant(f: &RuleTable) -> Constancy {
    let g = DeBruijnGraph::from_rule(f);
    let first: Letter = 0;
    let period = f.image(&vec![first; f.diameter()]).clone();
    let p = period.len();
    let nodes = g.node_count();
    let state = |node: usize, phase: usize| node * p + phase;
    // parent[s] = (previous state, edge) for non-start states
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nodes * p];
    let mut seen = vec![false; nodes * p];
    let mut queue = std::collections::VecDeque::new();
    for node in 0..nodes {
        seen[state(node, 0)] = true;
        queue.push_back((node, 0usize));
    }
    while let Some((node, phase)) = queue.pop_front() {
        for e in g.out_edges(node) {
            let image = &f.images()[e];
            if let Some(i) = (0..image.len()).find(|&i| image[i] != period[(phase + i) % p]) {
                let mut edges = vec![e];
                let mut at = state(node, phase);
                while let Some((prev, edge)) = parent[at] {
                    edges.push(edge);
                    at = prev;
                }
                edges.reverse();
                let start = at / p;
                let word = g.path_word(start, &edges);
                let position = g.path_weight(&edges[..edges.len() - 1]) as usize + i;
                return Constancy::NotConstant {
                    x: ConfigGenerator::explicit(word, first),
                    y: ConfigGenerator::Periodic(Word::new(vec![first])),
                    position,
                };
            }
            let next = (g.target(e), (phase + image.len()) % p);
            let s = state(next.0, next.1);
            if !seen[s] {
                seen[s] = true;
                parent[s] = Some((state(node, phase), e));
                queue.push_back(next);
            }
        }
    }
    Constancy::Constant { period }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiamondUniformity {
    /// All cycle means equal `mean`.
    DiamondUniform { mean: Rational },
    NotDiamondUniform {
        min_mean: Rational,
        min_cycle: Cycle,
        max_mean: Rational,
        max_cycle: Cycle,
    },
}

/// Equal-length words sharing their first and last δ−1 letters have
/// equal-length images iff every de Bruijn cycle has the same mean weight.
pub fn decide_diamond_uniform(f: &RuleTable) -> DiamondUniformity {
    let g = DeBruijnGraph::from_rule(f);
    let (min_mean, min_cycle) = g.min_mean_cycle();
    let (max_mean, max_cycle) = g.max_mean_cycle();
    if min_mean == max_mean {
        DiamondUniformity::DiamondUniform { mean: min_mean }
    } else {
        DiamondUniformity::NotDiamondUniform {
            min_mean,
            min_cycle,
            max_mean,
            max_cycle,
        }
    }
}

/// `sup | |f*(u)| − |f*(v)| |` over equal-length words, for diamond-uniform rules.
pub fn length_defect_bound(f: &RuleTable) -> Result<u64, ClassifyError> {
    let DiamondUniformity::DiamondUniform { mean } = decide_diamond_uniform(f) else {
        return Err(ClassifyError::NotDiamondUniform);
    };
    let g = DeBruijnGraph::from_rule(f);
    let phi = g.potential(mean).ok_or(ClassifyError::NotDiamondUniform)?;
    let spread = phi.iter().max().unwrap() - phi.iter().min().unwrap();
    // path weight = len·mean + (φ(end) − φ(start)) / den
    Ok(Rational::new(2 * spread, *mean.denom()).ceil().to_integer() as u64)
}

/// Equal-length words agreeing on their first and last `overlap` letters
/// whose images have different lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub u: Word,
    pub v: Word,
    /// `|f*(u)| − |f*(v)|`.
    pub alpha: i64,
    pub overlap: usize,
}

impl Witness {
    /// Re-evaluates `f*` and checks every invariant.
    pub fn verify(&self, f: &RuleTable) -> bool {
        let o = self.overlap;
        self.u.len() == self.v.len()
            && self.u.len() >= o
            && self.u[..o] == self.v[..o]
            && self.u[self.u.len() - o..] == self.v[self.v.len() - o..]
            && self.alpha != 0
            && f.star_len(&self.u) as i64 - f.star_len(&self.v) as i64 == self.alpha
    }

    /// Same witness with `u` and `v` exchanged if needed so that `alpha > 0`.
    pub fn oriented(&self) -> Self {
        if self.alpha >= 0 {
            self.clone()
        } else {
            Self {
                u: self.v.clone(),
                v: self.u.clone(),
                alpha: -self.alpha,
                overlap: self.overlap,
            }
        }
    }
}

/// Builds a witness from two cycles with different means.
///
/// With `p` a shortest path from the base of `c1` to the base of `c2`, `u`
/// spells `c1^{|c2|}·p` and `v` spells `p·c2^{|c1|}`: same length, same start
/// and end node, and `α = |c1|·|c2|·(mean(c1) − mean(c2))`.
pub fn witness_pair(f: &RuleTable, c1: &Cycle, c2: &Cycle) -> Result<Witness, ClassifyError> {
    if c1.mean() == c2.mean() {
        return Err(ClassifyError::EqualMeans(c1.mean()));
    }
    let g = DeBruijnGraph::from_rule(f);
    let link = g.shortest_path(c1.base, c2.base);
    let mut path_u: Vec<usize> = c1.edges.repeat(c2.len());
    path_u.extend_from_slice(&link);
    let mut path_v = link.clone();
    path_v.extend(c2.edges.repeat(c1.len()));
    let u = g.path_word(c1.base, &path_u);
    let v = g.path_word(c1.base, &path_v);
    let alpha = g.path_weight(&path_u) as i64 - g.path_weight(&path_v) as i64;
    Ok(Witness {
        u,
        v,
        alpha,
        overlap: f.diameter() - 1,
    })
}

/// `block·x_{[0,α)}·y_{[0,α)}·block·x_{[0,2α)}·y_{[0,2α)}·…`
#[derive(Debug, Clone)]
pub struct Separating<C> {
    block: Word,
    x: C,
    y: C,
    alpha: usize,
}

impl<C> Separating<C> {
    pub fn block(&self) -> &Word {
        &self.block
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Position where round `j` (1-based) starts.
    pub fn round_start(&self, j: usize) -> usize {
        let rounds = j.saturating_sub(1);
        rounds * self.block.len() + 2 * self.alpha * rounds * (rounds + 1) / 2
    }
}

impl<C: Configuration> Configuration for Separating<C> {
    fn prefix(&self, n: usize) -> Word {
        let mut rounds = 1;
        while self.round_start(rounds + 1) < n {
            rounds += 1;
        }
        let xs = self.x.prefix(rounds * self.alpha);
        let ys = self.y.prefix(rounds * self.alpha);
        let mut out = Word::empty();
        for j in 1..=rounds {
            out.extend_from(&self.block);
            out.extend_from(&xs[..j * self.alpha]);
            out.extend_from(&ys[..j * self.alpha]);
        }
        out.truncate(n);
        out
    }
}

/// The two configurations built from a witness and a pair `(x, y)`; they
/// differ only inside the witness blocks, which become sparser and sparser.
pub fn separating_configs<C: Configuration + Clone>(
    f: &RuleTable,
    witness: &Witness,
    x: C,
    y: C,
) -> Result<(Separating<C>, Separating<C>), ClassifyError> {
    if witness.alpha == 0 {
        return Err(ClassifyError::ZeroDefect);
    }
    if !witness.verify(f) {
        return Err(ClassifyError::InvalidWitness);
    }
    let w = witness.oriented();
    let alpha = w.alpha as usize;
    Ok((
        Separating {
            block: w.u,
            x: x.clone(),
            y: y.clone(),
            alpha,
        },
        Separating {
            block: w.v,
            x,
            y,
            alpha,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Space {
    WeylH,
    WeylL,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WellDefinedReason {
    Uniform,
    Constant { period: Word },
    DiamondUniform { mean: Rational },
}

/// Pair at sliding-Hamming pseudo-distance zero whose images are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HammingEvidence {
    /// Equal-length words with a common suffix of length δ−1 and
    /// `|f*(u)| − |f*(v)| = alpha > 0`.
    pub u: Word,
    pub v: Word,
    pub alpha: usize,
    pub x: ConfigGenerator,
    pub y: ConfigGenerator,
    /// `x` and `y` agree from this position on.
    pub agree_from: usize,
    /// Every aligned window of `F(x)`, `F(y)` of this length holds a mismatch.
    pub image_period: usize,
}

impl HammingEvidence {
    /// Lower bound on the sliding Hamming estimate of the images, for any window.
    pub fn image_density(&self) -> Rational {
        Rational::new(1, self.image_period as i64)
    }
}

/// Sampled pair, its image ladder, and the derived separating configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct LevenshteinEvidence {
    pub witness: Witness,
    pub x: ConfigGenerator,
    pub y: ConfigGenerator,
    pub image_ladder: LadderReport<Rational>,
    pub separating: SeparatingMeasurement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparatingMeasurement {
    pub window: usize,
    pub input: SlidingEstimate<Rational>,
    pub image: SlidingEstimate<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledPair {
    pub x: ConfigGenerator,
    pub y: ConfigGenerator,
    pub image_ladder: LadderReport<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    WellDefined(WellDefinedReason),
    NotWellDefinedH(Box<HammingEvidence>),
    NotWellDefinedL(Box<LevenshteinEvidence>),
    /// Not diamond-uniform, yet no sampled pair has images apart at the budget.
    Unknown {
        witness: Witness,
        samples: Vec<SampledPair>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub space: Space,
    pub outcome: Outcome,
}

impl Verdict {
    pub fn is_well_defined(&self) -> bool {
        matches!(self.outcome, Outcome::WellDefined(_))
    }

    pub fn is_not_well_defined(&self) -> bool {
        matches!(self.outcome, Outcome::NotWellDefinedH(_) | Outcome::NotWellDefinedL(_))
    }

    pub fn label(&self) -> &'static str {
        match self.outcome {
            Outcome::WellDefined(_) => "WellDefined",
            Outcome::NotWellDefinedH(_) | Outcome::NotWellDefinedL(_) => "NotWellDefined",
            Outcome::Unknown { .. } => "Unknown",
        }
    }
}

/// Well-definedness on the sliding Hamming space: uniform or constant.
pub fn verdict_weyl_h(f: &RuleTable) -> Verdict {
    let outcome = if f.norms().uniform {
        Outcome::WellDefined(WellDefinedReason::Uniform)
    } else {
        match decide_constant(f) {
            Constancy::Constant { period } => Outcome::WellDefined(WellDefinedReason::Constant { period }),
            Constancy::NotConstant { x, .. } => Outcome::NotWellDefinedH(Box::new(hamming_evidence(f, &x))),
        }
    };
    Verdict {
        space: Space::WeylH,
        outcome,
    }
}

/// Limit on the number of candidate period words tried by [`hamming_evidence`].
const PERIOD_SEARCH_LIMIT: usize = 1 << 20;

/// Evidence that a non-uniform, non-constant rule is not well-defined on the
/// sliding Hamming space. `nonconstant` is a configuration whose image
/// differs from `F(a^∞)`.
fn hamming_evidence(f: &RuleTable, nonconstant: &ConfigGenerator) -> HammingEvidence {
    let delta = f.diameter();
    let norms = f.norms();
    let fill: Letter = 0;
    let pad = vec![fill; delta - 1];

    // longest and shortest windows; extend them so that they share a suffix of length δ−1
    let long = f.window(f.images().iter().position(|w| w.len() == norms.maxf).unwrap());
    let short = f.window(f.images().iter().position(|w| w.len() == norms.minf).unwrap());
    let candidates = [
        (long.concat(&pad), short.concat(&pad)),
        (
            Word::from(&long[1..]).concat(&pad),
            Word::from(&short[1..]).concat(&pad),
        ),
    ];
    let (u, v, alpha) = candidates
        .into_iter()
        .find_map(|(a, b)| {
            let d = f.star_len(&a) as i64 - f.star_len(&b) as i64;
            match d {
                0 => None,
                d if d > 0 => Some((a, b, d as usize)),
                d => Some((b, a, (-d) as usize)),
            }
        })
        .expect("one of the two padded pairs has different image lengths");

    // Look for z = w^∞ whose image is not alpha-periodic. If none is short
    // enough to exist, every image is alpha-periodic.
    let max_len = delta + 1 + (alpha - 1) / norms.minf;
    let mut budget = PERIOD_SEARCH_LIMIT;
    for len in 1..=max_len {
        for w in f.alphabet().words_of_length(len) {
            if budget == 0 {
                break;
            }
            budget -= 1;
            let z = ConfigGenerator::Periodic(w.clone());
            let period = f.star_len(&z.prefix(len + delta - 1));
            let image = f.image_prefix(&z, period + alpha);
            if (0..period).any(|i| image[i] != image[i + alpha]) {
                return HammingEvidence {
                    agree_from: u.len(),
                    x: ConfigGenerator::EventuallyPeriodic {
                        prefix: u.clone(),
                        period: w.clone(),
                    },
                    y: ConfigGenerator::EventuallyPeriodic {
                        prefix: v.clone(),
                        period: w,
                    },
                    u,
                    v,
                    alpha,
                    image_period: period,
                };
            }
        }
    }

    // All images are alpha-periodic and determined by their first alpha+δ input letters.
    let reset = alpha + delta;
    let known = match nonconstant {
        ConfigGenerator::Explicit { prefix, .. } => prefix.len(),
        _ => 0,
    };
    let x_word = nonconstant.prefix(reset.max(known));
    let mut y_word = vec![fill; reset];
    y_word.extend_from_slice(&x_word[reset.min(x_word.len())..]);
    HammingEvidence {
        u,
        v,
        alpha,
        x: ConfigGenerator::explicit(x_word, fill),
        y: ConfigGenerator::explicit(Word::new(y_word), fill),
        agree_from: reset,
        image_period: alpha,
    }
}

/// Budget for the sliding-Levenshtein semi-test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingBudget {
    pub windows: Vec<usize>,
    pub offsets: OffsetPolicy,
}

impl Default for SamplingBudget {
    fn default() -> Self {
        Self {
            windows: vec![8, 16, 32],
            offsets: OffsetPolicy::default(),
        }
    }
}

/// Image estimates above this at the largest window count as evidence that
/// the images are apart.
pub fn separation_threshold() -> Rational {
    Rational::new(1, 8)
}

/// Configurations used by the semi-test: `c^∞` per letter, `(cd)^∞` per pair
/// of distinct letters, and `u^∞`, `v^∞` for the witness words.
pub fn sample_configurations(f: &RuleTable, witness: &Witness) -> Vec<ConfigGenerator> {
    let k = f.alphabet().size() as Letter;
    let mut out: Vec<ConfigGenerator> = (0..k).map(|c| ConfigGenerator::Periodic(Word::new(vec![c]))).collect();
    for c in 0..k {
        for d in 0..k {
            if c != d {
                out.push(ConfigGenerator::Periodic(Word::new(vec![c, d])));
            }
        }
    }
    for w in [&witness.u, &witness.v] {
        if !w.is_empty() {
            let g = ConfigGenerator::Periodic(w.clone());
            if !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out
}

/// Well-definedness on the sliding Levenshtein space.
///
/// Diamond-uniform rules are well-defined. Otherwise images of sampled pairs
/// are estimated; a pair above [`separation_threshold`] is reported with the
/// separating configurations built from it. If no pair separates, the outcome
/// is `Unknown`: constancy up to the pseudo-metric is not decided.
pub fn verdict_weyl_l(f: &RuleTable, budget: &SamplingBudget) -> Verdict {
    let outcome = match decide_diamond_uniform(f) {
        DiamondUniformity::DiamondUniform { mean } => Outcome::WellDefined(WellDefinedReason::DiamondUniform { mean }),
        DiamondUniformity::NotDiamondUniform {
            min_cycle, max_cycle, ..
        } => {
            let witness = witness_pair(f, &min_cycle, &max_cycle)
                .expect("distinct means")
                .oriented();
            let samples = sample_image_pairs(f, &witness, budget);
            let threshold = separation_threshold();
            let best = samples
                .iter()
                .filter(|s| s.image_ladder.entries.last().unwrap().exact() > threshold)
                .max_by(|a, b| {
                    let (ea, eb) = (
                        a.image_ladder.entries.last().unwrap(),
                        b.image_ladder.entries.last().unwrap(),
                    );
                    ea.exact().cmp(&eb.exact())
                });
            match best {
                Some(pair) => {
                    let separating = measure_separating(f, &witness, pair, budget);
                    Outcome::NotWellDefinedL(Box::new(LevenshteinEvidence {
                        witness,
                        x: pair.x.clone(),
                        y: pair.y.clone(),
                        image_ladder: pair.image_ladder.clone(),
                        separating,
                    }))
                }
                None => Outcome::Unknown { witness, samples },
            }
        }
    };
    Verdict {
        space: Space::WeylL,
        outcome,
    }
}

fn sample_image_pairs(f: &RuleTable, witness: &Witness, budget: &SamplingBudget) -> Vec<SampledPair> {
    let configs = sample_configurations(f, witness);
    let mut out = Vec::new();
    for (i, x) in configs.iter().enumerate() {
        for y in &configs[i + 1..] {
            let image_ladder = weyl_ladder(
                BaseDistance::Levenshtein,
                &f.apply(x),
                &f.apply(y),
                &budget.windows,
                &budget.offsets,
            )
            .expect("sampling budget is a valid ladder");
            out.push(SampledPair {
                x: x.clone(),
                y: y.clone(),
                image_ladder,
            });
        }
    }
    out
}

/// Measures the separating configurations at the largest window, with the
/// offset range extended past the first round long enough to contain the
/// sampled pair's best window.
fn measure_separating(
    f: &RuleTable,
    witness: &Witness,
    pair: &SampledPair,
    budget: &SamplingBudget,
) -> SeparatingMeasurement {
    let best = pair.image_ladder.entries.last().expect("nonempty ladder");
    let window = best.window;
    let (z, w) = separating_configs(f, witness, Arc::new(pair.x.clone()), Arc::new(pair.y.clone()))
        .expect("oriented witness is valid");
    let alpha = z.alpha();
    let round = (best.argmax + window).div_ceil(alpha) + 1;
    let input_end = z.round_start(round + 1);
    let image_offsets = f.star_len(&z.prefix(input_end)).max(f.star_len(&w.prefix(input_end)));
    let input_offsets = budget_offsets(&budget.offsets, window, budget.windows.len() - 1);
    let input = crate::pseudometrics::sliding_estimate(BaseDistance::Levenshtein, &z, &w, window, input_offsets);
    let image = crate::pseudometrics::sliding_estimate(
        BaseDistance::Levenshtein,
        &f.apply(&z),
        &f.apply(&w),
        window,
        image_offsets,
    );
    SeparatingMeasurement { window, input, image }
}

fn budget_offsets(policy: &OffsetPolicy, window: usize, index: usize) -> usize {
    match policy {
        OffsetPolicy::Proportional(c) => c * window,
        OffsetPolicy::Fixed(k) => *k,
        OffsetPolicy::Explicit(ks) => ks[index],
    }
}

#[cfg(test)]
mod tests;
