//! Named worked examples, recomputed at configurable budgets and compared
//! against their stated values.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{
    decide_diamond_uniform, verdict_weyl_h, verdict_weyl_l, DeBruijnGraph, DiamondUniformity, SamplingBudget,
};
use crate::dillmaps::{compose_sub_ca, named};
use crate::distances::{hamming, levenshtein, HalfInt};
use crate::proptests::{random_config, shift_commutes, RuleSampler};
use crate::pseudometrics::{sliding_estimate, BaseDistance};
use crate::scalar::ratio_text;
use crate::words::{Alphabet, ConfigGenerator, Configuration};
use crate::Rational;

pub const EXAMPLE_IDS: [&str; 5] = [
    "fibonacci-weyl",
    "tau011-weylL",
    "diamond-example",
    "xor-compose",
    "shift-jump",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReproduceParams {
    /// Single window length instead of the default ladder.
    pub ell: Option<usize>,
    /// Offset range override.
    pub max_offset: Option<usize>,
    /// Number of sampled configurations or rules, where the example samples.
    pub budget: Option<usize>,
    /// Scan all offsets instead of jumping to the computed one.
    pub scan: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Line {
    pub label: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReproduceReport {
    pub id: String,
    pub lines: Vec<Line>,
}

impl ReproduceReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.id);
        for l in &self.lines {
            let status = if l.pass { "pass" } else { "FAIL" };
            out.push_str(&format!(
                "{status}\t{}\texpected {}\tobserved {}\n",
                l.label, l.expected, l.observed
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown example `{0}`; valid ids: fibonacci-weyl, tau011-weylL, diamond-example, xor-compose, shift-jump")]
pub struct UnknownExample(pub String);

pub fn run(id: &str, params: &ReproduceParams) -> Result<ReproduceReport, UnknownExample> {
    let lines = match id {
        "fibonacci-weyl" => fibonacci_weyl(params),
        "tau011-weylL" => tau011(params),
        "diamond-example" => diamond_example(params),
        "xor-compose" => xor_compose(),
        "shift-jump" => shift_jump(params),
        _ => return Err(UnknownExample(id.to_string())),
    };
    Ok(ReproduceReport {
        id: id.to_string(),
        lines,
    })
}

fn line(label: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>, pass: bool) -> Line {
    Line {
        label: label.into(),
        expected: expected.into(),
        observed: observed.into(),
        pass,
    }
}

fn windows(params: &ReproduceParams, default: &[usize]) -> Vec<usize> {
    params.ell.map_or_else(|| default.to_vec(), |l| vec![l])
}

fn fibonacci_weyl(params: &ReproduceParams) -> Vec<Line> {
    let f = named::fibonacci();
    let a = f.alphabet();
    let x = ConfigGenerator::Periodic(a.parse_word("a").unwrap());
    let y = ConfigGenerator::EventuallyPeriodic {
        prefix: a.parse_word("b").unwrap(),
        period: a.parse_word("a").unwrap(),
    };
    let (fx, fy) = (f.apply(&x), f.apply(&y));
    let mut lines = vec![line(
        "images",
        "(ab)^inf and a(ab)^inf",
        format!("{}... and {}...", a.render(&fx.prefix(8)), a.render(&fy.prefix(8))),
        fx.prefix(64) == ConfigGenerator::Periodic(a.parse_word("ab").unwrap()).prefix(64)
            && fy.prefix(64) == y_image_reference(a).prefix(64),
    )];
    let ladder: Vec<usize> = (2..=8).map(|e| 1 << e).collect();
    for ell in windows(params, &ladder) {
        let k = params.max_offset.unwrap_or(4 * ell);
        let image = sliding_estimate::<Rational>(BaseDistance::Hamming, &fx, &fy, ell, k);
        let input = sliding_estimate::<Rational>(BaseDistance::Hamming, &x, &y, ell, k);
        lines.push(line(
            format!("image estimate ell={ell} K={k}"),
            "1",
            ratio_text(&image.value),
            image.value == Rational::from_integer(1),
        ));
        let bound = Rational::new(1, ell as i64);
        lines.push(line(
            format!("input estimate ell={ell} K={k}"),
            format!("<= {}", ratio_text(&bound)),
            ratio_text(&input.value),
            input.value <= bound,
        ));
    }
    lines
}

fn y_image_reference(a: &Alphabet) -> ConfigGenerator {
    ConfigGenerator::EventuallyPeriodic {
        prefix: a.parse_word("a").unwrap(),
        period: a.parse_word("ab").unwrap(),
    }
}

/// `k = Σ_{i≤ℓ}(i+1) + Σ_{i≤ℓ}2(i−1)`.
pub fn tau011_offset(ell: usize) -> usize {
    (1..=ell).map(|i| (i + 1) + 2 * (i - 1)).sum()
}

/// `2/(m+p+1) + 2/ℓ` with `p = min{j : s_j ≥ k}`, `m = max{j : s_j ≤ k+ℓ}`, `s_j = j(j+1)`.
pub fn tau011_input_bound(k: usize, ell: usize) -> Rational {
    let s = |j: usize| j * (j + 1);
    let p = (0..).find(|&j| s(j) >= k).unwrap();
    let m = (0..).take_while(|&j| s(j) <= k + ell).last().unwrap();
    Rational::new(2, (m + p + 1) as i64) + Rational::new(2, ell as i64)
}

fn tau011(params: &ReproduceParams) -> Vec<Line> {
    let tau = named::doubling_ones();
    let a = tau.alphabet().clone();
    let x = ConfigGenerator::ramp(1, 0, 1, 0).unwrap();
    let y = ConfigGenerator::ramp(1, 1, 1, -1).unwrap();
    let (fx, fy) = (tau.apply(&x), tau.apply(&y));
    let mut lines = Vec::new();
    for ell in windows(params, &[4, 8, 16, 32]) {
        let k = tau011_offset(ell);
        let (ix, iy) = (fx.prefix(k + ell), fy.prefix(k + ell));
        let (wx, wy) = (&ix[k..], &iy[k..]);
        let d = levenshtein(wx, wy);
        let ones = a.render(&vec![1; ell]);
        let zeros = a.render(&vec![0; ell]);
        lines.push(line(
            format!("image windows ell={ell} k={k}"),
            format!("{ones} / {zeros}"),
            format!("{} / {}", a.render(wx), a.render(wy)),
            a.render(wx) == ones && a.render(wy) == zeros,
        ));
        lines.push(line(
            format!("image d_L ell={ell} k={k}"),
            ell.to_string(),
            d.to_string(),
            d == HalfInt::from_int(ell as u64),
        ));

        let k_in = params.max_offset.unwrap_or(k);
        let (px, py) = (x.prefix(k_in + ell), y.prefix(k_in + ell));
        let mut worst: Option<(Rational, usize)> = None;
        let mut violations = 0;
        for j in 0..=k_in {
            let value = Rational::new(hamming(&px[j..j + ell], &py[j..j + ell]).unwrap() as i64, ell as i64);
            let margin = tau011_input_bound(j, ell) - value;
            if margin < Rational::from_integer(0) {
                violations += 1;
            }
            if worst.is_none_or(|(w, _)| margin < w) {
                worst = Some((margin, j));
            }
        }
        let (margin, at) = worst.unwrap();
        let input = sliding_estimate::<Rational>(BaseDistance::Hamming, &x, &y, ell, k_in);
        lines.push(line(
            format!("input windows within 2/(m+p+1)+2/ell, ell={ell} K={k_in}"),
            "0 violations",
            format!(
                "{violations} violations; estimate {}; tightest margin {} at k={at}",
                ratio_text(&input.value),
                ratio_text(&margin)
            ),
            violations == 0,
        ));

        if params.scan {
            let scan_k = params.max_offset.unwrap_or(k);
            let est = sliding_estimate::<Rational>(BaseDistance::Levenshtein, &fx, &fy, ell, scan_k);
            lines.push(line(
                format!("scan image d_L over k<={scan_k}, ell={ell}"),
                "1",
                format!("{} (first maximizer k={})", ratio_text(&est.value), est.argmax),
                est.value == Rational::from_integer(1),
            ));
        }
    }
    lines
}

fn diamond_example(params: &ReproduceParams) -> Vec<Line> {
    let f = named::diamond_example();
    let a = f.alphabet().clone();
    let n = f.norms();
    let mut lines = vec![line(
        "norms (minf, maxf)",
        "(1, 3), not uniform",
        format!(
            "({}, {}), {}",
            n.minf,
            n.maxf,
            if n.uniform { "uniform" } else { "not uniform" }
        ),
        (n.minf, n.maxf, n.uniform) == (1, 3, false),
    )];
    let g = DeBruijnGraph::from_rule(&f);
    let (lo, hi) = (g.min_mean_cycle().0, g.max_mean_cycle().0);
    lines.push(line(
        "cycle means (min, max)",
        "(2, 2)",
        format!("({}, {})", ratio_text(&lo), ratio_text(&hi)),
        lo == Rational::from_integer(2) && hi == lo,
    ));
    let du = matches!(decide_diamond_uniform(&f), DiamondUniformity::DiamondUniform { .. });
    lines.push(line("diamond-uniform", "true", du.to_string(), du));
    let h = verdict_weyl_h(&f);
    lines.push(line(
        "sliding Hamming verdict",
        "NotWellDefined",
        h.label(),
        h.is_not_well_defined(),
    ));
    let l = verdict_weyl_l(&f, &SamplingBudget::default());
    lines.push(line(
        "sliding Levenshtein verdict",
        "WellDefined",
        l.label(),
        l.is_well_defined(),
    ));

    let ab = ConfigGenerator::Periodic(a.parse_word("ab").unwrap());
    let ba = ConfigGenerator::Periodic(a.parse_word("ba").unwrap());
    let samples = params.budget.unwrap_or(50);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let len = 256;
    let mut bad = Vec::new();
    for _ in 0..samples {
        let x = random_config(&mut rng, 2);
        let expected = if x.prefix(1)[0] == 0 { &ab } else { &ba };
        if f.image_prefix(&x, len) != expected.prefix(len) {
            bad.push(x.to_dsl(&a));
        }
    }
    lines.push(line(
        format!("F(x) is (ab)^inf or (ba)^inf by first letter, {samples} samples, {len} letters"),
        "all",
        format!("{} mismatches", bad.len()),
        bad.is_empty(),
    ));
    let ell = params.ell.unwrap_or(64);
    let k = params.max_offset.unwrap_or(4 * ell);
    let est = sliding_estimate::<Rational>(BaseDistance::Levenshtein, &ab, &ba, ell, k);
    let bound = Rational::new(1, ell as i64);
    lines.push(line(
        format!("sliding d_L estimate of (ab)^inf, (ba)^inf at ell={ell} K={k}"),
        format!("<= {}", ratio_text(&bound)),
        ratio_text(&est.value),
        est.value <= bound,
    ));
    lines
}

fn xor_compose() -> Vec<Line> {
    let composed = compose_sub_ca(&named::fibonacci(), &named::xor()).expect("compatible alphabets");
    let a = composed.alphabet().clone();
    [("aa", "ab"), ("ab", "a"), ("ba", "a"), ("bb", "ab")]
        .into_iter()
        .map(|(w, expected)| {
            let got = a.render(composed.image(&a.parse_word(w).unwrap()));
            line(format!("tau o f({w})"), expected, got.clone(), got == expected)
        })
        .collect()
}

fn shift_jump(params: &ReproduceParams) -> Vec<Line> {
    let count = params.budget.unwrap_or(50);
    let n = params.ell.unwrap_or(512);
    let rules = RuleSampler::new(2, 1..=3, 1..=3, params.seed).rules(count);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x51f7);
    let mut failures = Vec::new();
    for (i, f) in rules.iter().enumerate() {
        let x = random_config(&mut rng, 2);
        if let Err(e) = shift_commutes(f, &x, n) {
            failures.push(format!("rule #{i}: {e}"));
        }
    }
    vec![line(
        format!("F(shift x) = shift^s(x) F(x) on {n} letters, {count} random rules"),
        "0 failures",
        if failures.is_empty() {
            "0 failures".to_string()
        } else {
            failures.join("; ")
        },
        failures.is_empty(),
    )]
}
