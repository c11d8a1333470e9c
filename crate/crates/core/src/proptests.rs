//! Seeded property suites behind `dill verify`.
//!
//! Each suite returns a [`SuiteReport`] listing its checks. A failing check
//! carries a description of the smallest counterexample found and a command
//! reproducing the run.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classify::graph::DeBruijnGraph;
use crate::classify::lipschitz::{lemma_lev_check, lemma_lip_h_check, lipschitz_check};
use crate::classify::{decide_diamond_uniform, verdict_weyl_h, witness_pair, DiamondUniformity, Outcome, Space};
use crate::dillmaps::RuleTable;
use crate::distances::{hamming, levenshtein, levenshtein_oracle, HalfInt};
use crate::pseudometrics::{besicovitch_estimate, sliding_estimate, BaseDistance, OffsetPolicy};
use crate::words::{Alphabet, ConfigGenerator, Configuration, Letter, Word};
use crate::Rational;

/// Deterministic stream of random total rule tables.
#[derive(Debug, Clone)]
pub struct RuleSampler {
    alphabet: Alphabet,
    diameters: RangeInclusive<usize>,
    image_lengths: RangeInclusive<usize>,
    rng: ChaCha8Rng,
}

impl RuleSampler {
    /// Alphabet `a, b, c, …` of the given size.
    pub fn new(
        alphabet_size: usize,
        diameters: RangeInclusive<usize>,
        image_lengths: RangeInclusive<usize>,
        seed: u64,
    ) -> Self {
        assert!(*diameters.start() >= 1 && *image_lengths.start() >= 1);
        let symbols: String = (b'a'..).take(alphabet_size).map(char::from).collect();
        Self {
            alphabet: Alphabet::new(&symbols).expect("small alphabet"),
            diameters,
            image_lengths,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn next_rule(&mut self) -> RuleTable {
        let delta = self.rng.gen_range(self.diameters.clone());
        let k = self.alphabet.size();
        let windows = k.pow(delta as u32);
        let images = (0..windows)
            .map(|_| {
                let len = self.rng.gen_range(self.image_lengths.clone());
                (0..len).map(|_| self.rng.gen_range(0..k) as Letter).collect()
            })
            .collect();
        RuleTable::new(self.alphabet.clone(), delta, images).expect("sampled table is valid")
    }

    pub fn rules(&mut self, n: usize) -> Vec<RuleTable> {
        (0..n).map(|_| self.next_rule()).collect()
    }
}

/// Random word with length in `lengths`.
pub fn random_word(rng: &mut impl Rng, k: usize, lengths: RangeInclusive<usize>) -> Word {
    let len = rng.gen_range(lengths);
    (0..len).map(|_| rng.gen_range(0..k) as Letter).collect()
}

/// Random periodic, eventually periodic or finitely-supported configuration.
pub fn random_config(rng: &mut impl Rng, k: usize) -> ConfigGenerator {
    match rng.gen_range(0..3) {
        0 => ConfigGenerator::Periodic(random_word(rng, k, 1..=6)),
        1 => ConfigGenerator::EventuallyPeriodic {
            prefix: random_word(rng, k, 0..=12),
            period: random_word(rng, k, 1..=5),
        },
        _ => ConfigGenerator::explicit(random_word(rng, k, 0..=20), rng.gen_range(0..k) as Letter),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub cases: u64,
    pub failure: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed() { "pass" } else { "FAIL" };
            out.push_str(&format!("{status}\t{}/{}\t{} cases\n", self.suite, c.name, c.cases));
            if let Some(f) = &c.failure {
                for line in f.lines() {
                    out.push_str(&format!("\t{line}\n"));
                }
                out.push_str(&format!(
                    "\treproduce: dill verify --suite {} --seed {}\n",
                    self.suite, self.seed
                ));
            }
        }
        out
    }
}

fn check(name: &str, cases: u64, failure: Option<String>) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        cases,
        failure,
    }
}

fn all_words(a: &Alphabet, max_len: usize) -> Vec<Word> {
    (0..=max_len).flat_map(|n| a.words_of_length(n)).collect()
}

/// Shrinks a failing rule by shortening images one letter at a time while
/// `fails` keeps holding.
pub fn shrink_rule(rule: &RuleTable, fails: impl Fn(&RuleTable) -> bool) -> RuleTable {
    let mut current = rule.clone();
    loop {
        let mut progressed = false;
        for i in 0..current.window_count() {
            let mut images = current.images().to_vec();
            if images[i].len() <= 1 {
                continue;
            }
            let new_len = images[i].len() - 1;
            images[i].truncate(new_len);
            let candidate = RuleTable::new(current.alphabet().clone(), current.diameter(), images)
                .expect("shorter nonempty images stay valid");
            if fails(&candidate) {
                current = candidate;
                progressed = true;
            }
        }
        if !progressed {
            return current;
        }
    }
}

/// Runs `property` on every rule; on the first failure (in rule order) the
/// rule is shrunk and reported.
fn rule_check(
    name: &str,
    rules: &[RuleTable],
    property: impl Fn(usize, &RuleTable) -> Result<(), String> + Sync,
) -> CheckResult {
    let first = rules
        .par_iter()
        .enumerate()
        .filter_map(|(i, r)| property(i, r).err().map(|e| (i, e)))
        .min_by_key(|(i, _)| *i);
    let failure = first.map(|(i, _)| {
        let shrunk = shrink_rule(&rules[i], |r| property(i, r).is_err());
        let why = property(i, &shrunk).err().unwrap_or_default();
        format!("rule #{i}, shrunk:\n{}\n{why}", shrunk.to_rule_text().trim_end())
    });
    check(name, rules.len() as u64, failure)
}

/// Metric axioms, oracle equivalence and comparisons with Hamming.
pub fn suite_distances(seed: u64) -> SuiteReport {
    let a = Alphabet::binary();
    let mut checks = Vec::new();

    let upto6 = all_words(&a, 6);
    let pairs: Vec<(&Word, &Word)> = upto6.iter().flat_map(|u| upto6.iter().map(move |v| (u, v))).collect();
    let bad = pairs
        .par_iter()
        .find_first(|(u, v)| levenshtein_oracle(u, v).ok() != Some(levenshtein(u, v)));
    checks.push(check(
        "oracle-equivalence",
        pairs.len() as u64,
        bad.map(|(u, v)| format!("u={} v={}", a.render(u), a.render(v))),
    ));

    let bad = pairs.par_iter().find_first(|(u, v)| {
        let d = levenshtein(u, v);
        let gap = (u.len() as i64 - v.len() as i64).unsigned_abs();
        d.doubled() < gap || (u.len() == v.len() && d > HalfInt::from_int(hamming(u, v).unwrap() as u64))
    });
    checks.push(check(
        "length-gap-and-hamming-bounds",
        pairs.len() as u64,
        bad.map(|(u, v)| format!("u={} v={}", a.render(u), a.render(v))),
    ));

    let upto4 = all_words(&a, 4);
    let mut triples = 0u64;
    let mut failure = None;
    'outer: for u in &upto4 {
        for v in &upto4 {
            let uv = levenshtein(u, v);
            if uv != levenshtein(v, u) || ((uv == HalfInt::ZERO) != (u == v)) {
                failure = Some(format!("symmetry/identity u={} v={}", a.render(u), a.render(v)));
                break 'outer;
            }
            for w in &upto4 {
                triples += 1;
                if levenshtein(u, w) > uv + levenshtein(v, w) {
                    failure = Some(format!(
                        "triangle u={} v={} w={}",
                        a.render(u),
                        a.render(v),
                        a.render(w)
                    ));
                    break 'outer;
                }
            }
        }
    }
    checks.push(check("metric-axioms-exhaustive", triples, failure));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failure = None;
    for _ in 0..10_000 {
        let (u, v, w) = (
            random_word(&mut rng, 2, 0..=16),
            random_word(&mut rng, 2, 0..=16),
            random_word(&mut rng, 2, 0..=16),
        );
        if levenshtein(&u, &u) != HalfInt::ZERO || levenshtein(&u, &w) > levenshtein(&u, &v) + levenshtein(&v, &w) {
            failure = Some(format!("u={} v={} w={}", a.render(&u), a.render(&v), a.render(&w)));
            break;
        }
        if u.len() == v.len() && levenshtein(&u, &v) > HalfInt::from_int(u.len() as u64) {
            failure = Some(format!("range u={} v={}", a.render(&u), a.render(&v)));
            break;
        }
    }
    checks.push(check("metric-axioms-random", 10_000, failure));

    SuiteReport {
        suite: "distances",
        seed,
        checks,
    }
}

fn star_prefix_consistent(f: &RuleTable, x: &ConfigGenerator, n: usize) -> Result<(), String> {
    let long = f.star(&x.prefix(n + f.diameter()));
    for m in 0..=n {
        let short = f.star(&x.prefix(m));
        if !long.starts_with(&short) {
            return Err(format!("f*(x[0,{m})) is not a prefix of f*(x[0,{}))", n + f.diameter()));
        }
    }
    let image = f.image_prefix(x, n);
    if image.len() != n || !long.starts_with(&image) {
        return Err(format!("image_prefix({n}) disagrees with f*"));
    }
    Ok(())
}

/// Length bookkeeping, prefix monotonicity, overlap splitting, shift
/// commutation and the de Bruijn path-weight identity on sampled rules.
pub fn suite_dillmaps(seed: u64, n_rules: usize) -> SuiteReport {
    let mut sampler = RuleSampler::new(2, 1..=3, 1..=3, seed);
    let rules = sampler.rules(n_rules);
    let a = sampler.alphabet().clone();
    let words = all_words(&a, 6);
    let mut checks = Vec::new();

    checks.push(rule_check("length-bookkeeping", &rules, |_, f| {
        let n = f.norms();
        let d = f.diameter();
        for u in &words {
            let len = f.star_len(u);
            let windows: usize = (0..u.len().saturating_sub(d - 1))
                .map(|i| f.image(&u[i..i + d]).len())
                .sum();
            if len != windows || len != f.star(u).len() {
                return Err(format!("|f*({})| = {len}, window sum {windows}", a.render(u)));
            }
            if u.len() >= d {
                let count = u.len() - d + 1;
                if len < n.minf * count || len > n.maxf * count || (n.uniform && len != n.minf * count) {
                    return Err(format!("norm bounds fail on {}", a.render(u)));
                }
            }
        }
        Ok(())
    }));

    checks.push(rule_check("overlap-splitting", &rules, |_, f| {
        let d = f.diameter();
        let pad = vec![0 as Letter; d - 1];
        for u in words.iter().filter(|u| u.len() >= d) {
            let whole = f.star(&u.concat(&pad));
            let tail = Word::from(&u[u.len() - (d - 1)..]).concat(&pad);
            let split = f.star(u).concat(&f.star(&tail));
            if whole != split {
                return Err(format!("u={}", a.render(u)));
            }
        }
        Ok(())
    }));

    checks.push(rule_check("path-weight-identity", &rules, |_, f| {
        let g = DeBruijnGraph::from_rule(f);
        for u in words.iter().filter(|u| u.len() + 1 >= f.diameter()) {
            let path = g.path_of(f, u);
            if g.path_weight(&path) as usize != f.star_len(u) {
                return Err(format!("u={}", a.render(u)));
            }
        }
        Ok(())
    }));

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let configs: Vec<ConfigGenerator> = (0..rules.len()).map(|_| random_config(&mut rng, 2)).collect();
    checks.push(rule_check("prefix-monotonicity", &rules, |i, f| {
        star_prefix_consistent(f, &configs[i], 40)
    }));
    checks.push(rule_check("shift-commutation", &rules, |i, f| {
        shift_commutes(f, &configs[i], 512)
    }));

    SuiteReport {
        suite: "dillmaps",
        seed,
        checks,
    }
}

/// `F(σx)_{[0,n)} = F(x)_{[s, s+n)}` with `s = |f(x_{[0,δ)})|`.
pub fn shift_commutes(f: &RuleTable, x: &ConfigGenerator, n: usize) -> Result<(), String> {
    let s = f.shift_jump(x);
    let shifted = f.image_prefix(&x.shift(1), n);
    let image = f.image_prefix(x, n + s);
    if shifted[..] != image[s..] {
        let at = (0..n).find(|&i| shifted[i] != image[s + i]).unwrap_or(n);
        return Err(format!("x={} differs at {at} (jump {s})", x.to_dsl(f.alphabet())));
    }
    Ok(())
}

/// Estimator invariants on random configuration pairs and triples.
pub fn suite_pseudometrics(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Alphabet::binary();
    let triples: Vec<[ConfigGenerator; 3]> = (0..60)
        .map(|_| {
            [
                random_config(&mut rng, 2),
                random_config(&mut rng, 2),
                random_config(&mut rng, 2),
            ]
        })
        .collect();
    let budgets = [(1usize, 0usize), (4, 16), (16, 64), (33, 40)];
    let failure = triples.par_iter().find_map_first(|[x, y, z]| {
        for &(ell, k) in &budgets {
            let est = |b, p: &ConfigGenerator, q: &ConfigGenerator| sliding_estimate::<Rational>(b, p, q, ell, k).value;
            let (hxy, lxy) = (est(BaseDistance::Hamming, x, y), est(BaseDistance::Levenshtein, x, y));
            let label = || {
                format!(
                    "x={} y={} z={} ell={ell} K={k}",
                    x.to_dsl(&a),
                    y.to_dsl(&a),
                    z.to_dsl(&a)
                )
            };
            if lxy > hxy {
                return Some(format!("L > H: {}", label()));
            }
            for base in [BaseDistance::Hamming, BaseDistance::Levenshtein] {
                let xy = est(base, x, y);
                if xy != est(base, y, x) {
                    return Some(format!("asymmetric {base:?}: {}", label()));
                }
                if xy < Rational::from_integer(0) || xy > Rational::from_integer(1) {
                    return Some(format!("out of range {base:?}: {}", label()));
                }
                if est(base, x, z) > xy + est(base, y, z) {
                    return Some(format!("triangle {base:?}: {}", label()));
                }
                if besicovitch_estimate::<Rational>(base, x, y, ell).value > xy {
                    return Some(format!("prefix estimate above sliding {base:?}: {}", label()));
                }
            }
        }
        None
    });
    SuiteReport {
        suite: "pseudometrics",
        seed,
        checks: vec![check(
            "estimator-invariants",
            (triples.len() * budgets.len()) as u64,
            failure,
        )],
    }
}

/// Definitional check: equal-length words sharing their first and last δ−1
/// letters have equal image lengths, for all lengths up to `max_len`.
pub fn diamond_brute_force(f: &RuleTable, max_len: usize) -> bool {
    let o = f.diameter() - 1;
    for len in o..=max_len {
        let mut seen: HashMap<(Word, Word), usize> = HashMap::new();
        for u in f.alphabet().words_of_length(len) {
            let key = (Word::from(&u[..o]), Word::from(&u[len - o..]));
            let l = f.star_len(&u);
            if *seen.entry(key).or_insert(l) != l {
                return false;
            }
        }
    }
    true
}

/// Diamond-uniformity against brute force, witness re-evaluation,
/// evidence for the Hamming verdict, and the Lipschitz bounds wherever
/// their hypotheses hold.
pub fn suite_theorems(seed: u64, n_rules: usize) -> SuiteReport {
    let mut sampler = RuleSampler::new(2, 1..=3, 1..=3, seed);
    let rules = sampler.rules(n_rules);
    let a = sampler.alphabet().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ffee);
    let pairs: Vec<(ConfigGenerator, ConfigGenerator)> = (0..4)
        .map(|_| (random_config(&mut rng, 2), random_config(&mut rng, 2)))
        .collect();
    let mut checks = Vec::new();

    checks.push(rule_check("diamond-vs-brute-force", &rules, |_, f| {
        let decided = matches!(decide_diamond_uniform(f), DiamondUniformity::DiamondUniform { .. });
        let brute = diamond_brute_force(f, 10);
        if decided != brute {
            return Err(format!(
                "cycle means say {decided}, enumeration up to length 10 says {brute}"
            ));
        }
        if f.norms().uniform && !decided {
            return Err("uniform rule judged not diamond-uniform".into());
        }
        Ok(())
    }));

    checks.push(rule_check("witness-reevaluation", &rules, |_, f| {
        if let DiamondUniformity::NotDiamondUniform {
            min_cycle, max_cycle, ..
        } = decide_diamond_uniform(f)
        {
            let w = witness_pair(f, &min_cycle, &max_cycle).map_err(|e| e.to_string())?;
            if !w.verify(f) {
                return Err(format!(
                    "witness u={} v={} alpha={}",
                    a.render(&w.u),
                    a.render(&w.v),
                    w.alpha
                ));
            }
        }
        Ok(())
    }));

    checks.push(rule_check("hamming-evidence", &rules, |_, f| {
        if let Outcome::NotWellDefinedH(e) = verdict_weyl_h(f).outcome {
            let ell = 256;
            let input = sliding_estimate::<Rational>(BaseDistance::Hamming, &e.x, &e.y, ell, 4 * ell).value;
            let image =
                sliding_estimate::<Rational>(BaseDistance::Hamming, &f.apply(&e.x), &f.apply(&e.y), ell, 4 * ell).value;
            if input >= image || image < e.image_density() - Rational::new(1, ell as i64) {
                return Err(format!(
                    "x={} y={} input {input} image {image}",
                    e.x.to_dsl(&a),
                    e.y.to_dsl(&a)
                ));
            }
        }
        Ok(())
    }));

    checks.push(rule_check("lipschitz-bounds", &rules, |_, f| {
        let n = f.norms();
        if n.uniform {
            let r = lipschitz_check(f, &pairs, &[4, 16, 64], &OffsetPolicy::default(), Space::WeylH)
                .map_err(|e| e.to_string())?;
            let bad = r.violations().next().map(|v| (v.pair, v.window));
            if let Some((pair, ell)) = bad {
                return Err(format!("sliding Hamming bound fails at pair {pair} ell {ell}"));
            }
            let lip = lemma_lip_h_check(f, &pairs, &[1, 5, 16, 40], &[0, 1, 7, 20]).map_err(|e| e.to_string())?;
            if !lip.lemma_violations.is_empty() || !lip.proposition_violations.is_empty() {
                return Err("window lemma fails".into());
            }
        }
        if matches!(decide_diamond_uniform(f), DiamondUniformity::DiamondUniform { .. }) {
            let r = lipschitz_check(f, &pairs, &[4, 12], &OffsetPolicy::default(), Space::WeylL)
                .map_err(|e| e.to_string())?;
            let bad = r.violations().next().map(|v| (v.pair, v.window));
            if let Some((pair, ell)) = bad {
                return Err(format!("sliding Levenshtein bound fails at pair {pair} ell {ell}"));
            }
        }
        let lev = lemma_lev_check(f, 4);
        if let Some(c) = lev.violations.first() {
            return Err(format!(
                "Levenshtein lemma fails at u={} v={}",
                a.render(&c.u),
                a.render(&c.v)
            ));
        }
        Ok(())
    }));

    SuiteReport {
        suite: "theorems",
        seed,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_deterministic() {
        let a = RuleSampler::new(2, 1..=3, 1..=3, 7).rules(5);
        let b = RuleSampler::new(2, 1..=3, 1..=3, 7).rules(5);
        let c = RuleSampler::new(2, 1..=3, 1..=3, 8).rules(5);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_sampler_is_always_diamond_uniform() {
        for f in RuleSampler::new(2, 1..=3, 2..=2, 3).rules(100) {
            assert!(f.norms().uniform);
            assert!(
                matches!(decide_diamond_uniform(&f), DiamondUniformity::DiamondUniform { mean } if mean == Rational::from_integer(2))
            );
        }
        for f in RuleSampler::new(3, 1..=1, 1..=1, 3).rules(100) {
            assert!(verdict_weyl_h(&f).is_well_defined());
        }
    }

    #[test]
    fn shrinking_shortens_images() {
        let f = RuleSampler::new(2, 2..=2, 3..=3, 1).next_rule();
        let shrunk = shrink_rule(&f, |r| r.norms().maxf >= 2);
        assert_eq!(shrunk.norms().maxf, 2);
        assert!(shrunk.images().iter().filter(|w| w.len() == 2).count() == 1);
    }

    #[test]
    fn suites_pass() {
        assert!(suite_distances(1).passed());
        assert!(suite_pseudometrics(1).passed());
        let r = suite_dillmaps(1, 30);
        assert!(r.passed(), "{}", r.render());
        let r = suite_theorems(1, 30);
        assert!(r.passed(), "{}", r.render());
    }

    #[test]
    fn failures_render_reproduction() {
        let rules = RuleSampler::new(2, 1..=1, 2..=3, 4).rules(3);
        let c = rule_check("always-fails", &rules, |_, _| Err("nope".into()));
        let report = SuiteReport {
            suite: "theorems",
            seed: 4,
            checks: vec![c],
        };
        let text = report.render();
        assert!(text.contains("FAIL\ttheorems/always-fails"));
        assert!(text.contains("reproduce: dill verify --suite theorems --seed 4"));
        assert!(text.contains("rule #0, shrunk"));
        // fully shrunk: every image has one letter
        assert!(text.contains("a -> ") && !text.contains("a -> aa"));
    }
}
