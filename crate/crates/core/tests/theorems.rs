use dill::classify::lipschitz::{lemma_lev_check, lemma_lip_h_check, lipschitz_check};
use dill::classify::Space;
use dill::dillmaps::named;
use dill::proptests::{
    random_config, suite_dillmaps, suite_distances, suite_pseudometrics, suite_theorems, RuleSampler,
};
use dill::pseudometrics::OffsetPolicy;
use dill::words::{Alphabet, ConfigGenerator};
use dill::Rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn suites_pass_on_several_seeds() {
    for seed in [0, 1, 2] {
        for report in [
            suite_distances(seed),
            suite_pseudometrics(seed),
            suite_dillmaps(seed, 100),
            suite_theorems(seed, 100),
        ] {
            assert!(report.passed(), "{}", report.render());
        }
    }
}

#[test]
fn suites_are_deterministic() {
    assert_eq!(suite_theorems(11, 20), suite_theorems(11, 20));
    assert_eq!(
        RuleSampler::new(2, 2..=2, 1..=3, 11).rules(10),
        RuleSampler::new(2, 2..=2, 1..=3, 11).rules(10)
    );
}

#[test]
fn lemma_lev_on_fibonacci() {
    let r = lemma_lev_check(&named::fibonacci(), 7);
    assert!(r.violations.is_empty());
    // unordered pairs, both sides being symmetric in (u, v)
    let expected: u64 = (0..=7u32).map(|n| (1u64 << n) * ((1u64 << n) + 1) / 2).sum();
    assert_eq!(r.pairs_checked, expected);
}

#[test]
fn lemma_lip_on_random_xor_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pairs: Vec<_> = (0..6)
        .map(|_| (random_config(&mut rng, 2), random_config(&mut rng, 2)))
        .collect();
    let windows: Vec<usize> = (1..=256).step_by(5).collect();
    let offsets: Vec<usize> = (0..=64).collect();
    for f in [named::xor(), named::shift(Alphabet::binary())] {
        let r = lemma_lip_h_check(&f, &pairs, &windows, &offsets).unwrap();
        assert!(r.lemma_violations.is_empty() && r.proposition_violations.is_empty());
    }
}

#[test]
fn identical_pairs_have_zero_estimates() {
    let a = Alphabet::binary();
    let x = ConfigGenerator::Periodic(a.parse_word("abb").unwrap());
    let pairs = vec![(x.clone(), x)];
    for (f, space) in [(named::xor(), Space::WeylH), (named::diamond_example(), Space::WeylL)] {
        let r = lipschitz_check(&f, &pairs, &[4, 16], &OffsetPolicy::default(), space).unwrap();
        for row in &r.rows {
            assert_eq!(row.image.value, Rational::from_integer(0));
            assert_eq!(row.input.as_ref().unwrap().value, Rational::from_integer(0));
        }
    }
}
