use super::*;
use crate::dillmaps::named;
use crate::pseudometrics::sliding_estimate;
use crate::words::Alphabet;

fn word(a: &Alphabet, s: &str) -> Word {
    a.parse_word(s).unwrap()
}

#[test]
fn delta_norms_examples() {
    assert_eq!(delta_norms(&named::xor()).unwrap(), DeltaNorms { mind: 0, maxd: 1 });
    assert_eq!(
        delta_norms(&named::shift(Alphabet::binary())).unwrap(),
        DeltaNorms { mind: 0, maxd: 1 }
    );
    let id = named::identity_substitution(Alphabet::binary());
    assert_eq!(delta_norms(&id).unwrap(), DeltaNorms { mind: 1, maxd: 1 });
    assert!(matches!(
        delta_norms(&named::fibonacci()),
        Err(ClassifyError::NotUniform { .. })
    ));
}

#[test]
fn constancy() {
    let a = Alphabet::new("abc").unwrap();
    let c = named::constant(a.clone(), 2, word(&a, "c")).unwrap();
    assert_eq!(decide_constant(&c), Constancy::Constant { period: word(&a, "c") });

    for f in [named::xor(), named::fibonacci(), named::diamond_example()] {
        let Constancy::NotConstant { x, y, position } = decide_constant(&f) else {
            panic!("expected a nonconstant rule");
        };
        let (fx, fy) = (f.image_prefix(&x, position + 1), f.image_prefix(&y, position + 1));
        assert_ne!(fx[position], fy[position]);
        assert_eq!(fx[..position], fy[..position]);
    }
}

#[test]
fn constant_with_longer_period() {
    // every window maps into (ab)^∞ in phase
    let a = Alphabet::binary();
    let f = RuleTable::new(a.clone(), 1, vec![word(&a, "ab"), word(&a, "abab")]).unwrap();
    assert_eq!(decide_constant(&f), Constancy::Constant { period: word(&a, "ab") });
    let g = RuleTable::new(a.clone(), 1, vec![word(&a, "ab"), word(&a, "aba")]).unwrap();
    assert!(matches!(decide_constant(&g), Constancy::NotConstant { .. }));
}

#[test]
fn diamond_decisions() {
    assert_eq!(
        decide_diamond_uniform(&named::xor()),
        DiamondUniformity::DiamondUniform {
            mean: Rational::from_integer(1)
        }
    );
    assert_eq!(
        decide_diamond_uniform(&named::diamond_example()),
        DiamondUniformity::DiamondUniform {
            mean: Rational::from_integer(2)
        }
    );
    let DiamondUniformity::NotDiamondUniform {
        min_mean,
        max_mean,
        min_cycle,
        max_cycle,
    } = decide_diamond_uniform(&named::doubling_ones())
    else {
        panic!("doubling is not diamond-uniform");
    };
    assert_eq!(
        (min_mean, max_mean),
        (Rational::from_integer(1), Rational::from_integer(2))
    );
    assert_eq!((min_cycle.edges, max_cycle.edges), (vec![0], vec![1]));
}

#[test]
fn witnesses_from_self_loops() {
    let f = named::doubling_ones();
    let g = DeBruijnGraph::from_rule(&f);
    let loop0 = Cycle {
        base: 0,
        edges: vec![0],
        weight: g.weight(0),
    };
    let loop1 = Cycle {
        base: 0,
        edges: vec![1],
        weight: g.weight(1),
    };
    let w = witness_pair(&f, &loop0, &loop1).unwrap();
    let a = f.alphabet();
    assert_eq!((a.render(&w.u), a.render(&w.v), w.alpha), ("0".into(), "1".into(), -1));
    assert!(w.verify(&f));

    let fib = named::fibonacci();
    let la = Cycle {
        base: 0,
        edges: vec![0],
        weight: 2,
    };
    let lb = Cycle {
        base: 0,
        edges: vec![1],
        weight: 1,
    };
    let w = witness_pair(&fib, &la, &lb).unwrap();
    assert_eq!(
        (fib.alphabet().render(&w.u), fib.alphabet().render(&w.v), w.alpha),
        ("a".into(), "b".into(), 1)
    );

    assert!(matches!(
        witness_pair(&f, &loop0, &loop0),
        Err(ClassifyError::EqualMeans(_))
    ));
}

#[test]
fn separating_literal_form() {
    let f = named::doubling_ones();
    let a = f.alphabet().clone();
    let w = Witness {
        u: word(&a, "0"),
        v: word(&a, "1"),
        alpha: -1,
        overlap: 0,
    };
    let one = ConfigGenerator::Periodic(word(&a, "1"));
    let zero = ConfigGenerator::Periodic(word(&a, "0"));
    let (z, wz) = separating_configs(&f, &w, one, zero).unwrap();
    assert_eq!(a.render(&z.prefix(19)), "1101110011110001111");
    assert_eq!(a.render(&wz.prefix(19)), "0100110001110000111");

    // input estimates shrink with the window
    let ests: Vec<Rational> = [8, 32, 128]
        .iter()
        .map(|&l| {
            sliding_estimate::<Rational>(crate::pseudometrics::BaseDistance::Levenshtein, &z, &wz, l, 4 * l).value
        })
        .collect();
    assert!(ests[0] > ests[1] && ests[1] > ests[2], "{ests:?}");

    let zero_defect = Witness { alpha: 0, ..w.clone() };
    assert!(matches!(
        separating_configs(&f, &zero_defect, z.clone(), z.clone()),
        Err(ClassifyError::ZeroDefect)
    ));
}

#[test]
fn weyl_h_verdicts() {
    assert_eq!(
        verdict_weyl_h(&named::xor()).outcome,
        Outcome::WellDefined(WellDefinedReason::Uniform)
    );
    let a = Alphabet::binary();
    let c = named::constant(a.clone(), 1, word(&a, "b")).unwrap();
    assert!(verdict_weyl_h(&c).is_well_defined());
    for f in [named::fibonacci(), named::diamond_example(), named::doubling_ones()] {
        let v = verdict_weyl_h(&f);
        let Outcome::NotWellDefinedH(e) = &v.outcome else {
            panic!("expected NotWellDefined");
        };
        for ell in [64, 256] {
            let input =
                sliding_estimate::<Rational>(crate::pseudometrics::BaseDistance::Hamming, &e.x, &e.y, ell, 4 * ell);
            let image = sliding_estimate::<Rational>(
                crate::pseudometrics::BaseDistance::Hamming,
                &f.apply(&e.x),
                &f.apply(&e.y),
                ell,
                4 * ell,
            );
            assert!(input.value <= Rational::new(e.agree_from as i64, ell as i64));
            assert!(image.value >= e.image_density() - Rational::new(1, ell as i64));
            assert!(input.value < image.value);
        }
    }
}

#[test]
fn weyl_l_verdicts() {
    let budget = SamplingBudget::default();
    assert!(verdict_weyl_l(&named::xor(), &budget).is_well_defined());
    assert_eq!(
        verdict_weyl_l(&named::diamond_example(), &budget).outcome,
        Outcome::WellDefined(WellDefinedReason::DiamondUniform {
            mean: Rational::from_integer(2)
        })
    );
    for f in [named::doubling_ones(), named::fibonacci()] {
        let v = verdict_weyl_l(&f, &budget);
        let Outcome::NotWellDefinedL(e) = &v.outcome else {
            panic!("expected NotWellDefined, got {}", v.label());
        };
        assert!(e.witness.verify(&f));
        assert!(e.image_ladder.entries.last().unwrap().exact() > separation_threshold());
    }
}

#[test]
fn defect_bound() {
    assert_eq!(length_defect_bound(&named::xor()).unwrap(), 0);
    assert!(length_defect_bound(&named::diamond_example()).unwrap() >= 2);
    assert_eq!(
        length_defect_bound(&named::fibonacci()),
        Err(ClassifyError::NotDiamondUniform)
    );
}
