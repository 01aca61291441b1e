use nilcover::baer::{baer_formula, compare, BaerEngine, BaerInput};
use nilcover::hall::witt_count;
use nilcover::lattice::AbelianType;
use proptest::prelude::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[test]
fn engine_matches_formula_on_full_grid() {
    let engine = BaerEngine::default();
    for c in 1..=5 {
        let n = witt_count(2, c + 1).unwrap() as usize;
        for r in 1..=12 {
            for s in 1..=12 {
                let input = BaerInput::new(r, s, c).unwrap();
                let cmp = compare(&engine, &input).unwrap();
                assert!(cmp.agree, "{input:?}: {cmp:?}");
                let d = gcd(r, s);
                let expected = if d == 1 { vec![] } else { vec![d; n] };
                assert_eq!(cmp.engine.invariants, expected, "{input:?}");
                assert_eq!(cmp.engine.free_rank, 0);
            }
        }
    }
}

#[test]
fn class_one_is_the_schur_multiplier() {
    let engine = BaerEngine::default();
    for r in 1..=12 {
        for s in 1..=12 {
            let got = engine.compute(&BaerInput::new(r, s, 1).unwrap()).unwrap();
            assert_eq!(got, AbelianType::from_cyclic_orders(&[gcd(r, s)]).unwrap());
        }
    }
}

#[test]
fn class_six_under_default_cap() {
    let engine = BaerEngine::default();
    let got = engine.compute(&BaerInput::new(6, 9, 6).unwrap()).unwrap();
    assert_eq!(got.invariants, vec![3; 18]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetric_in_r_and_s(r in 1u64..=30, s in 1u64..=30, c in 1u32..=4) {
        let engine = BaerEngine::default();
        let a = engine.compute(&BaerInput::new(r, s, c).unwrap()).unwrap();
        let b = engine.compute(&BaerInput::new(s, r, c).unwrap()).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a, baer_formula(&BaerInput::new(r, s, c).unwrap()).unwrap());
    }

    #[test]
    fn coprime_orders_give_trivial_invariant(a in 1u64..=40, b in 1u64..=40, c in 1u32..=3) {
        let (r, s) = (a / gcd(a, b), b / gcd(a, b));
        let engine = BaerEngine::default();
        prop_assert!(engine.compute(&BaerInput::new(r, s, c).unwrap()).unwrap().is_trivial());
    }
}
