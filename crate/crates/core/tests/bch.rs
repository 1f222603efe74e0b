mod common;

use common::{bits_to_mask, gf2_rem, mask_to_bits, min_weight};
use pufkit_core::bch::{default_catalog, DecodeOutcome};
use pufkit_core::{BchCode, BitVector};
use proptest::prelude::*;

#[test]
fn generators_divide_x_n_plus_one_and_reach_design_distance() {
    for (n, k, t) in [(15, 7, 2), (15, 5, 3), (31, 16, 3), (31, 11, 5), (63, 45, 3)] {
        let code = BchCode::new(n, k, t).unwrap();
        let g = bits_to_mask(code.generator());
        assert_eq!(127 - g.leading_zeros() as usize, n - k, "deg g for ({n},{k},{t})");
        let x_n_plus_1 = (1u128 << n) | 1;
        assert_eq!(gf2_rem(x_n_plus_1, g), 0, "g | x^n + 1 for ({n},{k},{t})");
        if k <= 16 {
            assert!(min_weight(g, k) as usize >= 2 * t + 1, "distance of ({n},{k},{t})");
        }
    }
}

#[test]
fn small_code_generator_is_known_polynomial() {
    // x^8 + x^7 + x^6 + x^4 + 1
    let code = BchCode::new(15, 7, 2).unwrap();
    assert_eq!(bits_to_mask(code.generator()), 0b1_1101_0001);
}

#[test]
fn syndrome_is_remainder_mod_generator() {
    let code = BchCode::new(31, 16, 3).unwrap();
    let g = bits_to_mask(code.generator());
    for r in [1u128, 0x7fff_ffff, 0x1234_5678, 1 << 30] {
        let rem = gf2_rem(r, g);
        let syn = code.gen_syndrome(&mask_to_bits(r, 31)).unwrap();
        assert_eq!(bits_to_mask(syn.bits()), rem);
    }
}

#[test]
fn catalog_codes_construct() {
    for p in default_catalog() {
        let code = BchCode::from_params(p).unwrap();
        assert_eq!(code.generator().len(), p.n - p.k + 1);
    }
}

#[test]
fn invalid_parameters_rejected() {
    assert!(BchCode::new(64, 16, 11).is_err());
    assert!(BchCode::new(63, 17, 11).is_err());
    assert!(BchCode::new(2047, 1013, 102).is_err());
}

fn errors_strategy(n: usize, max: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::btree_set(0..n, 0..=max).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn corrects_up_to_t(word in proptest::collection::vec(any::<bool>(), 63), errs in errors_strategy(63, 11)) {
        let code = BchCode::new(63, 16, 11).unwrap();
        let r = BitVector::from_bools(word);
        let helper = code.gen_syndrome(&r).unwrap();
        let mut noisy = r.clone();
        for &i in &errs {
            noisy.flip(i);
        }
        match code.decode_syndrome(&noisy, &helper).unwrap() {
            DecodeOutcome::Corrected { word, errors } => {
                prop_assert_eq!(word, r);
                prop_assert_eq!(errors, errs.len());
            }
            DecodeOutcome::Failed(f) => prop_assert!(false, "decode failed: {:?}", f),
        }
    }

    #[test]
    fn beyond_t_never_claims_original(word in proptest::collection::vec(any::<bool>(), 15), errs in proptest::collection::btree_set(0..15usize, 3..=7)) {
        let code = BchCode::new(15, 7, 2).unwrap();
        let r = BitVector::from_bools(word);
        let helper = code.gen_syndrome(&r).unwrap();
        let mut noisy = r.clone();
        for &i in &errs {
            noisy.flip(i);
        }
        if let DecodeOutcome::Corrected { word, errors } = code.decode_syndrome(&noisy, &helper).unwrap() {
            prop_assert_ne!(word.clone(), r);
            prop_assert!(errors <= 2);
            prop_assert_eq!(code.gen_syndrome(&word).unwrap(), helper);
        }
    }
}
