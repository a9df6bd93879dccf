use conjugate_core::nosignal::{
    alice_measure, bell_pair, eve_marginal, reduced_first, reduced_second,
};
use conjugate_core::scheme::{
    decrypt_message, encode_bit, encrypt_message, qpc_decrypt_block, qpc_encrypt_block,
    sample_parity_string, Key, ParityString,
};
use conjugate_core::{BitString, DensityOperator, Error, SimRng};
use proptest::prelude::*;

#[test]
fn parity_mismatch_is_rejected() {
    let key = Key::new("01".parse().unwrap()).unwrap();
    let r = ParityString::new("11".parse().unwrap()).unwrap();
    assert!(matches!(
        encode_bit(true, &key, &r),
        Err(Error::ParityMismatch { .. })
    ));
}

#[test]
fn wrong_key_decryption_is_close_to_a_coin_flip() {
    let mut rng = SimRng::from_seed(21);
    let k = 6;
    let trials = 20_000;
    let mut agree = 0;
    for _ in 0..trials {
        let key = Key::random(k, &mut rng).unwrap();
        let other = Key::random(k, &mut rng).unwrap();
        if other == key {
            continue;
        }
        let m = rng.bits(1);
        let c = encrypt_message(&m, &key, &mut rng).unwrap();
        agree += (decrypt_message(c, &other, &mut rng).unwrap() == m) as usize;
    }
    let rate = agree as f64 / trials as f64;
    assert!((rate - 0.5).abs() < 0.03, "rate {rate}");
}

#[test]
fn parity_strings_are_uniform_within_class() {
    let mut rng = SimRng::from_seed(22);
    let k = 3;
    let trials = 40_000;
    let mut counts = [0usize; 8];
    for _ in 0..trials {
        let r = sample_parity_string(true, k, &mut rng).unwrap();
        counts[r.bits().to_index()] += 1;
    }
    let p = 0.25;
    let tol = 3.0 * (p * (1.0 - p) / trials as f64).sqrt();
    for (i, &n) in counts.iter().enumerate() {
        let expected = if (i as u32).count_ones() % 2 == 1 {
            p
        } else {
            0.0
        };
        assert!((n as f64 / trials as f64 - expected).abs() <= tol);
    }
}

#[test]
fn bell_pair_marginals_are_maximally_mixed() {
    let psi = bell_pair();
    let mixed = DensityOperator::maximally_mixed(2);
    assert!(reduced_first(&psi).max_abs_diff(mixed.matrix()) < 1e-15);
    assert!(reduced_second(&psi).max_abs_diff(mixed.matrix()) < 1e-15);
    for b in [false, true] {
        assert!(eve_marginal(b).matrix().max_abs_diff(mixed.matrix()) < 1e-15);
    }
}

#[test]
fn alice_outcomes_are_fair() {
    let mut rng = SimRng::from_seed(23);
    let trials = 100_000;
    for b in [false, true] {
        let ones = (0..trials)
            .filter(|_| alice_measure(b, &mut rng).alice_outcome)
            .count();
        let tol = 3.0 * 0.5 / (trials as f64).sqrt();
        assert!((ones as f64 / trials as f64 - 0.5).abs() <= tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encryption_round_trips(
        seed in any::<u64>(),
        k in 1usize..=8,
        msg in prop::collection::vec(any::<bool>(), 1..16),
    ) {
        let mut rng = SimRng::from_seed(seed);
        let key = Key::random(k, &mut rng).unwrap();
        let m = BitString::new(msg);
        let c = encrypt_message(&m, &key, &mut rng).unwrap();
        prop_assert_eq!(decrypt_message(c, &key, &mut rng).unwrap(), m);
    }

    #[test]
    fn qpc_round_trips(seed in any::<u64>(), half in 1usize..=8) {
        let mut rng = SimRng::from_seed(seed);
        let key = Key::random(2 * half, &mut rng).unwrap();
        let plain = rng.bits(half);
        let block = qpc_encrypt_block(&plain, &key).unwrap();
        prop_assert_eq!(qpc_decrypt_block(&block, &key, &mut rng).unwrap(), plain);
    }
}
