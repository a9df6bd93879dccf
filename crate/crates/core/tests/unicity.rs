use conjugate_core::unicity::{
    attack_deterministic, attack_probabilistic, deterministic_budget, is_pseudorandom,
    linear_complexity, probabilistic_budget, DetectorConfig, PlaintextSource,
};
use conjugate_core::{BitString, Error, SimRng};
use proptest::prelude::*;

// Shortest L such that some recurrence s_j = Σ c_i s_{j-i} (1 ≤ i ≤ L) holds for j ≥ L.
fn complexity_oracle(s: &[bool]) -> usize {
    let n = s.len();
    for l in 0..=n {
        for taps in 0..1usize << l {
            let fits = (l..n).all(|j| {
                (1..=l).fold(false, |acc, i| {
                    acc ^ ((taps >> (i - 1)) & 1 == 1 && s[j - i])
                }) == s[j]
            });
            if fits {
                return l;
            }
        }
    }
    n
}

#[test]
fn lfsr_has_maximal_period() {
    for l in 2..=10 {
        let src = PlaintextSource::new(l, 5).unwrap();
        let period = (1usize << l) - 1;
        let s = src.stream(2 * period + l);
        let first = (1..=period)
            .find(|&p| (0..period + l).all(|i| s.get(i) == s.get(i + p)))
            .unwrap();
        assert_eq!(first, period, "L={l}");
    }
}

#[test]
fn lfsr_streams_have_complexity_l() {
    for l in 2..=16 {
        let src = PlaintextSource::new(l, 99).unwrap();
        assert_eq!(linear_complexity(&src.stream(4 * l)), l);
    }
}

#[test]
fn random_strings_are_never_flagged() {
    let cfg = DetectorConfig::new(64, 8).unwrap();
    let mut rng = SimRng::from_seed(41);
    let flagged = (0..1000)
        .filter(|_| is_pseudorandom(&rng.bits(64), &cfg).unwrap())
        .count();
    assert_eq!(flagged, 0);
}

#[test]
fn short_budget_is_reported() {
    let cfg = DetectorConfig::new(64, 8).unwrap();
    let rng = SimRng::from_seed(42);
    assert!(matches!(
        attack_deterministic(4, &cfg, deterministic_budget(4, 64) - 1, &rng),
        Err(Error::BudgetExhausted { .. })
    ));
    assert!(matches!(
        attack_probabilistic(2, &cfg, probabilistic_budget(2, 64) - 1, &rng),
        Err(Error::BudgetExhausted { .. })
    ));
}

#[test]
fn attacks_recover_the_key_at_exact_budget() {
    let cfg = DetectorConfig::new(64, 8).unwrap();
    for seed in 0..10 {
        let rng = SimRng::from_seed(seed);
        let rep = attack_deterministic(4, &cfg, deterministic_budget(4, 64), &rng).unwrap();
        assert!(rep.success);
        assert_eq!(rep.qubits_consumed, 2 * 4 * 64);
        let rep = attack_probabilistic(2, &cfg, probabilistic_budget(2, 64), &rng).unwrap();
        assert!(rep.success);
        assert_eq!(rep.qubits_consumed, 2 * 4 * 64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn berlekamp_massey_matches_brute_force(bits in prop::collection::vec(any::<bool>(), 0..12)) {
        let expected = complexity_oracle(&bits);
        prop_assert_eq!(linear_complexity(&BitString::new(bits)), expected);
    }
}
