use conjugate_core::attacks::{breidbart_povm, outcome_distribution};
use conjugate_core::densities::{
    analytic_distance, apply_kraus, eve_ensemble, hadamard_mixing_kraus, plaintext_density,
    receiver_ensemble, receiver_ensemble_for_key, rho_b_direct, sigma_b,
};
use conjugate_core::linalg::{c, kron, trace_distance, C64};
use conjugate_core::scheme::Key;
use conjugate_core::{BitString, ComplexMatrix, DensityOperator, SimRng};
use proptest::prelude::*;

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn qubit(bit: bool, hadamard: bool) -> [C64; 2] {
    match (hadamard, bit) {
        (false, false) => [c(1.0, 0.0), c(0.0, 0.0)],
        (false, true) => [c(0.0, 0.0), c(1.0, 0.0)],
        (true, false) => [c(S, 0.0), c(S, 0.0)],
        (true, true) => [c(S, 0.0), c(-S, 0.0)],
    }
}

// Amplitude of basis index x is the product of per-qubit amplitudes.
fn product_vector(qs: &[[C64; 2]]) -> Vec<C64> {
    let k = qs.len();
    (0..1usize << k)
        .map(|x| (0..k).fold(c(1.0, 0.0), |acc, j| acc * qs[j][(x >> (k - 1 - j)) & 1]))
        .collect()
}

fn projector_sum(vectors: &[Vec<C64>]) -> Vec<C64> {
    let dim = vectors[0].len();
    let mut m = vec![c(0.0, 0.0); dim * dim];
    for v in vectors {
        for i in 0..dim {
            for j in 0..dim {
                m[i * dim + j] += v[i] * v[j].conj();
            }
        }
    }
    let n = vectors.len() as f64;
    m.iter().map(|x| x / n).collect()
}

fn rho_oracle(b: bool, k: usize) -> Vec<C64> {
    let mut vs = Vec::new();
    for s in 0..1usize << k {
        for r in 0..1usize << k {
            if (r.count_ones() % 2 == 1) != b {
                continue;
            }
            let qs: Vec<[C64; 2]> = (0..k)
                .map(|j| qubit((r >> j) & 1 == 1, (s >> j) & 1 == 1))
                .collect();
            vs.push(product_vector(&qs));
        }
    }
    projector_sum(&vs)
}

fn max_gap(a: &ComplexMatrix, b: &[C64]) -> f64 {
    a.entries()
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn rho_matches_enumeration_oracle() {
    for k in 1..=5 {
        for b in [false, true] {
            let gap = max_gap(rho_b_direct(b, k).unwrap().matrix(), &rho_oracle(b, k));
            assert!(gap < 1e-13, "k={k} b={b} gap={gap}");
        }
    }
}

#[test]
fn difference_factorizes_into_single_qubit_differences() {
    let d1 = rho_b_direct(false, 1)
        .unwrap()
        .matrix()
        .try_sub(rho_b_direct(true, 1).unwrap().matrix())
        .unwrap();
    let mut tensor = d1.clone();
    for k in 2..=6 {
        tensor = kron(&tensor, &d1).unwrap();
        let diff = rho_b_direct(false, k)
            .unwrap()
            .matrix()
            .try_sub(rho_b_direct(true, k).unwrap().matrix())
            .unwrap();
        let expected = tensor.scale(1.0 / f64::powi(2.0, k as i32 - 1));
        assert!(diff.max_abs_diff(&expected) < 1e-13);
    }
}

#[test]
fn rho_average_is_maximally_mixed() {
    for k in 1..=5 {
        let avg = (rho_b_direct(false, k).unwrap().matrix()
            + rho_b_direct(true, k).unwrap().matrix())
        .scale(0.5);
        let mixed = DensityOperator::maximally_mixed(1 << k);
        assert!(avg.max_abs_diff(mixed.matrix()) < 1e-13);
    }
}

#[test]
fn sigma_states_match_oracle() {
    let phi = |bit: bool| {
        if bit {
            qubit(true, false)
        } else {
            qubit(false, true)
        }
    };
    for k in 1..=4 {
        for b in [false, true] {
            let vs: Vec<Vec<C64>> = (0..1usize << k)
                .filter(|i| (i.count_ones() % 2 == 1) == b)
                .map(|i| {
                    let qs: Vec<[C64; 2]> = (0..k).map(|j| phi((i >> j) & 1 == 1)).collect();
                    product_vector(&qs)
                })
                .collect();
            let gap = max_gap(sigma_b(b, k).unwrap().matrix(), &projector_sum(&vs));
            assert!(gap < 1e-13);
        }
    }
}

#[test]
fn kraus_channel_preserves_trace_of_random_inputs() {
    let mut rng = SimRng::from_seed(3);
    let ops = hadamard_mixing_kraus(3).unwrap();
    for _ in 0..10 {
        let v: Vec<C64> = (0..8)
            .map(|_| c(rng.uniform() - 0.5, rng.uniform() - 0.5))
            .collect();
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = v.iter().map(|x| x / norm).collect();
        let out = apply_kraus(&ops, &ComplexMatrix::outer(&v)).unwrap();
        assert!((out.trace().re - 1.0).abs() < 1e-13);
        assert!(out.hermitian_asymmetry() < 1e-13);
    }
}

#[test]
fn two_bit_plaintext_distances() {
    // For per-bit encryption the blocks are independent and
    // D(ρ_x ⊗ ρ_y, ρ_x' ⊗ ρ_y') follows from the single-block eigenvalues.
    for k in 1..=3 {
        let zero = rho_b_direct(false, k).unwrap();
        let one = rho_b_direct(true, k).unwrap();
        let d00_11 = trace_distance(
            &plaintext_density(&"00".parse().unwrap(), k).unwrap(),
            &plaintext_density(&"11".parse().unwrap(), k).unwrap(),
        )
        .unwrap();
        let d00_01 = trace_distance(
            &plaintext_density(&"00".parse().unwrap(), k).unwrap(),
            &plaintext_density(&"01".parse().unwrap(), k).unwrap(),
        )
        .unwrap();
        let direct = trace_distance(&zero.kron(&zero).unwrap(), &one.kron(&one).unwrap()).unwrap();
        assert!((d00_11 - direct).abs() < 1e-12);
        // Changing one block is bounded by the single-block distance and attains it.
        assert!((d00_01 - analytic_distance(k)).abs() < 1e-12);
        assert!(d00_11 <= 2.0 * analytic_distance(k) + 1e-12);
    }
}

#[test]
fn ensembles_have_expected_term_counts_and_are_maximally_mixed() {
    for (n, k) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let eve = eve_ensemble(n, k).unwrap();
        assert_eq!(eve.terms, 1u128 << (2 * k * n));
        let mixed = DensityOperator::maximally_mixed(1 << (k * n));
        assert!(eve.density.matrix().max_abs_diff(mixed.matrix()) < 1e-13);
        for key in Key::enumerate(k) {
            let bob = receiver_ensemble_for_key(n, &key).unwrap();
            assert_eq!(bob.terms, 1u128 << (n * k));
            assert!(bob.density.matrix().max_abs_diff(mixed.matrix()) < 1e-13);
        }
        assert!(receiver_ensemble(n, k).is_ok());
    }
}

#[test]
fn breidbart_distribution_matches_per_qubit_oracle() {
    // Per qubit, the rotated basis gives outcome 0 with cos²(π/8) on |0>,|+> and sin²(π/8)
    // on |1>,|->; averaging over s and r reproduces the POVM distribution.
    let c2 = (std::f64::consts::FRAC_PI_8).cos().powi(2);
    for k in 1..=4 {
        let povm = breidbart_povm(k).unwrap();
        for b in [false, true] {
            let dist = outcome_distribution(&rho_b_direct(b, k).unwrap(), &povm).unwrap();
            let class: Vec<usize> = (0..1usize << k)
                .filter(|r| (r.count_ones() % 2 == 1) == b)
                .collect();
            for out in BitString::enumerate(k) {
                let mut p = 0.0;
                for &r in &class {
                    let mut q = 1.0;
                    for j in 0..k {
                        let rj = (r >> (k - 1 - j)) & 1 == 1;
                        q *= if rj != out.get(j) { 1.0 - c2 } else { c2 };
                    }
                    p += q;
                }
                p /= class.len() as f64;
                assert!((dist.prob(&out) - p).abs() < 1e-13);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn channel_is_contractive(seed in any::<u64>(), k in 1usize..=3) {
        let mut rng = SimRng::from_seed(seed);
        let dim = 1 << k;
        let mut random_density = || {
            let g: Vec<C64> = (0..dim * dim)
                .map(|_| c(rng.uniform() - 0.5, rng.uniform() - 0.5))
                .collect();
            let g = ComplexMatrix::from_vec(g).unwrap();
            let p = g.matmul(&g.adjoint()).unwrap();
            let t = p.trace().re;
            DensityOperator::new(p.scale(1.0 / t)).unwrap()
        };
        let a = random_density();
        let b = random_density();
        let ops = hadamard_mixing_kraus(k).unwrap();
        let ea = DensityOperator::new(apply_kraus(&ops, a.matrix()).unwrap()).unwrap();
        let eb = DensityOperator::new(apply_kraus(&ops, b.matrix()).unwrap()).unwrap();
        prop_assert!(
            trace_distance(&ea, &eb).unwrap() <= trace_distance(&a, &b).unwrap() + 1e-12
        );
    }
}
