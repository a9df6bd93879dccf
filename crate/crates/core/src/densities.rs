//! Exact mixed states of the scheme: Eve's view `ρ_b^k` of a one-bit ciphertext, the
//! auxiliary `σ_b^k` states, the Hadamard-mixing channel linking them, multi-bit plaintext
//! ciphers and the receiver/eavesdropper ensembles.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::linalg::{kron, kron_vec, re, ComplexMatrix, DensityOperator, C64, FULL_EIGEN_CAP};
use crate::scheme::{basis_state, Key, ParityString};

/// Largest key length accepted by the single-bit density builders (`2^8 = 256`).
pub const MAX_K: usize = FULL_EIGEN_CAP.trailing_zeros() as usize;
/// Largest total qubit count for tensor-product builders (`2^12`).
pub const MAX_QUBITS: usize = crate::linalg::DEFAULT_DIM_CAP.trailing_zeros() as usize;

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k > MAX_K {
        return Err(Error::DimensionCap {
            dim: 1 << k.min(63),
            cap: FULL_EIGEN_CAP,
        });
    }
    Ok(())
}

fn check_qubits(total: usize) -> Result<()> {
    if total > MAX_QUBITS {
        return Err(Error::DimensionCap {
            dim: 1 << total.min(63),
            cap: 1 << MAX_QUBITS,
        });
    }
    Ok(())
}

/// Adds `|v⟩⟨v|` into `acc`.
fn accumulate_projector(acc: &mut ComplexMatrix, v: &[C64]) {
    let d = v.len();
    for i in 0..d {
        if v[i] == re(0.0) {
            continue;
        }
        let vi = v[i];
        for j in 0..d {
            acc[(i, j)] += vi * v[j].conj();
        }
    }
}

fn encoded_vector(r: &BitString, s: &BitString) -> Vec<C64> {
    r.iter()
        .zip(s.iter())
        .fold(vec![re(1.0)], |acc, (bit, basis)| {
            kron_vec(&acc, &basis_state(bit, basis))
        })
}

/// `ρ_b^k`: uniform mixture of `|r⟩_s` over all keys `s` and all `r ∈ Ω_b^k`.
pub fn rho_b_direct(b: bool, k: usize) -> Result<DensityOperator> {
    check_k(k)?;
    let mut acc = ComplexMatrix::zeros(1 << k);
    let mut terms: u64 = 0;
    for s in BitString::enumerate(k) {
        for r in ParityString::enumerate_class(b, k) {
            accumulate_projector(&mut acc, &encoded_vector(r.bits(), &s));
            terms += 1;
        }
    }
    assert_eq!(terms, 1u64 << (2 * k - 1), "ρ normalization count");
    Ok(DensityOperator::from_mixture(acc.scale(1.0 / terms as f64)))
}

/// `ρ_b^k` via `ρ_0^k = (ρ_0^{k−1}⊗ρ_0^1 + ρ_1^{k−1}⊗ρ_1^1)/2` and
/// `ρ_1^k = (ρ_0^{k−1}⊗ρ_1^1 + ρ_1^{k−1}⊗ρ_0^1)/2`.
pub fn rho_b_recursive(b: bool, k: usize) -> Result<DensityOperator> {
    check_k(k)?;
    let base0 = rho_b_direct(false, 1)?;
    let base1 = rho_b_direct(true, 1)?;
    let (mut r0, mut r1) = (base0.clone(), base1.clone());
    for _ in 1..k {
        let n0 =
            (&kron(r0.matrix(), base0.matrix())? + &kron(r1.matrix(), base1.matrix())?).scale(0.5);
        let n1 =
            (&kron(r0.matrix(), base1.matrix())? + &kron(r1.matrix(), base0.matrix())?).scale(0.5);
        r0 = DensityOperator::from_mixture(n0);
        r1 = DensityOperator::from_mixture(n1);
    }
    Ok(if b { r1 } else { r0 })
}

/// `|φ_0⟩ = |+⟩`, `|φ_1⟩ = |1⟩`.
pub fn phi_state(i: bool) -> [C64; 2] {
    if i {
        basis_state(true, false)
    } else {
        basis_state(false, true)
    }
}

/// `σ_b^k`: uniform mixture of `|φ_{i_1}⟩…|φ_{i_k}⟩` over index strings of parity `b`.
pub fn sigma_b(b: bool, k: usize) -> Result<DensityOperator> {
    check_k(k)?;
    let mut acc = ComplexMatrix::zeros(1 << k);
    let mut terms: u64 = 0;
    for i in ParityString::enumerate_class(b, k) {
        let v = i
            .bits()
            .iter()
            .fold(vec![re(1.0)], |acc, bit| kron_vec(&acc, &phi_state(bit)));
        accumulate_projector(&mut acc, &v);
        terms += 1;
    }
    assert_eq!(terms, 1u64 << (k - 1), "σ normalization count");
    Ok(DensityOperator::from_mixture(acc.scale(1.0 / terms as f64)))
}

fn hadamard_power(on: bool) -> ComplexMatrix {
    if on {
        ComplexMatrix::from_real_rows(&[
            &[FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        ])
        .expect("2x2")
    } else {
        ComplexMatrix::identity(2)
    }
}

/// Operation elements `U_i = (√2/2)^k H^{i_1} ⊗ … ⊗ H^{i_k}`, `i ∈ {0,1}^k`.
pub fn hadamard_mixing_kraus(k: usize) -> Result<Vec<ComplexMatrix>> {
    check_k(k)?;
    let weight = FRAC_1_SQRT_2.powi(k as i32);
    BitString::enumerate(k)
        .map(|i| {
            let mut op = ComplexMatrix::identity(1);
            for bit in i.iter() {
                op = kron(&op, &hadamard_power(bit))?;
            }
            Ok(op.scale(weight))
        })
        .collect()
}

/// Largest entry of `Σ_i U_i† U_i − I`.
pub fn kraus_completeness_error(ops: &[ComplexMatrix]) -> Result<f64> {
    let dim = ops
        .first()
        .map(ComplexMatrix::dim)
        .ok_or_else(|| Error::InvalidParameter("empty Kraus set".into()))?;
    let mut sum = ComplexMatrix::zeros(dim);
    for op in ops {
        sum = sum.try_add(&op.adjoint().matmul(op)?)?;
    }
    Ok(sum.max_abs_diff(&ComplexMatrix::identity(dim)))
}

/// `Σ_i A_i ρ A_i†`.
pub fn apply_kraus(ops: &[ComplexMatrix], input: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(input.dim());
    for op in ops {
        out = out.try_add(&op.matmul(input)?.matmul(&op.adjoint())?)?;
    }
    Ok(out)
}

/// The trace-preserving Hadamard-mixing channel on `k` qubits.
pub fn hadamard_mixing_channel(input: &DensityOperator, k: usize) -> Result<DensityOperator> {
    check_k(k)?;
    if input.dim() != 1 << k {
        return Err(Error::DimensionMismatch {
            left: input.dim(),
            right: 1 << k,
        });
    }
    let ops = hadamard_mixing_kraus(k)?;
    let out = apply_kraus(&ops, input.matrix())?;
    debug_assert!((out.trace().re - 1.0).abs() < 1e-12);
    Ok(DensityOperator::from_mixture(out))
}

/// Eve's view of the encryption of a fixed plaintext `x`: `⊗_i ρ_{x_i}^k`.
pub fn plaintext_density(x: &BitString, k: usize) -> Result<DensityOperator> {
    check_k(k)?;
    if x.is_empty() {
        return Err(Error::InvalidParameter(
            "plaintext must be non-empty".into(),
        ));
    }
    check_qubits(x.len() * k)?;
    let r0 = rho_b_direct(false, k)?;
    let r1 = rho_b_direct(true, k)?;
    let mut acc = ComplexMatrix::identity(1);
    for bit in x.iter() {
        acc = kron(&acc, if bit { r1.matrix() } else { r0.matrix() })?;
    }
    Ok(DensityOperator::from_mixture(acc))
}

/// A uniform ensemble together with the number of pure terms that were averaged.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub density: DensityOperator,
    pub terms: u128,
}

fn block_ensemble(keys: &[BitString], k: usize) -> (ComplexMatrix, u128) {
    let mut acc = ComplexMatrix::zeros(1 << k);
    let mut terms = 0u128;
    for s in keys {
        for m in [false, true] {
            for r in ParityString::enumerate_class(m, k) {
                accumulate_projector(&mut acc, &encoded_vector(r.bits(), s));
                terms += 1;
            }
        }
    }
    (acc, terms)
}

fn tensor_blocks(
    block: &ComplexMatrix,
    block_terms: u128,
    n: usize,
) -> Result<(ComplexMatrix, u128)> {
    let mut acc = ComplexMatrix::identity(1);
    let mut terms = 1u128;
    for _ in 0..n {
        acc = kron(&acc, block)?;
        terms *= block_terms;
    }
    Ok((acc, terms))
}

/// Bob's state for `n` blocks under one fixed key: average over every `m_i` and `r^{(i)}`.
pub fn receiver_ensemble_for_key(n: usize, key: &Key) -> Result<Ensemble> {
    let k = key.k();
    check_k(k)?;
    check_qubits(n * k)?;
    let (block, block_terms) = block_ensemble(std::slice::from_ref(key.bits()), k);
    let (acc, terms) = tensor_blocks(&block, block_terms, n)?;
    assert_eq!(terms, 1u128 << (n * k), "N_B = 2^(n·k)");
    Ok(Ensemble {
        density: DensityOperator::from_mixture(acc.scale(1.0 / terms as f64)),
        terms,
    })
}

/// Bob's ensemble, checked to be the same operator for every key.
pub fn receiver_ensemble(n: usize, k: usize) -> Result<Ensemble> {
    let mut keys = Key::enumerate(k);
    let first = receiver_ensemble_for_key(n, &keys.next().expect("k ≥ 1"))?;
    for key in keys {
        let other = receiver_ensemble_for_key(n, &key)?;
        let gap = other.density.matrix().max_abs_diff(first.density.matrix());
        if gap > 1e-12 {
            return Err(Error::InvalidDensity(format!(
                "receiver ensemble depends on the key (gap {gap:e})"
            )));
        }
    }
    Ok(first)
}

/// Eve's ensemble: additionally averaged over every key.
pub fn eve_ensemble(n: usize, k: usize) -> Result<Ensemble> {
    check_k(k)?;
    check_qubits(n * k)?;
    let keys: Vec<BitString> = BitString::enumerate(k).collect();
    let (block, block_terms) = block_ensemble(&keys, k);
    let (acc, terms) = tensor_blocks(&block, block_terms, n)?;
    assert_eq!(terms, 1u128 << (2 * k * n), "N_E = 2^(2k·n)");
    Ok(Ensemble {
        density: DensityOperator::from_mixture(acc.scale(1.0 / terms as f64)),
        terms,
    })
}

/// `(√2/2)^k`.
pub fn analytic_distance(k: usize) -> f64 {
    FRAC_1_SQRT_2.powi(k as i32)
}

/// `(sin π/4)^k`.
pub fn analytic_sigma_distance(k: usize) -> f64 {
    FRAC_PI_4.sin().powi(k as i32)
}
