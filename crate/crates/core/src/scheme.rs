//! The conjugate-coding probabilistic scheme and, for comparison, the deterministic
//! quantum private channel `|b⟩ → H^{s1} X^{s2} |b⟩`.
//!
//! A plaintext bit `m` is hidden in the parity of a random string `r ∈ Ω_m^k`; bit `r_j` is
//! sent in the basis selected by key bit `s_j` (0: computational, 1: Hadamard). Ciphertexts
//! are kept symbolically as (bit, basis) pairs and expanded to vectors only on demand.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::linalg::{kron_vec, re, DensityOperator, C64, DEFAULT_DIM_CAP};
use crate::rng::SimRng;

/// The shared private key `s = s_1 … s_k` (basis choices).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Key {
    bits: BitString,
}

impl Key {
    pub fn new(bits: BitString) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidParameter(
                "key length must be at least 1".into(),
            ));
        }
        Ok(Key { bits })
    }

    pub fn random(k: usize, rng: &mut SimRng) -> Result<Self> {
        Key::new(rng.bits(k))
    }

    pub fn k(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    /// All `2^k` keys in lexicographic order.
    pub fn enumerate(k: usize) -> impl Iterator<Item = Key> {
        BitString::enumerate(k).map(|bits| Key { bits })
    }
}

/// A member of the parity class `Ω_b^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParityString {
    bits: BitString,
}

impl ParityString {
    pub fn new(bits: BitString) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidParameter(
                "parity string must be non-empty".into(),
            ));
        }
        Ok(ParityString { bits })
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn parity(&self) -> bool {
        self.bits.parity()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Every member of `Ω_b^k`, lexicographically.
    pub fn enumerate_class(b: bool, k: usize) -> impl Iterator<Item = ParityString> {
        BitString::enumerate(k)
            .filter(move |r| r.parity() == b)
            .map(|bits| ParityString { bits })
    }
}

/// Uniform draw from `Ω_b^k`: `k − 1` free bits, the last one fixes the parity.
pub fn sample_parity_string(b: bool, k: usize, rng: &mut SimRng) -> Result<ParityString> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut bits = rng.bits(k - 1);
    let last = bits.parity() ^ b;
    bits.push(last);
    let r = ParityString { bits };
    assert_eq!(r.parity(), b);
    Ok(r)
}

/// One conjugate-coded qubit `|bit⟩_basis`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncodedQubit {
    pub bit: bool,
    pub basis: bool,
}

/// `|0⟩_0 = |0⟩, |1⟩_0 = |1⟩, |0⟩_1 = |+⟩, |1⟩_1 = |−⟩`.
pub fn basis_state(bit: bool, basis: bool) -> [C64; 2] {
    match (basis, bit) {
        (false, false) => [re(1.0), re(0.0)],
        (false, true) => [re(0.0), re(1.0)],
        (true, false) => [re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)],
        (true, true) => [re(FRAC_1_SQRT_2), re(-FRAC_1_SQRT_2)],
    }
}

fn overlap_sqr(a: &[C64; 2], b: &[C64; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr()
}

impl EncodedQubit {
    pub fn state_vector(&self) -> [C64; 2] {
        basis_state(self.bit, self.basis)
    }

    /// Born-rule probability of reading `1` when measuring in `basis`.
    pub fn prob_one(&self, basis: bool) -> f64 {
        overlap_sqr(&basis_state(true, basis), &self.state_vector())
    }

    /// Destructive measurement in `basis`.
    pub fn measure(self, basis: bool, rng: &mut SimRng) -> bool {
        let p = self.prob_one(basis);
        if p <= 1e-15 {
            false
        } else if p >= 1.0 - 1e-15 {
            true
        } else {
            rng.bernoulli(p)
        }
    }
}

/// `|r_1⟩_{s_1} ⊗ … ⊗ |r_k⟩_{s_k}` held symbolically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductState {
    qubits: Vec<EncodedQubit>,
}

impl ProductState {
    pub fn new(qubits: Vec<EncodedQubit>) -> Self {
        ProductState { qubits }
    }

    pub fn qubits(&self) -> &[EncodedQubit] {
        &self.qubits
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    /// Dense `2^k` amplitude vector.
    pub fn state_vector(&self) -> Result<Vec<C64>> {
        let dim = 1usize
            .checked_shl(self.qubits.len() as u32)
            .filter(|&d| d <= DEFAULT_DIM_CAP)
            .ok_or(Error::DimensionCap {
                dim: usize::MAX,
                cap: DEFAULT_DIM_CAP,
            })?;
        let v = self
            .qubits
            .iter()
            .fold(vec![re(1.0)], |acc, q| kron_vec(&acc, &q.state_vector()));
        debug_assert_eq!(v.len(), dim);
        Ok(v)
    }

    pub fn density(&self) -> Result<DensityOperator> {
        DensityOperator::pure(&self.state_vector()?)
    }

    /// Measures qubit `j` in basis `bases[j]`, consuming the state.
    pub fn measure(self, bases: &BitString, rng: &mut SimRng) -> Result<BitString> {
        if bases.len() != self.qubits.len() {
            return Err(Error::LengthMismatch {
                expected: self.qubits.len(),
                actual: bases.len(),
            });
        }
        Ok(self
            .qubits
            .into_iter()
            .zip(bases.iter())
            .map(|(q, basis)| q.measure(basis, rng))
            .collect())
    }
}

/// Prepares the ciphertext of plaintext bit `m` under key `s` with randomness `r ∈ Ω_m^k`.
pub fn encode_bit(m: bool, key: &Key, r: &ParityString) -> Result<ProductState> {
    if r.len() != key.k() {
        return Err(Error::LengthMismatch {
            expected: key.k(),
            actual: r.len(),
        });
    }
    if r.parity() != m {
        return Err(Error::ParityMismatch {
            expected: m as u8,
            actual: r.parity() as u8,
        });
    }
    Ok(ProductState::new(
        r.bits()
            .iter()
            .zip(key.bits().iter())
            .map(|(bit, basis)| EncodedQubit { bit, basis })
            .collect(),
    ))
}

/// Measures each qubit in the key's basis and returns the parity of the outcomes.
pub fn decrypt_bit(state: ProductState, key: &Key, rng: &mut SimRng) -> Result<bool> {
    Ok(state.measure(key.bits(), rng)?.parity())
}

pub fn encrypt_message(m: &BitString, key: &Key, rng: &mut SimRng) -> Result<Vec<ProductState>> {
    if m.is_empty() {
        return Err(Error::InvalidParameter("message must be non-empty".into()));
    }
    m.iter()
        .map(|bit| {
            let r = sample_parity_string(bit, key.k(), rng)?;
            encode_bit(bit, key, &r)
        })
        .collect()
}

pub fn decrypt_message(
    blocks: Vec<ProductState>,
    key: &Key,
    rng: &mut SimRng,
) -> Result<BitString> {
    blocks
        .into_iter()
        .map(|block| decrypt_bit(block, key, rng))
        .collect()
}

// Quantum private channel.

fn hadamard(v: [C64; 2]) -> [C64; 2] {
    [(v[0] + v[1]) * FRAC_1_SQRT_2, (v[0] - v[1]) * FRAC_1_SQRT_2]
}

fn pauli_x(v: [C64; 2]) -> [C64; 2] {
    [v[1], v[0]]
}

/// `H^{s1} X^{s2} |b⟩`.
pub fn qpc_encrypt(b: bool, s1: bool, s2: bool) -> [C64; 2] {
    let mut v = basis_state(b, false);
    if s2 {
        v = pauli_x(v);
    }
    if s1 {
        v = hadamard(v);
    }
    v
}

/// Undoes `H^{s1} X^{s2}` and measures in the computational basis. Deterministic for the
/// right key pair; a wrong pair yields Born-rule outcomes.
pub fn qpc_decrypt(state: [C64; 2], s1: bool, s2: bool, rng: &mut SimRng) -> bool {
    let mut v = state;
    if s1 {
        v = hadamard(v);
    }
    if s2 {
        v = pauli_x(v);
    }
    let p1 = v[1].norm_sqr() / (v[0].norm_sqr() + v[1].norm_sqr());
    if p1 <= 1e-15 {
        false
    } else if p1 >= 1.0 - 1e-15 {
        true
    } else {
        rng.bernoulli(p1)
    }
}

/// Key pair `j` of an even-length key: `(s_{2j}, s_{2j+1})`.
pub fn qpc_key_pair(key: &Key, j: usize) -> (bool, bool) {
    (key.bits().get(2 * j), key.bits().get(2 * j + 1))
}

/// Encrypts `k/2` plaintext bits, one per key pair.
pub fn qpc_encrypt_block(plain: &BitString, key: &Key) -> Result<Vec<[C64; 2]>> {
    if !key.k().is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "private-channel key length must be even, got {}",
            key.k()
        )));
    }
    if plain.len() != key.k() / 2 {
        return Err(Error::LengthMismatch {
            expected: key.k() / 2,
            actual: plain.len(),
        });
    }
    Ok(plain
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let (s1, s2) = qpc_key_pair(key, j);
            qpc_encrypt(b, s1, s2)
        })
        .collect())
}

pub fn qpc_decrypt_block(block: &[[C64; 2]], key: &Key, rng: &mut SimRng) -> Result<BitString> {
    if !key.k().is_multiple_of(2) || block.len() != key.k() / 2 {
        return Err(Error::LengthMismatch {
            expected: key.k() / 2,
            actual: block.len(),
        });
    }
    Ok(block
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let (s1, s2) = qpc_key_pair(key, j);
            qpc_decrypt(v, s1, s2, rng)
        })
        .collect())
}
