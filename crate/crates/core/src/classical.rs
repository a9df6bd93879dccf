//! Classical private-key encryption with a probabilistic wrapper.
//!
//! Before encrypting block `m_i` with the base cipher, the sender applies a randomly chosen
//! invertible transform `H_λ`, `λ ∈ {1..l}`. The receiver decrypts, tries all `l` inverses
//! and keeps the candidate that carries valid redundancy (a CRC appended to each block).

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SimRng};

const TRANSFORM_SEED: u64 = 0x4854_5241_4e53_464d;
const PAD_SEED: u64 = 0x5041_445f_5845_4f52;

/// Index `λ` into a family of `l` transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransformIndex {
    lambda: usize,
    l: usize,
}

impl TransformIndex {
    pub fn new(lambda: usize, l: usize) -> Result<Self> {
        if l == 0 || lambda == 0 || lambda > l {
            return Err(Error::InvalidParameter(format!(
                "transform index {lambda} outside 1..={l}"
            )));
        }
        Ok(TransformIndex { lambda, l })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn family_size(&self) -> usize {
        self.l
    }

    fn round_value(&self, round: usize, half: u64, width: usize) -> u64 {
        let seed = derive_seed(
            TRANSFORM_SEED,
            "feistel",
            (self.lambda as u64) << 8 | round as u64,
        );
        let mixed = derive_seed(seed, "f", half);
        if width == 64 {
            mixed
        } else {
            mixed & ((1u64 << width) - 1)
        }
    }
}

const FEISTEL_ROUNDS: usize = 4;

fn to_u64(bits: &BitString) -> u64 {
    bits.iter().fold(0, |acc, b| (acc << 1) | b as u64)
}

fn from_u64(v: u64, width: usize) -> BitString {
    (0..width)
        .map(|j| (v >> (width - 1 - j)) & 1 == 1)
        .collect()
}

fn check_block(block: &BitString) {
    assert!(
        block.len().is_multiple_of(2) && block.len() <= 128,
        "transform blocks have even length ≤ 128, got {}",
        block.len()
    );
}

/// `H_λ`: a balanced Feistel permutation of `{0,1}^k` keyed by `λ`; `λ = 1` is the identity.
pub fn h_transform(idx: TransformIndex, block: &BitString) -> BitString {
    check_block(block);
    if idx.lambda == 1 {
        return block.clone();
    }
    let w = block.len() / 2;
    let (mut left, mut right) = (to_u64(&block.slice(0, w)), to_u64(&block.slice(w, 2 * w)));
    for round in 0..FEISTEL_ROUNDS {
        let next = left ^ idx.round_value(round, right, w);
        left = right;
        right = next;
    }
    from_u64(left, w).concat(&from_u64(right, w))
}

pub fn h_inverse(idx: TransformIndex, block: &BitString) -> BitString {
    check_block(block);
    if idx.lambda == 1 {
        return block.clone();
    }
    let w = block.len() / 2;
    let (mut left, mut right) = (to_u64(&block.slice(0, w)), to_u64(&block.slice(w, 2 * w)));
    for round in (0..FEISTEL_ROUNDS).rev() {
        let prev = right ^ idx.round_value(round, left, w);
        right = left;
        left = prev;
    }
    from_u64(left, w).concat(&from_u64(right, w))
}

/// CRC over a bit string, MSB-first, zero initial value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Redundancy {
    pub width: usize,
    pub poly: u32,
}

impl Redundancy {
    /// CRC-8 with polynomial `x^8 + x^2 + x + 1`.
    pub const CRC8: Redundancy = Redundancy {
        width: 8,
        poly: 0x07,
    };

    pub fn checksum(&self, data: &BitString) -> BitString {
        let top = 1u32 << (self.width - 1);
        let mask = if self.width == 32 {
            u32::MAX
        } else {
            (1u32 << self.width) - 1
        };
        let mut reg = 0u32;
        for bit in data.iter() {
            let fb = ((reg & top) != 0) ^ bit;
            reg = (reg << 1) & mask;
            if fb {
                reg ^= self.poly;
            }
        }
        BitString::from_index(reg as usize, self.width)
    }

    pub fn append(&self, data: &BitString) -> BitString {
        data.concat(&self.checksum(data))
    }

    /// Splits a protected block into its data part if the checksum matches.
    pub fn verify(&self, block: &BitString) -> Option<BitString> {
        if block.len() < self.width {
            return None;
        }
        let split = block.len() - self.width;
        let data = block.slice(0, split);
        (self.checksum(&data) == block.slice(split, block.len())).then_some(data)
    }
}

/// Block size, family size and redundancy of the wrapped cipher.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WrapperConfig {
    /// Block (and key) length in bits.
    pub k: usize,
    pub l: usize,
    pub redundancy: Redundancy,
}

impl WrapperConfig {
    pub fn new(k: usize, l: usize, redundancy: Redundancy) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter(
                "family size l must be at least 1".into(),
            ));
        }
        if !k.is_multiple_of(2) || k > 128 {
            return Err(Error::InvalidParameter(format!(
                "block length must be even and at most 128, got {k}"
            )));
        }
        if redundancy.width == 0 || redundancy.width > 32 || k <= redundancy.width {
            return Err(Error::InvalidParameter(format!(
                "block length {k} leaves no room for a {}-bit checksum",
                redundancy.width
            )));
        }
        Ok(WrapperConfig { k, l, redundancy })
    }

    pub fn data_bits(&self) -> usize {
        self.k - self.redundancy.width
    }
}

/// Base cipher: XOR with a pad derived from the key and the block position.
pub fn key_pad(key: &BitString, block: usize) -> BitString {
    let mut rng = SimRng::from_seed(derive_seed(PAD_SEED, &key.to_string(), block as u64));
    rng.bits(key.len())
}

pub fn base_encrypt(key: &BitString, block_index: usize, x: &BitString) -> Result<BitString> {
    x.xor(&key_pad(key, block_index))
}

pub fn base_decrypt(key: &BitString, block_index: usize, c: &BitString) -> Result<BitString> {
    c.xor(&key_pad(key, block_index))
}

/// Splits `m` into data chunks, protects each with the checksum, applies a random `H_λ` and
/// encrypts with the base cipher.
pub fn classical_encrypt(
    m: &BitString,
    key: &BitString,
    cfg: &WrapperConfig,
    rng: &mut SimRng,
) -> Result<Vec<BitString>> {
    if key.len() != cfg.k {
        return Err(Error::LengthMismatch {
            expected: cfg.k,
            actual: key.len(),
        });
    }
    let d = cfg.data_bits();
    if m.is_empty() || !m.len().is_multiple_of(d) {
        return Err(Error::InvalidParameter(format!(
            "message length {} is not a positive multiple of {d}",
            m.len()
        )));
    }
    (0..m.len() / d)
        .map(|i| {
            let block = cfg.redundancy.append(&m.slice(i * d, (i + 1) * d));
            let lambda = TransformIndex::new(1 + rng.below(cfg.l), cfg.l)?;
            base_encrypt(key, i, &h_transform(lambda, &block))
        })
        .collect()
}

/// Recovers one block: tries every `H_λ^{-1}` and keeps the distinct candidates with valid
/// redundancy.
pub fn decrypt_block(
    block: &BitString,
    index: usize,
    key: &BitString,
    cfg: &WrapperConfig,
) -> Result<BitString> {
    let y = base_decrypt(key, index, block)?;
    let mut found: Vec<BitString> = Vec::new();
    for lambda in 1..=cfg.l {
        let cand = h_inverse(TransformIndex::new(lambda, cfg.l)?, &y);
        if let Some(data) = cfg.redundancy.verify(&cand) {
            if !found.contains(&data) {
                found.push(data);
            }
        }
    }
    match found.len() {
        0 => Err(Error::PredicateFailure),
        1 => Ok(found.pop().expect("one candidate")),
        n => Err(Error::Ambiguous(n)),
    }
}

pub fn classical_decrypt(
    blocks: &[BitString],
    key: &BitString,
    cfg: &WrapperConfig,
) -> Result<BitString> {
    let mut out = BitString::default();
    for (i, block) in blocks.iter().enumerate() {
        out = out.concat(&decrypt_block(block, i, key, cfg)?);
    }
    Ok(out)
}

/// Per-block outcome counts over a decryption run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecryptionTally {
    pub recovered: usize,
    pub wrong: usize,
    pub ambiguous: usize,
    pub failed: usize,
}

impl DecryptionTally {
    pub fn blocks(&self) -> usize {
        self.recovered + self.wrong + self.ambiguous + self.failed
    }
}

/// Decrypts block by block against the known plaintext, counting every outcome instead of
/// stopping at the first ambiguity.
pub fn tally_decryption(
    blocks: &[BitString],
    key: &BitString,
    cfg: &WrapperConfig,
    plaintext: &BitString,
) -> DecryptionTally {
    let d = cfg.data_bits();
    let mut t = DecryptionTally::default();
    for (i, block) in blocks.iter().enumerate() {
        match decrypt_block(block, i, key, cfg) {
            Ok(data) if data == plaintext.slice(i * d, (i + 1) * d) => t.recovered += 1,
            Ok(_) => t.wrong += 1,
            Err(Error::Ambiguous(_)) => t.ambiguous += 1,
            Err(_) => t.failed += 1,
        }
    }
    t
}

/// Abstract time units of the base cipher and the wrapper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityProfile {
    /// Base encryption.
    pub t1: f64,
    /// Base decryption.
    pub t2: f64,
    /// One `H_λ`.
    pub t3: f64,
    /// One `H_λ^{-1}`.
    pub t4: f64,
    pub n: u32,
    pub k: u32,
    pub l: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityEstimates {
    /// `n (t1 + t3)`
    pub encryption: f64,
    /// `n (t2 + l t4 / 2)`: expected number of inverse trials.
    pub decryption: f64,
    /// `n (t2 + l t4)`: all inverses tried.
    pub decryption_worst: f64,
    /// `2^k n (t2 + l^n t4)`
    pub exhaustive: f64,
    /// Some estimate did not fit in an `f64`.
    pub overflow: bool,
}

pub fn complexity_estimates(p: &ComplexityProfile) -> Result<ComplexityEstimates> {
    if [p.t1, p.t2, p.t3, p.t4]
        .iter()
        .any(|t| !t.is_finite() || *t < 0.0)
    {
        return Err(Error::InvalidParameter(
            "time units must be finite and nonnegative".into(),
        ));
    }
    let n = p.n as f64;
    let l = p.l as f64;
    let encryption = n * (p.t1 + p.t3);
    let decryption = n * (p.t2 + 0.5 * l * p.t4);
    let decryption_worst = n * (p.t2 + l * p.t4);
    let exhaustive = 2f64.powi(p.k as i32) * n * (p.t2 + l.powi(p.n as i32) * p.t4);
    let overflow = ![encryption, decryption, decryption_worst, exhaustive]
        .iter()
        .all(|v| v.is_finite());
    Ok(ComplexityEstimates {
        encryption,
        decryption,
        decryption_worst,
        exhaustive,
        overflow,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;

    #[test]
    fn identity_member() {
        let idx = TransformIndex::new(1, 4).unwrap();
        let x = bits("1011001110001111");
        assert_eq!(h_transform(idx, &x), x);
        assert!(TransformIndex::new(0, 4).is_err());
        assert!(TransformIndex::new(5, 4).is_err());
    }

    #[test]
    fn transforms_are_bijective() {
        let mut rng = SimRng::from_seed(1);
        for _ in 0..1000 {
            let x = rng.bits(16);
            for lambda in 1..=8 {
                let idx = TransformIndex::new(lambda, 8).unwrap();
                assert_eq!(h_inverse(idx, &h_transform(idx, &x)), x);
            }
        }
    }

    #[test]
    fn distinct_members_rarely_collide() {
        let mut rng = SimRng::from_seed(2);
        let mut collisions = 0;
        let trials = 1000;
        for _ in 0..trials {
            let x = rng.bits(16);
            let imgs: Vec<BitString> = (1..=4)
                .map(|l| h_transform(TransformIndex::new(l, 4).unwrap(), &x))
                .collect();
            for i in 0..4 {
                for j in i + 1..4 {
                    collisions += (imgs[i] == imgs[j]) as usize;
                }
            }
        }
        assert!(collisions < trials / 20, "{collisions}");
    }

    #[test]
    fn crc8_known_value() {
        // CRC-8/SMBUS("123456789") = 0xF4
        let data: BitString = b"123456789"
            .iter()
            .flat_map(|&byte| (0..8).rev().map(move |j| (byte >> j) & 1 == 1))
            .collect();
        assert_eq!(Redundancy::CRC8.checksum(&data).to_index(), 0xF4);
        let block = Redundancy::CRC8.append(&bits("10110011"));
        assert_eq!(Redundancy::CRC8.verify(&block), Some(bits("10110011")));
    }

    #[test]
    fn l1_is_base_cipher_round_trip() {
        let cfg = WrapperConfig::new(16, 1, Redundancy::CRC8).unwrap();
        let mut rng = SimRng::from_seed(3);
        let key = rng.bits(16);
        let m = rng.bits(8 * 5);
        let c = classical_encrypt(&m, &key, &cfg, &mut rng).unwrap();
        assert_eq!(classical_decrypt(&c, &key, &cfg).unwrap(), m);
    }

    #[test]
    fn tampering_is_detected() {
        let cfg = WrapperConfig::new(16, 1, Redundancy::CRC8).unwrap();
        let mut rng = SimRng::from_seed(4);
        let key = rng.bits(16);
        let m = rng.bits(8);
        let mut c = classical_encrypt(&m, &key, &cfg, &mut rng).unwrap();
        let flipped: BitString = c[0].iter().enumerate().map(|(j, b)| b ^ (j == 3)).collect();
        c[0] = flipped;
        assert_eq!(
            classical_decrypt(&c, &key, &cfg),
            Err(Error::PredicateFailure)
        );
    }

    #[test]
    fn config_validation() {
        assert!(WrapperConfig::new(8, 4, Redundancy::CRC8).is_err());
        assert!(WrapperConfig::new(16, 0, Redundancy::CRC8).is_err());
        let cfg = WrapperConfig::new(16, 2, Redundancy::CRC8).unwrap();
        let mut rng = SimRng::from_seed(0);
        assert!(classical_encrypt(&bits("101"), &rng.bits(16), &cfg, &mut rng).is_err());
    }

    #[test]
    fn complexity_examples() {
        let e = complexity_estimates(&ComplexityProfile {
            t1: 1.0,
            t2: 1.0,
            t3: 1.0,
            t4: 1.0,
            n: 1,
            k: 3,
            l: 1,
        })
        .unwrap();
        assert_eq!((e.encryption, e.decryption, e.exhaustive), (2.0, 1.5, 16.0));
        let e = complexity_estimates(&ComplexityProfile {
            t1: 1.0,
            t2: 1.0,
            t3: 1.0,
            t4: 1.0,
            n: 2,
            k: 4,
            l: 2,
        })
        .unwrap();
        assert_eq!(
            (e.encryption, e.decryption, e.exhaustive),
            (4.0, 4.0, 160.0)
        );
        assert_eq!(e.decryption_worst, 6.0);
        let e = complexity_estimates(&ComplexityProfile {
            t1: 0.0,
            t2: 0.0,
            t3: 0.0,
            t4: 0.0,
            n: 3,
            k: 5,
            l: 4,
        })
        .unwrap();
        assert_eq!((e.encryption, e.decryption, e.exhaustive), (0.0, 0.0, 0.0));
        let e = complexity_estimates(&ComplexityProfile {
            t1: 1.0,
            t2: 1.0,
            t3: 1.0,
            t4: 1.0,
            n: 2000,
            k: 64,
            l: 16,
        })
        .unwrap();
        assert!(e.overflow);
        assert!(complexity_estimates(&ComplexityProfile {
            t1: -1.0,
            t2: 0.0,
            t3: 0.0,
            t4: 0.0,
            n: 1,
            k: 1,
            l: 1,
        })
        .is_err());
    }
}
