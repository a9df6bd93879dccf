//! Key recovery by exhaustive search once enough ciphertext is available.
//!
//! Plaintexts carry redundancy: they come from a maximal-length linear feedback register of
//! length `L`, and Eve's detector flags a decrypted string as "pseudo-random" when its linear
//! complexity is at most `L`. Decrypting with a wrong key yields (near) uniform bits, whose
//! complexity is about `N/2`.
//!
//! Every ciphertext qubit can be measured only once, so each candidate key needs its own
//! fresh ciphertext. That is what separates the budgets: `k·2^k·N` qubits against the
//! probabilistic scheme versus `2k·N` against the deterministic private channel, whose key
//! pairs can be attacked independently.

use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::rng::SimRng;
use crate::scheme::{
    decrypt_bit, encode_bit, qpc_decrypt, qpc_encrypt_block, sample_parity_string, Key,
    ProductState,
};

/// Feedback taps (exponents of a primitive polynomial) for register lengths `2..=16`.
const MAXIMAL_TAPS: [&[u32]; 15] = [
    &[2, 1],
    &[3, 2],
    &[4, 3],
    &[5, 3],
    &[6, 5],
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 6, 4, 1],
    &[13, 4, 3, 1],
    &[14, 5, 3, 1],
    &[15, 14],
    &[16, 15, 13, 4],
];

/// Fibonacci linear feedback register `s_t = ⊕_{i ∈ taps} s_{t−i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaintextSource {
    taps: Vec<u32>,
    length: usize,
    /// Bit `j` holds `s_{t−1−j}`.
    state: u32,
}

impl PlaintextSource {
    /// Maximal-length register of length `length`, started from a nonzero state derived
    /// from `seed`.
    pub fn new(length: usize, seed: u64) -> Result<Self> {
        let taps = MAXIMAL_TAPS
            .get(length.wrapping_sub(2))
            .ok_or_else(|| Error::InvalidParameter(format!("no maximal taps for L = {length}")))?;
        let period = (1u64 << length) - 1;
        Ok(PlaintextSource {
            taps: taps.to_vec(),
            length,
            state: (seed % period + 1) as u32,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn taps(&self) -> &[u32] {
        &self.taps
    }

    fn step(&mut self) -> bool {
        let out = self
            .taps
            .iter()
            .fold(false, |acc, &i| acc ^ ((self.state >> (i - 1)) & 1 == 1));
        let mask = ((1u64 << self.length) - 1) as u32;
        self.state = ((self.state << 1) | out as u32) & mask;
        out
    }

    /// The first `length` output bits from the initial state.
    pub fn stream(&self, length: usize) -> BitString {
        let mut reg = self.clone();
        (0..length).map(|_| reg.step()).collect()
    }

    /// Output bits `offset, offset + stride, offset + 2·stride, …`.
    pub fn decimated(&self, offset: usize, stride: usize, length: usize) -> BitString {
        let mut reg = self.clone();
        let mut out = BitString::default();
        let mut t = 0;
        while out.len() < length {
            let bit = reg.step();
            if t >= offset && (t - offset).is_multiple_of(stride) {
                out.push(bit);
            }
            t += 1;
        }
        out
    }
}

pub fn prg_stream(source: &PlaintextSource, length: usize) -> Result<BitString> {
    if length == 0 {
        return Err(Error::InvalidParameter(
            "stream length must be at least 1".into(),
        ));
    }
    Ok(source.stream(length))
}

/// Length of the shortest linear feedback register generating `s` (Berlekamp–Massey over GF(2)).
pub fn linear_complexity(s: &BitString) -> usize {
    let n = s.len();
    let bits = s.bits();
    let mut c = vec![false; n + 1];
    let mut b = vec![false; n + 1];
    c[0] = true;
    b[0] = true;
    let mut l = 0usize;
    let mut m: isize = -1;
    for i in 0..n {
        let mut d = bits[i];
        for j in 1..=l {
            d ^= c[j] & bits[i - j];
        }
        if d {
            let t = c.clone();
            let shift = (i as isize - m) as usize;
            for j in 0..=n - shift {
                c[j + shift] ^= b[j];
            }
            if 2 * l <= i {
                l = i + 1 - l;
                m = i as isize;
                b = t;
            }
        }
    }
    l
}

/// Sample length `N` and complexity bound `L` of the pseudo-randomness detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectorConfig {
    pub sample_len: usize,
    pub complexity_bound: usize,
}

impl DetectorConfig {
    pub fn new(sample_len: usize, complexity_bound: usize) -> Result<Self> {
        if sample_len <= 2 * complexity_bound {
            return Err(Error::InvalidParameter(format!(
                "detector needs N > 2L, got N = {sample_len}, L = {complexity_bound}"
            )));
        }
        Ok(DetectorConfig {
            sample_len,
            complexity_bound,
        })
    }
}

/// `true` iff the first `N` bits have linear complexity at most `L`. The all-zero string
/// has complexity 0 and is accepted.
pub fn is_pseudorandom(bits: &BitString, cfg: &DetectorConfig) -> Result<bool> {
    if bits.len() < cfg.sample_len {
        return Err(Error::InvalidParameter(format!(
            "detector needs {} bits, got {}",
            cfg.sample_len,
            bits.len()
        )));
    }
    Ok(linear_complexity(&bits.slice(0, cfg.sample_len)) <= cfg.complexity_bound)
}

/// A finite ciphertext supply that hands out each item once.
#[derive(Debug)]
struct Supply<T> {
    /// Not yet measured, in supply order.
    items: std::collections::VecDeque<T>,
    taken: usize,
    qubits_per_item: usize,
}

impl<T> Supply<T> {
    fn new(items: Vec<T>, qubits_per_item: usize) -> Self {
        Supply {
            items: items.into(),
            taken: 0,
            qubits_per_item,
        }
    }

    fn take(&mut self, count: usize) -> Result<std::collections::vec_deque::Drain<'_, T>> {
        if count > self.items.len() {
            return Err(Error::BudgetExhausted {
                requested: count * self.qubits_per_item,
                remaining: self.items.len() * self.qubits_per_item,
            });
        }
        self.taken += count;
        Ok(self.items.drain(..count))
    }

    fn consumed_qubits(&self) -> usize {
        self.taken * self.qubits_per_item
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub true_key: Key,
    pub recovered_key: Option<Key>,
    pub qubits_supplied: usize,
    pub qubits_consumed: usize,
    pub candidates_tested: usize,
    pub success: bool,
    /// The true key's decryption passed the detector.
    pub correct_key_passed: bool,
    /// Ones among all bits decrypted under wrong candidates.
    pub wrong_key_ones: usize,
    pub wrong_key_bits: usize,
}

/// `k · 2^k · N`.
pub fn probabilistic_budget(k: usize, n: usize) -> usize {
    k * (1usize << k) * n
}

/// `2k · N`.
pub fn deterministic_budget(k: usize, n: usize) -> usize {
    2 * k * n
}

/// Largest `k` the exhaustive probabilistic attack will enumerate.
pub const MAX_ATTACK_K: usize = 12;

/// Exhaustive attack on the probabilistic scheme with a supply of `budget_qubits` ciphertext
/// qubits. Candidate keys are tried in lexicographic order; candidate `g` measures its own
/// group of `N` one-bit ciphertexts.
pub fn attack_probabilistic(
    k: usize,
    cfg: &DetectorConfig,
    budget_qubits: usize,
    rng: &SimRng,
) -> Result<AttackReport> {
    if k == 0 || k > MAX_ATTACK_K {
        return Err(Error::InvalidParameter(format!(
            "k must be in 1..={MAX_ATTACK_K}"
        )));
    }
    let n = cfg.sample_len;
    let blocks = budget_qubits / k;
    let mut setup = rng.split("setup", 0);
    let true_key = Key::random(k, &mut setup)?;
    let source = PlaintextSource::new(cfg.complexity_bound, setup.next_seed())?;
    let plaintext = source.stream(blocks.max(1));

    let mut enc_rng = rng.split("encrypt", 0);
    let ciphertexts = (0..blocks)
        .map(|i| {
            let m = plaintext.get(i);
            encode_bit(m, &true_key, &sample_parity_string(m, k, &mut enc_rng)?)
        })
        .collect::<Result<Vec<ProductState>>>()?;
    let mut supply = Supply::new(ciphertexts, k);

    let mut groups = Vec::with_capacity(1 << k);
    for (g, candidate) in Key::enumerate(k).enumerate() {
        let group: Vec<ProductState> = supply.take(n)?.collect();
        groups.push((g, candidate, group));
    }

    let outcomes: Vec<(Key, BitString)> = groups
        .into_par_iter()
        .map(|(g, candidate, group)| {
            let mut meas = rng.split("candidate", g as u64);
            let bits = group
                .into_iter()
                .map(|state| decrypt_bit(state, &candidate, &mut meas))
                .collect::<Result<BitString>>()?;
            Ok((candidate, bits))
        })
        .collect::<Result<_>>()?;

    let mut passing = Vec::new();
    let mut correct_key_passed = false;
    let (mut wrong_key_ones, mut wrong_key_bits) = (0, 0);
    for (candidate, bits) in &outcomes {
        let pass = is_pseudorandom(bits, cfg)?;
        if candidate == &true_key {
            correct_key_passed = pass;
        } else {
            wrong_key_ones += bits.weight();
            wrong_key_bits += bits.len();
        }
        if pass {
            passing.push(candidate.clone());
        }
    }
    if passing.len() > 1 {
        return Err(Error::Ambiguous(passing.len()));
    }
    let recovered_key = passing.pop();
    Ok(AttackReport {
        success: recovered_key.as_ref() == Some(&true_key),
        true_key,
        recovered_key,
        qubits_supplied: blocks * k,
        qubits_consumed: supply.consumed_qubits(),
        candidates_tested: outcomes.len(),
        correct_key_passed,
        wrong_key_ones,
        wrong_key_bits,
    })
}

/// Exhaustive attack on the deterministic private channel. Plaintext position `j` of every
/// block carries the generator stream decimated by `k/2` at offset `j`, so each key pair can
/// be tested on its own position: four candidates, `N` fresh qubits each.
pub fn attack_deterministic(
    k: usize,
    cfg: &DetectorConfig,
    budget_qubits: usize,
    rng: &SimRng,
) -> Result<AttackReport> {
    if k == 0 || !k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "private-channel key length must be even and positive, got {k}"
        )));
    }
    let n = cfg.sample_len;
    let pairs = k / 2;
    let blocks = budget_qubits / pairs;
    let mut setup = rng.split("setup", 0);
    let true_key = Key::random(k, &mut setup)?;
    let source = PlaintextSource::new(cfg.complexity_bound, setup.next_seed())?;
    let streams: Vec<BitString> = (0..pairs)
        .map(|j| source.decimated(j, pairs, blocks.max(1)))
        .collect();

    let mut columns: Vec<Vec<[C64; 2]>> = vec![Vec::with_capacity(blocks); pairs];
    for t in 0..blocks {
        let plain: BitString = streams.iter().map(|s| s.get(t)).collect();
        for (j, q) in qpc_encrypt_block(&plain, &true_key)?
            .into_iter()
            .enumerate()
        {
            columns[j].push(q);
        }
    }
    let mut supplies: Vec<Supply<[C64; 2]>> =
        columns.into_iter().map(|c| Supply::new(c, 1)).collect();

    let mut recovered = Vec::with_capacity(k);
    let mut all_found = true;
    let mut correct_key_passed = true;
    let (mut wrong_key_ones, mut wrong_key_bits, mut tested) = (0, 0, 0);
    for (j, supply) in supplies.iter_mut().enumerate() {
        let truth = (true_key.bits().get(2 * j), true_key.bits().get(2 * j + 1));
        let mut passing = Vec::new();
        for cand in 0..4u64 {
            let (s1, s2) = (cand & 2 != 0, cand & 1 != 0);
            let mut meas = rng.split("pair-candidate", (j as u64) << 2 | cand);
            let bits: BitString = supply
                .take(n)?
                .map(|q| qpc_decrypt(q, s1, s2, &mut meas))
                .collect();
            tested += 1;
            let pass = is_pseudorandom(&bits, cfg)?;
            if (s1, s2) == truth {
                correct_key_passed &= pass;
            } else {
                wrong_key_ones += bits.weight();
                wrong_key_bits += bits.len();
            }
            if pass {
                passing.push((s1, s2));
            }
        }
        match passing.as_slice() {
            [] => all_found = false,
            [(s1, s2)] => {
                recovered.push(*s1);
                recovered.push(*s2);
            }
            many => return Err(Error::Ambiguous(many.len())),
        }
    }
    let recovered_key = if all_found {
        Some(Key::new(BitString::new(recovered))?)
    } else {
        None
    };
    Ok(AttackReport {
        success: recovered_key.as_ref() == Some(&true_key),
        true_key,
        recovered_key,
        qubits_supplied: blocks * pairs,
        qubits_consumed: supplies.iter().map(Supply::consumed_qubits).sum(),
        candidates_tested: tested,
        correct_key_passed,
        wrong_key_ones,
        wrong_key_bits,
    })
}

/// Aggregate over repeated seeded attacks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AttackTally {
    pub runs: usize,
    pub successes: usize,
    pub errors: usize,
    /// Every run consumed exactly the same number of qubits; `None` if they differed.
    pub qubits_consumed: Option<usize>,
    pub correct_key_always_passed: bool,
    pub wrong_key_ones: usize,
    pub wrong_key_bits: usize,
}

impl AttackTally {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.runs.max(1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Probabilistic,
    Deterministic,
}

/// Runs `runs` independent attacks (run `i` uses `rng.split(label, i)`) at the exact budget.
pub fn run_attacks(
    scheme: Scheme,
    k: usize,
    cfg: &DetectorConfig,
    runs: usize,
    rng: &SimRng,
) -> AttackTally {
    let label = match scheme {
        Scheme::Probabilistic => "probabilistic-run",
        Scheme::Deterministic => "deterministic-run",
    };
    let reports: Vec<Result<AttackReport>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let r = rng.split(label, i as u64);
            match scheme {
                Scheme::Probabilistic => {
                    attack_probabilistic(k, cfg, probabilistic_budget(k, cfg.sample_len), &r)
                }
                Scheme::Deterministic => {
                    attack_deterministic(k, cfg, deterministic_budget(k, cfg.sample_len), &r)
                }
            }
        })
        .collect();
    let mut tally = AttackTally {
        runs,
        correct_key_always_passed: true,
        ..Default::default()
    };
    let mut consumed: Option<Option<usize>> = None;
    for rep in reports {
        match rep {
            Ok(rep) => {
                tally.successes += rep.success as usize;
                tally.correct_key_always_passed &= rep.correct_key_passed;
                tally.wrong_key_ones += rep.wrong_key_ones;
                tally.wrong_key_bits += rep.wrong_key_bits;
                consumed = Some(match consumed {
                    None => Some(rep.qubits_consumed),
                    Some(prev) => prev.filter(|&q| q == rep.qubits_consumed),
                });
            }
            Err(_) => tally.errors += 1,
        }
    }
    tally.qubits_consumed = consumed.flatten();
    tally
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnicityRow {
    pub k: usize,
    pub qubits_probabilistic: usize,
    pub qubits_deterministic: usize,
    pub ratio: f64,
    pub probabilistic: AttackTally,
    pub deterministic: AttackTally,
}

/// Both attacks at every `k`, with their exact budgets and observed success rates.
pub fn compare_unicity(
    k_values: &[usize],
    cfg: &DetectorConfig,
    runs: usize,
    rng: &SimRng,
) -> Result<Vec<UnicityRow>> {
    k_values
        .iter()
        .map(|&k| {
            if k == 0 || k % 2 != 0 || k > MAX_ATTACK_K {
                return Err(Error::InvalidParameter(format!(
                    "unicity comparison needs even k in 2..={MAX_ATTACK_K}, got {k}"
                )));
            }
            let qp = probabilistic_budget(k, cfg.sample_len);
            let qd = deterministic_budget(k, cfg.sample_len);
            let sub = rng.split("unicity-k", k as u64);
            Ok(UnicityRow {
                k,
                qubits_probabilistic: qp,
                qubits_deterministic: qd,
                ratio: qp as f64 / qd as f64,
                probabilistic: run_attacks(Scheme::Probabilistic, k, cfg, runs, &sub),
                deterministic: run_attacks(Scheme::Deterministic, k, cfg, runs, &sub),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;

    fn cfg() -> DetectorConfig {
        DetectorConfig::new(64, 8).unwrap()
    }

    #[test]
    fn all_tap_sets_are_maximal() {
        for l in 2..=16 {
            let src = PlaintextSource::new(l, 0).unwrap();
            let mut reg = src.clone();
            let start = reg.state;
            let mut period = 0u64;
            loop {
                reg.step();
                period += 1;
                if reg.state == start {
                    break;
                }
            }
            assert_eq!(period, (1 << l) - 1, "L = {l}");
        }
        assert!(PlaintextSource::new(1, 0).is_err());
        assert!(PlaintextSource::new(17, 0).is_err());
    }

    #[test]
    fn stream_is_reproducible_with_complexity_l() {
        let a = PlaintextSource::new(8, 99).unwrap();
        let b = PlaintextSource::new(8, 99).unwrap();
        assert_eq!(a.stream(300), b.stream(300));
        assert_eq!(linear_complexity(&a.stream(64)), 8);
        assert!(prg_stream(&a, 0).is_err());
    }

    #[test]
    fn known_complexities() {
        assert_eq!(linear_complexity(&bits("0000000")), 0);
        assert_eq!(linear_complexity(&bits("0000001")), 7);
        assert_eq!(linear_complexity(&bits("1111111")), 1);
        assert_eq!(linear_complexity(&bits("10101010")), 2);
    }

    #[test]
    fn complement_of_msequence_has_complexity_l_plus_one() {
        let s = PlaintextSource::new(8, 5).unwrap().stream(64);
        let ones = BitString::new(vec![true; 64]);
        assert_eq!(linear_complexity(&s.xor(&ones).unwrap()), 9);
    }

    #[test]
    fn detector() {
        let c = cfg();
        assert!(DetectorConfig::new(16, 8).is_err());
        assert!(is_pseudorandom(&BitString::zeros(64), &c).unwrap());
        assert!(is_pseudorandom(&BitString::zeros(10), &c).is_err());
        let src = PlaintextSource::new(8, 1).unwrap();
        assert!(is_pseudorandom(&src.stream(64), &c).unwrap());
    }

    #[test]
    fn deterministic_attack_small() {
        let rng = SimRng::from_seed(3);
        let rep = attack_deterministic(2, &cfg(), deterministic_budget(2, 64), &rng).unwrap();
        assert!(rep.success);
        assert_eq!(rep.qubits_consumed, 4 * 64);
        assert_eq!(rep.candidates_tested, 4);
        assert!(attack_deterministic(3, &cfg(), 1000, &rng).is_err());
    }

    #[test]
    fn probabilistic_budget_exhausted() {
        let rng = SimRng::from_seed(4);
        let r = attack_probabilistic(4, &cfg(), 2 * 4 * 64, &rng);
        assert!(matches!(r, Err(Error::BudgetExhausted { .. })));
    }

    #[test]
    fn compare_rejects_odd_k() {
        assert!(compare_unicity(&[3], &cfg(), 1, &SimRng::from_seed(0)).is_err());
    }
}
