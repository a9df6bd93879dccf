//! The hypothetical key-reading signalling channel.
//!
//! Alice shares `(|00⟩ + |11⟩)/√2` with Eve and encodes a bit `b` in her choice of
//! measurement basis. Eve's qubit collapses to `|o⟩_b`, exactly a one-qubit ciphertext under
//! key bit `b`. A procedure that read the key from a ciphertext would therefore read `b`
//! instantly. The operators here show why that cannot happen: Eve's marginal is `I/2` for
//! both choices, so every measurement she can make has zero advantage.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::attacks::{outcome_distribution, Povm};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::linalg::{c, kolmogorov_distance, re, ComplexMatrix, DensityOperator, C64};
use crate::rng::SimRng;
use crate::scheme::basis_state;

/// `(√2/2)(|00⟩ + |11⟩)`, Alice's qubit first.
pub fn bell_pair() -> [C64; 4] {
    [re(FRAC_1_SQRT_2), re(0.0), re(0.0), re(FRAC_1_SQRT_2)]
}

/// Reduced state of the second qubit of a two-qubit vector.
pub fn reduced_second(psi: &[C64; 4]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    for e in 0..2 {
        for f in 0..2 {
            m[(e, f)] = (0..2).map(|a| psi[a * 2 + e] * psi[a * 2 + f].conj()).sum();
        }
    }
    m
}

/// Reduced state of the first qubit.
pub fn reduced_first(psi: &[C64; 4]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    for a in 0..2 {
        for b in 0..2 {
            m[(a, b)] = (0..2).map(|e| psi[a * 2 + e] * psi[b * 2 + e].conj()).sum();
        }
    }
    m
}

/// Projects Alice's qubit onto `|o⟩_b`: returns the outcome probability and the
/// normalized post-measurement two-qubit state.
fn project_alice(psi: &[C64; 4], outcome: bool, basis: bool) -> (f64, [C64; 4]) {
    let v = basis_state(outcome, basis);
    // (|v⟩⟨v| ⊗ I) ψ
    let mut out = [re(0.0); 4];
    for e in 0..2 {
        let amp: C64 = (0..2).map(|a| v[a].conj() * psi[a * 2 + e]).sum();
        for a in 0..2 {
            out[a * 2 + e] = v[a] * amp;
        }
    }
    let p: f64 = out.iter().map(|z| z.norm_sqr()).sum();
    if p > 0.0 {
        for z in out.iter_mut() {
            *z /= p.sqrt();
        }
    }
    (p, out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellExperimentResult {
    pub basis_choice: bool,
    pub alice_outcome: bool,
    pub outcome_probability: f64,
    pub eve_state: DensityOperator,
}

impl BellExperimentResult {
    /// The `(bit, basis)` pair whose conjugate-coding projector equals Eve's state.
    pub fn eve_state_label(&self) -> Option<(bool, bool)> {
        [(false, false), (true, false), (false, true), (true, true)]
            .into_iter()
            .find(|&(bit, basis)| {
                let p = ComplexMatrix::outer(&basis_state(bit, basis));
                p.max_abs_diff(self.eve_state.matrix()) < 1e-12
            })
    }
}

/// Alice measures her half of a fresh Bell pair in basis `b`.
pub fn alice_measure(b: bool, rng: &mut SimRng) -> BellExperimentResult {
    let psi = bell_pair();
    let (p0, post0) = project_alice(&psi, false, b);
    let (p1, post1) = project_alice(&psi, true, b);
    debug_assert!((p0 + p1 - 1.0).abs() < 1e-12);
    let outcome = rng.bernoulli(p1);
    let (p, post) = if outcome { (p1, post1) } else { (p0, post0) };
    BellExperimentResult {
        basis_choice: b,
        alice_outcome: outcome,
        outcome_probability: p,
        eve_state: DensityOperator::from_mixture(reduced_second(&post)),
    }
}

/// Sends each bit of `message` over its own Bell pair.
pub fn signal_bits(message: &BitString, rng: &mut SimRng) -> Vec<BellExperimentResult> {
    message.iter().map(|b| alice_measure(b, rng)).collect()
}

/// Eve's exact state averaged over Alice's outcomes for basis choice `b`.
pub fn eve_marginal(b: bool) -> DensityOperator {
    let psi = bell_pair();
    let mut acc = ComplexMatrix::zeros(2);
    for o in [false, true] {
        let (p, post) = project_alice(&psi, o, b);
        acc = &acc + &reduced_second(&post).scale(p);
    }
    DensityOperator::from_mixture(acc)
}

/// How well a measurement by Eve reveals Alice's basis choice: the Kolmogorov distance between
/// its outcome distributions under the two marginals (for two outcomes,
/// `|Pr[0 | b=0] − Pr[0 | b=1]|`).
pub fn signalling_advantage(povm: &Povm) -> Result<f64> {
    if povm.dim() != 2 {
        return Err(Error::InvalidPovm(format!(
            "signalling measurement acts on one qubit, got dimension {}",
            povm.dim()
        )));
    }
    let p = outcome_distribution(&eve_marginal(false), povm)?;
    let q = outcome_distribution(&eve_marginal(true), povm)?;
    kolmogorov_distance(&p, &q)
}

/// A random two-outcome qubit POVM `{U diag(p, q) U†, I − U diag(p, q) U†}`.
pub fn random_qubit_povm(rng: &mut SimRng) -> Povm {
    let tau = std::f64::consts::TAU;
    let a = rng.uniform() * tau;
    let beta = rng.uniform() * tau;
    let gamma = rng.uniform() * tau;
    let (p, q) = (rng.uniform(), rng.uniform());
    let (sa, ca) = a.sin_cos();
    let eb = c(beta.cos(), beta.sin());
    let eg = c(gamma.cos(), gamma.sin());
    let u = ComplexMatrix::from_vec(vec![re(ca), -eb * sa, eg * sa, eb * eg * ca]).expect("2x2");
    let e0 = &(&u * &ComplexMatrix::diagonal(&[p, q])) * &u.adjoint();
    let e1 = &ComplexMatrix::identity(2) - &e0;
    Povm::new(
        vec![e0, e1],
        vec![BitString::from_index(0, 1), BitString::from_index(1, 1)],
    )
    .expect("random POVM is valid by construction")
}

/// Entrywise average of Eve's conditional states over `trials` runs.
pub fn empirical_marginal(b: bool, trials: usize, rng: &mut SimRng) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(2);
    for _ in 0..trials {
        acc = &acc + alice_measure(b, rng).eve_state.matrix();
    }
    acc.scale(1.0 / trials.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::breidbart_povm;
    use crate::linalg::trace_distance;

    #[test]
    fn bell_pair_basics() {
        let psi = bell_pair();
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-15);
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(reduced_first(&psi).max_abs_diff(&half) < 1e-15);
        assert!(reduced_second(&psi).max_abs_diff(&half) < 1e-15);
        assert!((psi[0].norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn collapse_is_correlated() {
        let mut rng = SimRng::from_seed(2);
        for i in 0..200 {
            let b = i % 2 == 1;
            let r = alice_measure(b, &mut rng);
            assert_eq!(r.eve_state_label(), Some((r.alice_outcome, b)));
            assert!((r.outcome_probability - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn marginals_identical() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(eve_marginal(false).matrix().max_abs_diff(&half) < 1e-15);
        assert!(eve_marginal(true).matrix().max_abs_diff(&half) < 1e-15);
        assert!(trace_distance(&eve_marginal(false), &eve_marginal(true)).unwrap() < 1e-15);
    }

    #[test]
    fn no_advantage_for_named_measurements() {
        assert!(signalling_advantage(&Povm::computational(1).unwrap()).unwrap() < 1e-12);
        assert!(signalling_advantage(&breidbart_povm(1).unwrap()).unwrap() < 1e-12);
        assert!(signalling_advantage(&breidbart_povm(2).unwrap()).is_err());
        let mut rng = SimRng::from_seed(4);
        assert!(signalling_advantage(&random_qubit_povm(&mut rng)).unwrap() < 1e-12);
    }

    #[test]
    fn repeated_signalling_is_pairwise() {
        let mut rng = SimRng::from_seed(8);
        let msg: BitString = "0110".parse().unwrap();
        let results = signal_bits(&msg, &mut rng);
        assert_eq!(results.len(), 4);
        for (r, b) in results.iter().zip(msg.iter()) {
            assert_eq!(r.basis_choice, b);
        }
    }
}
