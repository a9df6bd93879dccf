//! Exit criteria for the whole laboratory, runnable from tests and from the CLI.
//!
//! Each check returns a [`CriterionOutcome`] holding the worst observed metric and the
//! threshold it was held to. Monte Carlo checks draw from generators split off the given seed.

use std::f64::consts::FRAC_PI_8;
use std::time::{Duration, Instant};

use crate::attacks::{
    breidbart_classical_distance, breidbart_povm, breidbart_prob_difference,
    measurement_family_scan, outcome_distribution, sample_measurement, Povm, DEFAULT_SCAN_GRID,
};
use crate::bits::BitString;
use crate::classical::{complexity_estimates, ComplexityProfile};
use crate::densities::{
    analytic_distance, analytic_sigma_distance, hadamard_mixing_channel, hadamard_mixing_kraus,
    kraus_completeness_error, rho_b_direct, rho_b_recursive, sigma_b,
};
use crate::error::Result;
use crate::linalg::{trace_distance, ComplexMatrix};
use crate::nosignal::{empirical_marginal, eve_marginal, random_qubit_povm, signalling_advantage};
use crate::rng::SimRng;
use crate::scheme::{decrypt_bit, decrypt_message, encode_bit, encrypt_message, Key, ParityString};
use crate::unicity::{
    deterministic_budget, probabilistic_budget, run_attacks, DetectorConfig, Scheme,
};

pub const DISTANCE_TOL: f64 = 1e-9;
pub const ENTRY_TOL: f64 = 1e-12;
pub const MARGINAL_TOL: f64 = 1e-15;
pub const MC_TRIALS: usize = 100_000;
pub const DISTANCE_TIME_LIMIT: Duration = Duration::from_secs(10);
pub const UNICITY_RUNS: usize = 100;
pub const UNICITY_MIN_RATE: f64 = 0.99;
pub const SIGNALLING_POVMS: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the criterion's metric.
    pub observed: f64,
    /// The bound the metric was held to.
    pub threshold: f64,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<28} observed={:.3e} threshold={:.3e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.observed,
            self.threshold,
            self.detail
        )
    }
}

fn three_sigma(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Eigensolver distance of `ρ_0^k, ρ_1^k` against `(√2/2)^k`, `k = 1..=6`, in under 10 s.
pub fn trace_distance_closed_form() -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for k in 1..=6 {
        let d = trace_distance(&rho_b_direct(false, k)?, &rho_b_direct(true, k)?)?;
        worst = worst.max((d - analytic_distance(k)).abs());
    }
    let elapsed = start.elapsed();
    Ok(CriterionOutcome {
        id: 1,
        name: "trace-distance closed form",
        passed: worst < DISTANCE_TOL && elapsed < DISTANCE_TIME_LIMIT,
        observed: worst,
        threshold: DISTANCE_TOL,
        detail: format!("k=1..6, runtime limit {}s", DISTANCE_TIME_LIMIT.as_secs()),
    })
}

/// Recursive and direct `ρ_b^k` agree entrywise, `k = 1..=6`.
pub fn recursion_consistency() -> Result<CriterionOutcome> {
    let mut worst: f64 = 0.0;
    for k in 1..=6 {
        for b in [false, true] {
            let gap = rho_b_recursive(b, k)?
                .matrix()
                .max_abs_diff(rho_b_direct(b, k)?.matrix());
            worst = worst.max(gap);
        }
    }
    Ok(CriterionOutcome {
        id: 2,
        name: "recursion consistency",
        passed: worst < ENTRY_TOL,
        observed: worst,
        threshold: ENTRY_TOL,
        detail: "k=1..6, b∈{0,1}".into(),
    })
}

/// The Hadamard-mixing channel maps `σ_b^k` to `ρ_b^k`, and its Kraus set is complete.
pub fn channel_identity() -> Result<CriterionOutcome> {
    let mut worst: f64 = 0.0;
    for k in 1..=4 {
        worst = worst.max(kraus_completeness_error(&hadamard_mixing_kraus(k)?)?);
        for b in [false, true] {
            let mapped = hadamard_mixing_channel(&sigma_b(b, k)?, k)?;
            worst = worst.max(mapped.matrix().max_abs_diff(rho_b_direct(b, k)?.matrix()));
        }
    }
    Ok(CriterionOutcome {
        id: 3,
        name: "channel identity",
        passed: worst < ENTRY_TOL,
        observed: worst,
        threshold: ENTRY_TOL,
        detail: "k=1..4, b∈{0,1}, plus Kraus completeness".into(),
    })
}

/// `D(σ_0^k, σ_1^k) = (sin π/4)^k`, `k = 1..=6`.
pub fn sigma_distance() -> Result<CriterionOutcome> {
    let mut worst: f64 = 0.0;
    for k in 1..=6 {
        let d = trace_distance(&sigma_b(false, k)?, &sigma_b(true, k)?)?;
        worst = worst.max((d - analytic_sigma_distance(k)).abs());
    }
    Ok(CriterionOutcome {
        id: 4,
        name: "sigma-state distance",
        passed: worst < DISTANCE_TOL,
        observed: worst,
        threshold: DISTANCE_TOL,
        detail: "k=1..6".into(),
    })
}

/// Exact Breidbart probabilities and differences for every `r`, `k ≤ 4`, plus a Monte Carlo
/// check of `P_0(ρ_0^1)`.
pub fn breidbart_probabilities(seed: u64) -> Result<CriterionOutcome> {
    let povm1 = breidbart_povm(1)?;
    let p1 = outcome_distribution(&rho_b_direct(false, 1)?, &povm1)?;
    let mut worst = (p1.prob(&BitString::from_index(0, 1)) - FRAC_PI_8.cos().powi(2)).abs();
    for k in 1..=4 {
        let povm = breidbart_povm(k)?;
        let p = outcome_distribution(&rho_b_direct(false, k)?, &povm)?;
        let q = outcome_distribution(&rho_b_direct(true, k)?, &povm)?;
        for r in BitString::enumerate(k) {
            let exact = p.prob(&r) - q.prob(&r);
            worst = worst.max((exact - breidbart_prob_difference(&r, k)?).abs());
        }
    }

    let mut rng = SimRng::from_seed(seed).split("breidbart-mc", 0);
    let rho = rho_b_direct(false, 1)?;
    let zero = BitString::from_index(0, 1);
    let mut hits = 0usize;
    for _ in 0..MC_TRIALS {
        hits += (sample_measurement(&rho, &povm1, &mut rng)? == zero) as usize;
    }
    let target = FRAC_PI_8.cos().powi(2);
    let freq = hits as f64 / MC_TRIALS as f64;
    let mc_ok = (freq - target).abs() <= three_sigma(target, MC_TRIALS);
    Ok(CriterionOutcome {
        id: 5,
        name: "Breidbart probabilities",
        passed: worst < ENTRY_TOL && mc_ok,
        observed: worst,
        threshold: ENTRY_TOL,
        detail: format!(
            "all r, k≤4; MC freq {freq:.5} vs cos²(π/8) {target:.5} (3σ {:.5})",
            three_sigma(target, MC_TRIALS)
        ),
    })
}

/// Breidbart's classical distance equals the trace distance, and no scanned product basis
/// beats it.
pub fn helstrom_saturation() -> Result<CriterionOutcome> {
    let mut worst: f64 = 0.0;
    for k in 1..=6 {
        let td = trace_distance(&rho_b_direct(false, k)?, &rho_b_direct(true, k)?)?;
        worst = worst.max((breidbart_classical_distance(k)? - td).abs());
    }
    let mut excess = f64::NEG_INFINITY;
    for k in 1..=4 {
        excess = excess.max(measurement_family_scan(k, DEFAULT_SCAN_GRID)?.max_excess);
    }
    Ok(CriterionOutcome {
        id: 6,
        name: "Helstrom saturation",
        passed: worst < DISTANCE_TOL && excess <= DISTANCE_TOL,
        observed: worst,
        threshold: DISTANCE_TOL,
        detail: format!("k=1..6; scan k=1..4 max excess {excess:.3e}"),
    })
}

/// Exhaustive correct-key round trips for `k ≤ 4`; 10³ random round trips at `k = 8`.
pub fn protocol_correctness(seed: u64) -> Result<CriterionOutcome> {
    let base = SimRng::from_seed(seed);
    let mut rng = base.split("exhaustive", 0);
    let (mut cases, mut failures) = (0usize, 0usize);
    for k in 1..=4 {
        for key in Key::enumerate(k) {
            for m in [false, true] {
                for r in ParityString::enumerate_class(m, k) {
                    let state = encode_bit(m, &key, &r)?;
                    failures += (decrypt_bit(state, &key, &mut rng)? != m) as usize;
                    cases += 1;
                }
            }
        }
    }
    let mut mc = base.split("round-trip-k8", 0);
    let trials = 1000;
    let mut mc_ok = 0;
    for _ in 0..trials {
        let key = Key::random(8, &mut mc)?;
        let m = mc.bits(1);
        let c = encrypt_message(&m, &key, &mut mc)?;
        mc_ok += (decrypt_message(c, &key, &mut mc)? == m) as usize;
    }
    Ok(CriterionOutcome {
        id: 7,
        name: "protocol correctness",
        passed: failures == 0 && mc_ok == trials,
        observed: failures as f64 + (trials - mc_ok) as f64,
        threshold: 0.0,
        detail: format!("{cases} exhaustive cases k≤4; {mc_ok}/{trials} at k=8"),
    })
}

/// Eve's marginals coincide exactly; no POVM gains an advantage; sampled marginals
/// agree with `I/2`.
pub fn no_signalling(seed: u64) -> Result<CriterionOutcome> {
    let td = trace_distance(&eve_marginal(false), &eve_marginal(true))?;
    let base = SimRng::from_seed(seed);
    let mut povms = vec![Povm::computational(1)?, breidbart_povm(1)?];
    let mut prng = base.split("random-povm", 0);
    povms.extend((0..SIGNALLING_POVMS).map(|_| random_qubit_povm(&mut prng)));
    let mut adv: f64 = 0.0;
    for p in &povms {
        adv = adv.max(signalling_advantage(p)?);
    }
    let half = ComplexMatrix::identity(2).scale(0.5);
    let sigma = 3.0 * 0.5 / (MC_TRIALS as f64).sqrt();
    let mut emp_gap: f64 = 0.0;
    for b in [false, true] {
        let mut rng = base.split("alice", b as u64);
        emp_gap = emp_gap.max(empirical_marginal(b, MC_TRIALS, &mut rng).max_abs_diff(&half));
    }
    Ok(CriterionOutcome {
        id: 8,
        name: "no-signalling",
        passed: td < MARGINAL_TOL && adv < ENTRY_TOL && emp_gap <= sigma,
        observed: td,
        threshold: MARGINAL_TOL,
        detail: format!(
            "max advantage {adv:.2e} over {} POVMs; empirical gap {emp_gap:.5} (3σ {sigma:.5})",
            povms.len()
        ),
    })
}

/// Both exhaustive attacks succeed at their exact budgets for `k ∈ {4, 6}`.
pub fn unicity_budgets(seed: u64) -> Result<CriterionOutcome> {
    let cfg = DetectorConfig::new(64, 8)?;
    let n = cfg.sample_len;
    let base = SimRng::from_seed(seed);
    let mut worst_rate: f64 = 1.0;
    let mut ok = true;
    let mut notes = Vec::new();
    for k in [4usize, 6] {
        let sub = base.split("unicity-k", k as u64);
        let det = run_attacks(Scheme::Deterministic, k, &cfg, UNICITY_RUNS, &sub);
        let prob = run_attacks(Scheme::Probabilistic, k, &cfg, UNICITY_RUNS, &sub);
        let ratio = probabilistic_budget(k, n) as f64 / deterministic_budget(k, n) as f64;
        ok &= det.success_rate() >= UNICITY_MIN_RATE
            && prob.success_rate() >= UNICITY_MIN_RATE
            && det.qubits_consumed == Some(2 * k * n)
            && prob.qubits_consumed == Some(k * (1 << k) * n)
            && ratio == (1u64 << k) as f64 / 2.0;
        worst_rate = worst_rate.min(det.success_rate()).min(prob.success_rate());
        notes.push(format!(
            "k={k}: det {:.2} ({:?} qubits), prob {:.2} ({:?} qubits), ratio {ratio}",
            det.success_rate(),
            det.qubits_consumed,
            prob.success_rate(),
            prob.qubits_consumed
        ));
    }
    Ok(CriterionOutcome {
        id: 9,
        name: "unicity budgets",
        passed: ok,
        observed: worst_rate,
        threshold: UNICITY_MIN_RATE,
        detail: notes.join("; "),
    })
}

/// The three cost formulas on a 20-case grid, checked against exact integer arithmetic.
pub fn complexity_formulas() -> Result<CriterionOutcome> {
    let mut mismatches = 0;
    let mut cases = 0;
    for (i, &(n, k, l)) in [
        (1u32, 1u32, 1u32),
        (1, 4, 2),
        (2, 4, 2),
        (3, 8, 4),
        (5, 16, 3),
    ]
    .iter()
    .enumerate()
    {
        for j in 0..4u32 {
            let t = [1 + j, 2 + i as u32, 3 * j, 1 + 2 * j];
            let p = ComplexityProfile {
                t1: t[0] as f64,
                t2: t[1] as f64,
                t3: t[2] as f64,
                t4: t[3] as f64,
                n,
                k,
                l,
            };
            let est = complexity_estimates(&p)?;
            let (n, k, l) = (n as u128, k as u128, l as u128);
            let t: Vec<u128> = t.iter().map(|&x| x as u128).collect();
            let enc = n * (t[0] + t[2]);
            // decryption doubled to stay integral
            let dec2 = n * (2 * t[1] + l * t[3]);
            let exh = (1u128 << k) * n * (t[1] + l.pow(n as u32) * t[3]);
            let exact = est.encryption == enc as f64
                && est.decryption * 2.0 == dec2 as f64
                && est.exhaustive == exh as f64
                && !est.overflow;
            mismatches += (!exact) as u32;
            cases += 1;
        }
    }
    Ok(CriterionOutcome {
        id: 10,
        name: "complexity formulas",
        passed: mismatches == 0 && cases == 20,
        observed: mismatches as f64,
        threshold: 0.0,
        detail: format!("{cases} parameter cases"),
    })
}

/// Criteria 1–10.
pub fn run_all(seed: u64) -> Result<Vec<CriterionOutcome>> {
    Ok(vec![
        trace_distance_closed_form()?,
        recursion_consistency()?,
        channel_identity()?,
        sigma_distance()?,
        breidbart_probabilities(seed)?,
        helstrom_saturation()?,
        protocol_correctness(seed)?,
        no_signalling(seed)?,
        unicity_budgets(seed)?,
        complexity_formulas()?,
    ])
}
