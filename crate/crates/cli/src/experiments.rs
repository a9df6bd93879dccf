use std::time::Instant;

use anyhow::{bail, ensure, Context as _};
use conjugate_core::acceptance::{self, CriterionOutcome};
use conjugate_core::attacks::{
    breidbart_classical_distance, breidbart_povm, measurement_family_scan, outcome_distribution,
};
use conjugate_core::classical::{complexity_estimates, ComplexityProfile};
use conjugate_core::densities::{
    analytic_distance, analytic_sigma_distance, hadamard_mixing_channel, hadamard_mixing_kraus,
    kraus_completeness_error, plaintext_density, rho_b_direct, sigma_b,
};
use conjugate_core::linalg::{trace_distance, ComplexMatrix};
use conjugate_core::nosignal::{
    empirical_marginal, eve_marginal, random_qubit_povm, signalling_advantage,
};
use conjugate_core::scheme::{decrypt_message, encrypt_message, Key};
use conjugate_core::unicity::{compare_unicity, DetectorConfig};
use conjugate_core::{BitString, ProbabilityDistribution, SimRng};

use crate::record::{render_csv, Record};

/// Shared settings of every experiment.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub seed: u64,
    /// Fill `wall_ms`; off by default so output files are reproducible.
    pub timing: bool,
}

impl Context {
    pub fn rng(&self) -> SimRng {
        SimRng::from_seed(self.seed)
    }

    fn timed<T>(&self, f: impl FnOnce() -> anyhow::Result<T>) -> anyhow::Result<(T, Option<f64>)> {
        let start = Instant::now();
        let out = f()?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        Ok((out, self.timing.then_some(ms)))
    }
}

fn with_time(mut records: Vec<Record>, ms: Option<f64>) -> Vec<Record> {
    for r in &mut records {
        r.wall_ms = ms;
    }
    records
}

pub fn encrypt_demo(
    ctx: &Context,
    k: usize,
    message: &BitString,
    trials: usize,
) -> anyhow::Result<Vec<Record>> {
    ensure!(!message.is_empty(), "message must not be empty");
    let (records, ms) = ctx.timed(|| {
        let mut rng = ctx.rng().split("encrypt-demo", 0);
        let key = Key::random(k, &mut rng)?;
        let c = encrypt_message(message, &key, &mut rng)?;
        let out = decrypt_message(c, &key, &mut rng)?;
        let agree = out
            .iter()
            .zip(message.iter())
            .filter(|(a, b)| a == b)
            .count();

        let mut wrong_rng = ctx.rng().split("encrypt-demo-wrong-key", 0);
        let mut wrong_agree = 0usize;
        let mut wrong_trials = 0usize;
        while wrong_trials < trials {
            let other = Key::random(k, &mut wrong_rng)?;
            if other == key {
                continue;
            }
            let m = wrong_rng.bits(1);
            let c = encrypt_message(&m, &key, &mut wrong_rng)?;
            wrong_agree += (decrypt_message(c, &other, &mut wrong_rng)? == m) as usize;
            wrong_trials += 1;
        }
        let mut rows = vec![Record::new(
            "encrypt-demo-correct-key",
            ctx.seed,
            agree as f64 / message.len() as f64,
        )
        .k(k)
        .trials(message.len())
        .analytic(1.0)];
        if trials > 0 {
            rows.push(
                Record::new(
                    "encrypt-demo-wrong-key",
                    ctx.seed,
                    wrong_agree as f64 / trials as f64,
                )
                .k(k)
                .trials(trials)
                .analytic(0.5),
            );
        }
        Ok(rows)
    })?;
    Ok(with_time(records, ms))
}

/// `D(ρ_0^k, ρ_1^k)` per `k`; with `n > 1`, also the distance between `n`-bit plaintexts
/// at every Hamming distance `w` (it depends on `w` only).
pub fn distance(ctx: &Context, ks: &[usize], n: usize) -> anyhow::Result<Vec<Record>> {
    ensure!(n >= 1, "--n must be at least 1");
    let mut out = Vec::new();
    for &k in ks {
        let (d, ms) = ctx.timed(|| {
            Ok(trace_distance(
                &rho_b_direct(false, k)?,
                &rho_b_direct(true, k)?,
            )?)
        })?;
        out.extend(with_time(
            vec![Record::new("distance", ctx.seed, d)
                .k(k)
                .n(1)
                .analytic(analytic_distance(k))],
            ms,
        ));
        if n > 1 {
            let zero = BitString::zeros(n);
            let x = plaintext_density(&zero, k)?;
            for w in 1..=n {
                let y: BitString = (0..n).map(|i| i < w).collect();
                let (d, ms) = ctx.timed(|| Ok(trace_distance(&x, &plaintext_density(&y, k)?)?))?;
                let mut r = Record::new(format!("plaintext-distance-w{w}"), ctx.seed, d)
                    .k(k)
                    .n(n);
                r.wall_ms = ms;
                out.push(r);
            }
        }
    }
    Ok(out)
}

pub fn sigma_distance(ctx: &Context, ks: &[usize]) -> anyhow::Result<Vec<Record>> {
    let mut out = Vec::new();
    for &k in ks {
        let (d, ms) = ctx.timed(|| Ok(trace_distance(&sigma_b(false, k)?, &sigma_b(true, k)?)?))?;
        out.extend(with_time(
            vec![Record::new("sigma-distance", ctx.seed, d)
                .k(k)
                .analytic(analytic_sigma_distance(k))],
            ms,
        ));
    }
    Ok(out)
}

/// Largest entrywise gap between the channel image of `σ_b` and `ρ_b`, and the Kraus
/// completeness error.
pub fn channel_check(ctx: &Context, ks: &[usize]) -> anyhow::Result<Vec<Record>> {
    let mut out = Vec::new();
    for &k in ks {
        let (rows, ms) = ctx.timed(|| {
            let completeness = kraus_completeness_error(&hadamard_mixing_kraus(k)?)?;
            let mut gap: f64 = 0.0;
            for b in [false, true] {
                let mapped = hadamard_mixing_channel(&sigma_b(b, k)?, k)?;
                gap = gap.max(mapped.matrix().max_abs_diff(rho_b_direct(b, k)?.matrix()));
            }
            Ok(vec![
                Record::new("channel-identity", ctx.seed, gap)
                    .k(k)
                    .analytic(0.0),
                Record::new("kraus-completeness", ctx.seed, completeness)
                    .k(k)
                    .analytic(0.0),
            ])
        })?;
        out.extend(with_time(rows, ms));
    }
    Ok(out)
}

fn parity_mass(dist: &ProbabilityDistribution, parity: bool) -> f64 {
    dist.iter()
        .filter(|(r, _)| r.parity() == parity)
        .map(|(_, p)| p)
        .sum()
}

/// Exact Breidbart distance against `(√2/2)^k`, plus a sampled guessing experiment: a random
/// `b` is encrypted, measured in the Breidbart basis and guessed as the outcome parity.
pub fn breidbart(ctx: &Context, ks: &[usize], trials: usize) -> anyhow::Result<Vec<Record>> {
    let mut out = Vec::new();
    for &k in ks {
        let (rows, ms) = ctx.timed(|| {
            let exact = breidbart_classical_distance(k)?;
            let mut rows = vec![Record::new("breidbart-distance", ctx.seed, exact)
                .k(k)
                .analytic(analytic_distance(k))];
            if trials > 0 {
                let povm = breidbart_povm(k)?;
                // probability that the outcome parity equals b, per b
                let mut hit = [0.0; 2];
                for b in [false, true] {
                    hit[b as usize] =
                        parity_mass(&outcome_distribution(&rho_b_direct(b, k)?, &povm)?, b);
                }
                let mut rng = ctx.rng().split("breidbart-guess", k as u64);
                let wins = (0..trials)
                    .filter(|_| {
                        let b = rng.bit();
                        rng.bernoulli(hit[b as usize])
                    })
                    .count();
                rows.push(
                    Record::new(
                        "breidbart-guess-rate",
                        ctx.seed,
                        wins as f64 / trials as f64,
                    )
                    .k(k)
                    .trials(trials)
                    .analytic(0.5 + 0.5 * analytic_distance(k)),
                );
            }
            Ok(rows)
        })?;
        out.extend(with_time(rows, ms));
    }
    Ok(out)
}

pub fn scan(ctx: &Context, ks: &[usize], grid: usize) -> anyhow::Result<Vec<Record>> {
    let mut out = Vec::new();
    for &k in ks {
        let (res, ms) = ctx.timed(|| Ok(measurement_family_scan(k, grid)?))?;
        out.extend(with_time(
            vec![
                Record::new("scan-best-distance", ctx.seed, res.best_distance)
                    .k(k)
                    .trials(grid + 1)
                    .analytic(res.trace_distance),
                Record::new("scan-best-angle", ctx.seed, res.best_angle)
                    .k(k)
                    .trials(grid + 1)
                    .analytic(std::f64::consts::FRAC_PI_8),
            ],
            ms,
        ));
    }
    Ok(out)
}

pub fn nosignal(ctx: &Context, trials: usize, povms: usize) -> anyhow::Result<Vec<Record>> {
    let (rows, ms) = ctx.timed(|| {
        let td = trace_distance(&eve_marginal(false), &eve_marginal(true))?;
        let mut rng = ctx.rng().split("random-povm", 0);
        let mut adv: f64 = 0.0;
        for _ in 0..povms {
            adv = adv.max(signalling_advantage(&random_qubit_povm(&mut rng))?);
        }
        let mut rows = vec![
            Record::new("nosignal-marginal-distance", ctx.seed, td).analytic(0.0),
            Record::new("nosignal-max-advantage", ctx.seed, adv)
                .trials(povms)
                .analytic(0.0),
        ];
        if trials > 0 {
            let half = ComplexMatrix::identity(2).scale(0.5);
            for b in [false, true] {
                let mut rng = ctx.rng().split("alice", b as u64);
                let gap = empirical_marginal(b, trials, &mut rng).max_abs_diff(&half);
                rows.push(
                    Record::new(
                        format!("nosignal-empirical-gap-b{}", b as u8),
                        ctx.seed,
                        gap,
                    )
                    .trials(trials)
                    .analytic(0.0),
                );
            }
        }
        Ok(rows)
    })?;
    Ok(with_time(rows, ms))
}

pub fn unicity(
    ctx: &Context,
    ks: &[usize],
    sample_len: usize,
    bound: usize,
    runs: usize,
) -> anyhow::Result<Vec<Record>> {
    let cfg = DetectorConfig::new(sample_len, bound)?;
    let mut out = Vec::new();
    for &k in ks {
        let (rows, ms) = ctx.timed(|| Ok(compare_unicity(&[k], &cfg, runs, &ctx.rng())?))?;
        for row in rows {
            let base = |name: &str, v: f64| {
                Record::new(name, ctx.seed, v)
                    .k(k)
                    .detector(sample_len, bound)
                    .trials(runs)
            };
            let consumed = |q: Option<usize>| q.map_or(f64::NAN, |q| q as f64);
            out.extend(with_time(
                vec![
                    base(
                        "unicity-probabilistic-success",
                        row.probabilistic.success_rate(),
                    )
                    .analytic(1.0),
                    base(
                        "unicity-probabilistic-qubits",
                        consumed(row.probabilistic.qubits_consumed),
                    )
                    .analytic(row.qubits_probabilistic as f64),
                    base(
                        "unicity-deterministic-success",
                        row.deterministic.success_rate(),
                    )
                    .analytic(1.0),
                    base(
                        "unicity-deterministic-qubits",
                        consumed(row.deterministic.qubits_consumed),
                    )
                    .analytic(row.qubits_deterministic as f64),
                    base("unicity-ratio", row.ratio).analytic((1u64 << k) as f64 / 2.0),
                ],
                ms,
            ));
        }
    }
    Ok(out)
}

pub struct CostUnits {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
}

pub fn complexity(
    ctx: &Context,
    n: usize,
    k: usize,
    l: usize,
    t: &CostUnits,
) -> anyhow::Result<Vec<Record>> {
    let to_u32 =
        |v: usize, name: &str| u32::try_from(v).with_context(|| format!("--{name} too large"));
    let est = complexity_estimates(&ComplexityProfile {
        t1: t.t1,
        t2: t.t2,
        t3: t.t3,
        t4: t.t4,
        n: to_u32(n, "n")?,
        k: to_u32(k, "k")?,
        l: to_u32(l, "l")?,
    })?;
    if est.overflow {
        bail!("cost estimate overflowed f64 for n={n}, k={k}, l={l}");
    }
    let row = |name: &str, v: f64| Record::new(name, ctx.seed, v).k(k).n(n).l(l);
    Ok(vec![
        row("complexity-encryption", est.encryption),
        row("complexity-decryption", est.decryption),
        row("complexity-decryption-worst", est.decryption_worst),
        row("complexity-exhaustive", est.exhaustive),
    ])
}

/// Criterion rows carry the worst observed metric and its threshold.
pub fn criterion_record(ctx: &Context, c: &CriterionOutcome) -> Record {
    let mut r = Record::new(format!("acceptance-{:02}", c.id), ctx.seed, c.observed);
    r.analytic = Some(c.threshold);
    r
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub criteria: Vec<CriterionOutcome>,
    pub records: Vec<Record>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        for c in &self.criteria {
            s.push_str(&c.line());
            s.push('\n');
        }
        s.push_str(&format!(
            "{} of {} criteria passed\n",
            self.criteria.iter().filter(|c| c.passed).count(),
            self.criteria.len()
        ));
        s
    }
}

/// Runs criteria 1–10, then reruns them from the same seed and requires a byte-identical
/// rendering as the determinism criterion.
pub fn selftest(ctx: &Context) -> anyhow::Result<SelftestReport> {
    let first = acceptance::run_all(ctx.seed)?;
    let again = acceptance::run_all(ctx.seed)?;
    let to_records = |cs: &[CriterionOutcome]| {
        cs.iter()
            .map(|c| criterion_record(ctx, c))
            .collect::<Vec<_>>()
    };
    let a = render_csv(&to_records(&first))?;
    let b = render_csv(&to_records(&again))?;
    let same = a == b && first == again;
    let mut criteria = first;
    criteria.push(CriterionOutcome {
        id: 11,
        name: "determinism",
        passed: same,
        observed: (!same) as u8 as f64,
        threshold: 0.0,
        detail: "two in-process runs render identically".into(),
    });
    let records = to_records(&criteria);
    Ok(SelftestReport { criteria, records })
}
