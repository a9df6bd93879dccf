//! Measurement attacks on the cipher states: generic POVM evaluation and sampling,
//! Breidbart's intermediate-basis measurement, and a scan over product projective bases.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8, PI};

use rayon::prelude::*;

use crate::bits::BitString;
use crate::densities::{rho_b_direct, MAX_K};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, kolmogorov_distance, kron_vec, re, trace_distance, ComplexMatrix,
    DensityOperator, ProbabilityDistribution, C64,
};
use crate::rng::SimRng;

pub const POVM_TOL: f64 = 1e-10;

/// One POVM element. Rank-one projectors are kept as their vector so that
/// `2^k`-outcome product measurements never materialize `2^k` dense matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum PovmElement {
    Projector(Vec<C64>),
    Operator(ComplexMatrix),
}

impl PovmElement {
    fn dim(&self) -> usize {
        match self {
            PovmElement::Projector(v) => v.len(),
            PovmElement::Operator(m) => m.dim(),
        }
    }

    /// `Tr(ρ E)`.
    pub fn probability(&self, rho: &ComplexMatrix) -> Result<f64> {
        match self {
            PovmElement::Projector(v) => rho.expectation(v),
            PovmElement::Operator(e) => Ok(rho.matmul(e)?.trace().re),
        }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        match self {
            PovmElement::Projector(v) => ComplexMatrix::outer(v),
            PovmElement::Operator(m) => m.clone(),
        }
    }
}

/// A labelled measurement: positive elements summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<PovmElement>,
    labels: Vec<BitString>,
}

impl Povm {
    /// General POVM from explicit operators.
    pub fn new(elements: Vec<ComplexMatrix>, labels: Vec<BitString>) -> Result<Self> {
        let povm = Povm {
            elements: elements.into_iter().map(PovmElement::Operator).collect(),
            labels,
        };
        povm.validate_shape()?;
        let dim = povm.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for e in &povm.elements {
            let m = e.to_matrix();
            let min = hermitian_eigenvalues(&m)
                .map_err(|e| Error::InvalidPovm(e.to_string()))?
                .last()
                .copied()
                .unwrap_or(0.0);
            if min < -POVM_TOL {
                return Err(Error::InvalidPovm(format!(
                    "element has eigenvalue {min:e}"
                )));
            }
            sum = sum.try_add(&m)?;
        }
        let gap = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if gap > POVM_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {gap:e}"
            )));
        }
        Ok(povm)
    }

    /// Projective measurement onto an orthonormal basis; `vectors[i]` carries `labels[i]`.
    pub fn from_basis(vectors: Vec<Vec<C64>>, labels: Vec<BitString>) -> Result<Self> {
        let povm = Povm {
            elements: vectors.into_iter().map(PovmElement::Projector).collect(),
            labels,
        };
        povm.validate_shape()?;
        if povm.elements.len() != povm.dim() {
            return Err(Error::InvalidPovm(format!(
                "{} vectors cannot span dimension {}",
                povm.elements.len(),
                povm.dim()
            )));
        }
        let vs: Vec<&Vec<C64>> = povm
            .elements
            .iter()
            .map(|e| match e {
                PovmElement::Projector(v) => v,
                PovmElement::Operator(_) => unreachable!(),
            })
            .collect();
        for (i, a) in vs.iter().enumerate() {
            for (j, b) in vs.iter().enumerate().skip(i) {
                let ip: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (ip - re(expect)).norm() > POVM_TOL {
                    return Err(Error::InvalidPovm(format!(
                        "basis not orthonormal at ({i},{j})"
                    )));
                }
            }
        }
        Ok(povm)
    }

    fn validate_shape(&self) -> Result<()> {
        if self.elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        if self.elements.len() != self.labels.len() {
            return Err(Error::InvalidPovm(
                "label count differs from element count".into(),
            ));
        }
        let dim = self.elements[0].dim();
        if self.elements.iter().any(|e| e.dim() != dim) {
            return Err(Error::InvalidPovm(
                "elements have different dimensions".into(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        if !self.labels.iter().all(|l| seen.insert(l.clone())) {
            return Err(Error::InvalidPovm("duplicate outcome label".into()));
        }
        Ok(())
    }

    /// Tensor product of the same single-qubit basis on `k` qubits. The outcome label is
    /// the string of per-qubit indices.
    pub fn product_basis(single: &[[C64; 2]; 2], k: usize) -> Result<Self> {
        if k > MAX_K {
            return Err(Error::DimensionCap {
                dim: 1 << k.min(63),
                cap: 1 << MAX_K,
            });
        }
        let (vectors, labels) = BitString::enumerate(k)
            .map(|label| {
                let v = label
                    .iter()
                    .fold(vec![re(1.0)], |acc, o| kron_vec(&acc, &single[o as usize]));
                (v, label)
            })
            .unzip();
        Self::from_basis(vectors, labels)
    }

    pub fn computational(k: usize) -> Result<Self> {
        Self::product_basis(&rotated_basis(0.0), k)
    }

    /// `{I/2, I/2}` on one qubit.
    pub fn uniform_qubit() -> Self {
        let half = ComplexMatrix::identity(2).scale(0.5);
        Povm::new(
            vec![half.clone(), half],
            vec![BitString::from_index(0, 1), BitString::from_index(1, 1)],
        )
        .expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> &[BitString] {
        &self.labels
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }
}

/// `{cos θ|0⟩ + sin θ|1⟩, −sin θ|0⟩ + cos θ|1⟩}`.
pub fn rotated_basis(theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[re(c), re(s)], [re(-s), re(c)]]
}

/// The single-qubit basis rotated by π/8 from the computational one, halfway between the
/// two conjugate bases. It is the eigenbasis of `ρ_0^1` (and of `ρ_0^1 − ρ_1^1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreidbartBasis {
    pub angle: f64,
    pub vectors: [[C64; 2]; 2],
}

impl Default for BreidbartBasis {
    fn default() -> Self {
        BreidbartBasis {
            angle: FRAC_PI_8,
            vectors: rotated_basis(FRAC_PI_8),
        }
    }
}

/// `p(label) = Tr(ρ E_label)`.
pub fn outcome_distribution(rho: &DensityOperator, povm: &Povm) -> Result<ProbabilityDistribution> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: povm.dim(),
        });
    }
    let probs = povm
        .elements
        .iter()
        .map(|e| e.probability(rho.matrix()))
        .collect::<Result<Vec<f64>>>()?;
    ProbabilityDistribution::new(
        povm.labels
            .iter()
            .cloned()
            .zip(probs)
            .collect::<BTreeMap<_, _>>(),
    )
}

/// Breidbart measurement on `k` qubits: `2^k` rank-one product projectors.
pub fn breidbart_povm(k: usize) -> Result<Povm> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    Povm::product_basis(&BreidbartBasis::default().vectors, k)
}

/// Closed form `P_r(ρ_0^k) − P_r(ρ_1^k) = 2 (−1)^{w(r)} (√2/4)^k`.
pub fn breidbart_prob_difference(r: &BitString, k: usize) -> Result<f64> {
    if r.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            actual: r.len(),
        });
    }
    let sign = if r.weight().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Ok(2.0 * sign * (0.5 * FRAC_1_SQRT_2).powi(k as i32))
}

/// Kolmogorov distance between the exact Breidbart outcome distributions of `ρ_0^k`, `ρ_1^k`.
pub fn breidbart_classical_distance(k: usize) -> Result<f64> {
    let povm = breidbart_povm(k)?;
    let p = outcome_distribution(&rho_b_direct(false, k)?, &povm)?;
    let q = outcome_distribution(&rho_b_direct(true, k)?, &povm)?;
    kolmogorov_distance(&p, &q)
}

/// Largest key length for [`measurement_family_scan`].
pub const SCAN_MAX_K: usize = 4;
pub const DEFAULT_SCAN_GRID: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub k: usize,
    /// `(angle, classical distance)` for every grid point, in grid order.
    pub points: Vec<(f64, f64)>,
    pub best_angle: f64,
    pub best_distance: f64,
    /// The grid point nearest to π/8 is the argmax.
    pub breidbart_is_argmax: bool,
    pub trace_distance: f64,
    /// `max(distance) − trace_distance`; non-positive up to rounding.
    pub max_excess: f64,
}

/// Scans product projective bases `rotated_basis(θ)^{⊗k}` for `θ = jπ/grid`,
/// `j = 0..grid`, and reports the one separating `ρ_0^k` and `ρ_1^k` best.
/// Ties within 1e-12 go to the lowest angle.
pub fn measurement_family_scan(k: usize, grid: usize) -> Result<ScanResult> {
    if grid == 0 {
        return Err(Error::InvalidParameter("empty measurement family".into()));
    }
    if k == 0 || k > SCAN_MAX_K {
        return Err(Error::InvalidParameter(format!(
            "scan supports 1 ≤ k ≤ {SCAN_MAX_K}, got {k}"
        )));
    }
    let rho0 = rho_b_direct(false, k)?;
    let rho1 = rho_b_direct(true, k)?;
    let points = (0..grid)
        .into_par_iter()
        .map(|j| {
            let theta = j as f64 * PI / grid as f64;
            let povm = Povm::product_basis(&rotated_basis(theta), k)?;
            let d = kolmogorov_distance(
                &outcome_distribution(&rho0, &povm)?,
                &outcome_distribution(&rho1, &povm)?,
            )?;
            Ok((theta, d))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let (mut best_angle, mut best_distance) = points[0];
    for &(theta, d) in &points[1..] {
        if d > best_distance + 1e-12 {
            best_angle = theta;
            best_distance = d;
        }
    }
    let nearest = (FRAC_PI_8 * grid as f64 / PI).round() as usize % grid;
    let nearest_angle = nearest as f64 * PI / grid as f64;
    let td = trace_distance(&rho0, &rho1)?;
    Ok(ScanResult {
        k,
        best_angle,
        best_distance,
        breidbart_is_argmax: (best_angle - nearest_angle).abs() < 1e-15,
        trace_distance: td,
        max_excess: best_distance - td,
        points,
    })
}

fn sample_from(dist: &ProbabilityDistribution, rng: &mut SimRng) -> BitString {
    let u = rng.uniform();
    let mut acc = 0.0;
    let mut last = None;
    for (label, p) in dist.iter() {
        acc += p;
        if p > 0.0 {
            last = Some(label);
        }
        if u < acc && p > 0.0 {
            return label.clone();
        }
    }
    // Rounding left u above the cumulative total: take the last outcome with mass.
    last.expect("distribution has positive mass").clone()
}

/// Draws one outcome label with Born probabilities.
pub fn sample_measurement(
    rho: &DensityOperator,
    povm: &Povm,
    rng: &mut SimRng,
) -> Result<BitString> {
    Ok(sample_from(&outcome_distribution(rho, povm)?, rng))
}

/// [`sample_measurement`] on a symbolic product state.
pub fn sample_product_state(
    state: &crate::scheme::ProductState,
    povm: &Povm,
    rng: &mut SimRng,
) -> Result<BitString> {
    sample_measurement(&state.density()?, povm, rng)
}
