//! Dense complex matrix algebra for operators on at most a few qubits.
//!
//! Matrices are stored row-major. Tensor products follow the usual layout where the left
//! factor indexes the coarse blocks, so qubit 0 is the most significant bit of a basis index.

use std::collections::BTreeMap;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::bits::BitString;
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest dimension any constructed matrix may reach.
pub const DEFAULT_DIM_CAP: usize = 1 << 12;
/// Largest dimension handed to the eigensolver.
pub const FULL_EIGEN_CAP: usize = 1 << 8;
/// Asymmetry that is silently symmetrized away before eigensolving.
pub const HERMITIAN_TOL: f64 = 1e-10;
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = re(1.0);
        }
        m
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_vec(entries: Vec<C64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() || dim == 0 {
            return Err(Error::InvalidParameter(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(ComplexMatrix { dim, data: entries })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidParameter("rows are not square".into()));
        }
        Self::from_vec(rows.iter().flat_map(|r| r.iter().map(|&x| re(x))).collect())
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = re(v);
        }
        m
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dimensions");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `A - A†`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self[(i, l)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[l * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    /// `⟨v|A|v⟩`, real part.
    pub fn expectation(&self, v: &[C64]) -> Result<f64> {
        let av = self.apply(v)?;
        Ok(v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum::<C64>().re)
    }

    fn checked_same_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    pub fn try_add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.checked_same_dim(other)?;
        Ok(ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.checked_same_dim(other)?;
        Ok(ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs)
            .expect("matrix addition on mismatched dimensions")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs)
            .expect("matrix subtraction on mismatched dimensions")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
            .expect("matrix product on mismatched dimensions")
    }
}

/// Tensor product with the default dimension cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_cap(a, b, DEFAULT_DIM_CAP)
}

pub fn kron_with_cap(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let dim = a.dim.checked_mul(b.dim).ok_or(Error::DimensionCap {
        dim: usize::MAX,
        cap,
    })?;
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    let (na, nb) = (a.dim, b.dim);
    let mut out = ComplexMatrix::zeros(dim);
    for ai in 0..na {
        for aj in 0..na {
            let x = a[(ai, aj)];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for bi in 0..nb {
                let row = (ai * nb + bi) * dim + aj * nb;
                for bj in 0..nb {
                    out.data[row + bj] = x * b[(bi, bj)];
                }
            }
        }
    }
    Ok(out)
}

/// Tensor product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Descending.
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<Vec<C64>>,
    pub sweeps: usize,
}

fn prepare_hermitian(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim > FULL_EIGEN_CAP {
        return Err(Error::DimensionCap {
            dim: a.dim,
            cap: FULL_EIGEN_CAP,
        });
    }
    let asym = a.hermitian_asymmetry();
    if asym.is_nan() || asym >= HERMITIAN_TOL {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    // Replace A by (A + A†)/2.
    let n = a.dim;
    let mut h = a.clone();
    for i in 0..n {
        h[(i, i)] = re(a[(i, i)].re);
        for j in i + 1..n {
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
    }
    Ok(h)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi. Each rotation first removes the phase of the pivot
/// `a_pq = |a_pq| e^{iφ}` and then applies a real plane rotation, i.e. `A ← G† A G` with
/// `G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]` on the (p, q) plane.
fn jacobi(a: &ComplexMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    let mut a = prepare_hermitian(a)?;
    let n = a.dim;
    let mut v = if want_vectors {
        Some(ComplexMatrix::identity(n))
    } else {
        None
    };
    let tol = JACOBI_TOL * a.frobenius_norm().max(1.0);
    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a);
    while off >= tol {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Skip pivots already negligible against both diagonal entries.
                if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = re(0.0);
                    a[(q, p)] = re(0.0);
                    continue;
                }
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                let ph_conj = phase.conj();

                // Columns: A ← A G.
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * cs - aiq * ph_conj * sn;
                    a[(i, q)] = aip * sn + aiq * ph_conj * cs;
                }
                // Rows: A ← G† A.
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * cs - aqj * phase * sn;
                    a[(q, j)] = apj * sn + aqj * phase * cs;
                }
                a[(p, q)] = re(0.0);
                a[(q, p)] = re(0.0);
                a[(p, p)] = re(app - t * mag);
                a[(q, q)] = re(aqq + t * mag);

                if let Some(v) = v.as_mut() {
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = vip * cs - viq * ph_conj * sn;
                        v[(i, q)] = vip * sn + viq * ph_conj * cs;
                    }
                }
            }
        }
        off = off_diagonal_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = match v {
        Some(v) => order
            .iter()
            .map(|&col| (0..n).map(|row| v[(row, col)]).collect())
            .collect(),
        None => Vec::new(),
    };
    Ok(HermitianEigen {
        values,
        vectors,
        sweeps,
    })
}

/// All eigenvalues of a Hermitian matrix, in descending order.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    jacobi(a, false).map(|e| e.values)
}

/// Eigenvalues (descending) together with orthonormal eigenvectors.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    jacobi(a, true)
}

/// Sum of singular values of a Hermitian matrix, `tr|A|`.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(a)?.iter().map(|l| l.abs()).sum())
}

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

pub const DENSITY_HERMITIAN_TOL: f64 = 1e-12;
pub const DENSITY_TRACE_TOL: f64 = 1e-12;
pub const DENSITY_EIGEN_TOL: f64 = 1e-10;

impl DensityOperator {
    /// Validates all invariants. Positivity is only checked up to [`FULL_EIGEN_CAP`];
    /// larger operators are accepted on the Hermitian and trace checks alone.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let asym = matrix.hermitian_asymmetry();
        if asym > DENSITY_HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("asymmetry {asym:e}")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TRACE_TOL || tr.im.abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        if matrix.dim <= FULL_EIGEN_CAP {
            let min = hermitian_eigenvalues(&matrix)?
                .last()
                .copied()
                .unwrap_or(0.0);
            if min < -DENSITY_EIGEN_TOL {
                return Err(Error::InvalidDensity(format!(
                    "negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(DensityOperator { matrix })
    }

    /// For builders whose output is a convex mixture of pure states by construction.
    pub(crate) fn from_mixture(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.hermitian_asymmetry() <= DENSITY_HERMITIAN_TOL);
        debug_assert!((matrix.trace().re - 1.0).abs() <= 1e-9);
        DensityOperator { matrix }
    }

    pub fn pure(state: &[C64]) -> Result<Self> {
        let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidDensity(format!("state norm² {norm}")));
        }
        Ok(DensityOperator {
            matrix: ComplexMatrix::outer(state),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn kron(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(DensityOperator {
            matrix: kron(&self.matrix, &other.matrix)?,
        })
    }
}

/// `D(a, b) = ½ tr|a − b|`.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    let diff = a.matrix.try_sub(&b.matrix)?;
    Ok((0.5 * trace_norm(&diff)?).clamp(0.0, 1.0))
}

pub const DISTRIBUTION_TOL: f64 = 1e-12;

/// Probabilities over bit-string outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    outcomes: BTreeMap<BitString, f64>,
}

impl ProbabilityDistribution {
    pub fn new(outcomes: BTreeMap<BitString, f64>) -> Result<Self> {
        // Born probabilities can land a few ulps below zero.
        let mut outcomes = outcomes;
        for (label, p) in outcomes.iter_mut() {
            if !p.is_finite() || *p < -DISTRIBUTION_TOL || *p > 1.0 + DISTRIBUTION_TOL {
                return Err(Error::InvalidDistribution(format!("p({label}) = {p}")));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let total: f64 = outcomes.values().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::InvalidDistribution(format!("total {total}")));
        }
        Ok(ProbabilityDistribution { outcomes })
    }

    pub fn from_pairs<I: IntoIterator<Item = (BitString, f64)>>(pairs: I) -> Result<Self> {
        Self::new(pairs.into_iter().collect())
    }

    pub fn point_mass(
        label: BitString,
        space: impl IntoIterator<Item = BitString>,
    ) -> Result<Self> {
        let mut map: BTreeMap<BitString, f64> = space.into_iter().map(|l| (l, 0.0)).collect();
        map.insert(label, 1.0);
        Self::new(map)
    }

    pub fn prob(&self, label: &BitString) -> f64 {
        self.outcomes.get(label).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitString, f64)> {
        self.outcomes.iter().map(|(l, &p)| (l, p))
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// `½ Σ_r |p(r) − q(r)|` over a shared outcome space.
pub fn kolmogorov_distance(
    p: &ProbabilityDistribution,
    q: &ProbabilityDistribution,
) -> Result<f64> {
    if p.outcomes.len() != q.outcomes.len() || p.outcomes.keys().ne(q.outcomes.keys()) {
        return Err(Error::OutcomeMismatch);
    }
    let s: f64 = p
        .outcomes
        .values()
        .zip(q.outcomes.values())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((0.5 * s).clamp(0.0, 1.0))
}
