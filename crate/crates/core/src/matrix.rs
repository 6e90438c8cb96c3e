//! Dense complex matrices for small quantum systems.
//!
//! Everything here is sized for dimensions up to 64. Tensor factors are ordered
//! so that the first factor is the most significant index, which matches
//! [`kron`]: `kron(a, b)[(i*db + k, j*db + l)] = a[(i, j)] * b[(k, l)]`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Entrywise tolerance on `|h - h^dagger|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;
const MAX_DIM: usize = 64;

pub(crate) const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting non-square or non-finite input.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries cannot form a {dim}x{dim} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch("rows of unequal length".into()));
            }
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::from_vec(dim, data)
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(h + h^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
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

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product of unequal dimensions");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Dimensions of the tensor factors of a composite system, most significant first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredDims {
    factors: Vec<usize>,
}

impl FactoredDims {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|&d| d == 0) {
            return Err(Error::DimensionMismatch(format!(
                "invalid factor list {factors:?}"
            )));
        }
        let total = factors.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        match total {
            Some(t) if t <= MAX_DIM => Ok(Self { factors }),
            _ => Err(Error::DimensionMismatch(format!(
                "factors {factors:?} exceed dimension {MAX_DIM}"
            ))),
        }
    }

    pub fn single(dim: usize) -> Self {
        Self::new(vec![dim]).expect("dimension in range")
    }

    pub fn qubits(n: usize) -> Self {
        Self::new(vec![2; n]).expect("qubit count in range")
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn total(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if self.total() != dim {
            return Err(Error::DimensionMismatch(format!(
                "factors {:?} have product {} but the matrix has dimension {dim}",
                self.factors,
                self.total()
            )));
        }
        Ok(())
    }

    /// Keeps only the listed factors, in ascending order.
    pub fn subset(&self, keep: &[usize]) -> Result<Self> {
        let keep = self.normalize_keep(keep)?;
        Self::new(keep.iter().map(|&k| self.factors[k]).collect())
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for k in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.factors[k + 1];
        }
        strides
    }

    fn normalize_keep(&self, keep: &[usize]) -> Result<Vec<usize>> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::InvalidArgument("no factors kept".into()));
        }
        if let Some(&k) = keep.iter().find(|&&k| k >= self.factors.len()) {
            return Err(Error::DimensionMismatch(format!(
                "factor index {k} out of range for {} factors",
                self.factors.len()
            )));
        }
        Ok(keep)
    }

    /// Flat offsets contributed by every multi-index over the given factors.
    fn offsets(&self, which: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &k in which {
            let mut next = Vec::with_capacity(offsets.len() * self.factors[k]);
            for &o in &offsets {
                for i in 0..self.factors[k] {
                    next.push(o + i * strides[k]);
                }
            }
            offsets = next;
        }
        offsets
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let mut out = ComplexMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Traces out every factor not listed in `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: &FactoredDims, keep: &[usize]) -> Result<ComplexMatrix> {
    dims.check(m.dim)?;
    let keep = dims.normalize_keep(keep)?;
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let kept_off = dims.offsets(&keep);
    let traced_off = dims.offsets(&traced);
    let n = kept_off.len();
    let mut out = ComplexMatrix::zeros(n);
    for (a, &ra) in kept_off.iter().enumerate() {
        for (b, &rb) in kept_off.iter().enumerate() {
            out[(a, b)] = traced_off.iter().map(|&t| m[(ra + t, rb + t)]).sum();
        }
    }
    Ok(out)
}

/// Transposes the indices of factor `which` only.
pub fn partial_transpose(m: &ComplexMatrix, dims: &FactoredDims, which: usize) -> Result<ComplexMatrix> {
    dims.check(m.dim)?;
    if which >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "factor index {which} out of range for {} factors",
            dims.len()
        )));
    }
    let stride = dims.strides()[which];
    let d = dims.factors[which];
    let digit = |idx: usize| (idx / stride) % d;
    let mut out = ComplexMatrix::zeros(m.dim);
    for r in 0..m.dim {
        let (rw, rbase) = (digit(r), r - digit(r) * stride);
        for col in 0..m.dim {
            let (cw, cbase) = (digit(col), col - digit(col) * stride);
            out[(rbase + cw * stride, cbase + rw * stride)] = m[(r, col)];
        }
    }
    Ok(out)
}

/// Spectral decomposition `h = U diag(values) U^dagger`, values descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.dim).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `U f(diag) U^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim;
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.vectors[(j, k)].conj() * fv[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|v| v)
    }
}

fn ensure_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !h.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    Ok(h.hermitian_part())
}

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let mut a = ensure_hermitian(h)?;
    let n = a.dim;
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off < JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                // Rotate in the (p, q) plane after removing the phase of a_pq.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // Columns: a' = a J with J[p,p]=c, J[q,q]=c, J[p,q]=s*phase, J[q,p]=-s*conj(phase).
                let jpq = phase * sn;
                let jqp = -phase.conj() * sn;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * cs;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs + aqk * jqp.conj();
                    a[(q, k)] = apk * jpq.conj() + aqk * cs;
                }
                a[(p, q)] = c(0.0, 0.0);
                a[(q, p)] = c(0.0, 0.0);
                a[(p, p)] = c(a[(p, p)].re, 0.0);
                a[(q, q)] = c(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * cs;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Real eigenvalues in descending order.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(h)?.values)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.iter().map(|v| v.abs()).sum())
}

/// Principal square root of a positive semidefinite matrix; tiny negative
/// eigenvalues are clipped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eigen(m)?.map(|v| v.max(0.0).sqrt()))
}
