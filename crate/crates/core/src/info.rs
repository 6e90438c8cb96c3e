//! Entropies, divergence and fidelity of finite-dimensional states, plus
//! d-level teleportation.
//!
//! All logarithms are base 2.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{c, hermitian_eigen, hermitian_eigenvalues, kron, kron_vec, partial_trace, psd_sqrt, ComplexMatrix, FactoredDims, C64};
use crate::rng;

pub const STATE_TOL: f64 = 1e-10;
const SUPPORT_TOL: f64 = 1e-12;

/// Hermitian, positive semidefinite, unit-trace matrix with labelled tensor factors.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: FactoredDims,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: FactoredDims) -> Result<Self> {
        dims.check(matrix.dim())?;
        let defect = matrix.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {defect:e})")));
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let min = *hermitian_eigenvalues(&matrix)?.last().expect("nonempty");
        if min < -STATE_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix, dims })
    }

    /// Single-factor state.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let dims = FactoredDims::new(vec![matrix.dim()])?;
        Self::new(matrix, dims)
    }

    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, dims: FactoredDims) -> Self {
        Self { matrix, dims }
    }

    pub fn maximally_mixed(dims: FactoredDims) -> Self {
        let n = dims.total();
        Self {
            matrix: ComplexMatrix::identity(n).scale(1.0 / n as f64),
            dims,
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            matrix: ComplexMatrix::outer(&psi.vector),
            dims: psi.dims.clone(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &FactoredDims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).expect("density matrices are Hermitian")
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut f = self.dims.factors().to_vec();
        f.extend_from_slice(other.dims.factors());
        Self {
            matrix: kron(&self.matrix, &other.matrix),
            dims: FactoredDims::new(f).expect("tensor dimension in range"),
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        Ok(Self {
            matrix: m.hermitian_part(),
            dims: self.dims.subset(keep)?,
        })
    }

    /// Convex combination `sum_i w_i rho_i`.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::InvalidArgument("empty mixture".into()));
        };
        let mut acc = ComplexMatrix::zeros(first.dim());
        for (w, rho) in parts {
            if rho.dims != first.dims {
                return Err(Error::DimensionMismatch("mixture of states with different factors".into()));
            }
            acc = &acc + &rho.matrix.scale(*w);
        }
        Self::new(acc, first.dims.clone())
    }
}

/// Unit vector with labelled tensor factors.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    vector: Vec<C64>,
    dims: FactoredDims,
}

impl PureState {
    pub fn new(vector: Vec<C64>, dims: FactoredDims) -> Result<Self> {
        dims.check(vector.len())?;
        let norm = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self { vector, dims })
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(mut vector: Vec<C64>, dims: FactoredDims) -> Result<Self> {
        let norm = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for z in &mut vector {
            *z /= norm;
        }
        Self::new(vector, dims)
    }

    pub fn basis(dims: FactoredDims, index: usize) -> Result<Self> {
        let n = dims.total();
        if index >= n {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range")));
        }
        let mut v = vec![c(0.0, 0.0); n];
        v[index] = c(1.0, 0.0);
        Self::new(v, dims)
    }

    /// Unitarily invariant random state: complex Gaussian amplitudes, normalized.
    pub fn random(dims: FactoredDims, rng: &mut impl Rng) -> Self {
        let v = (0..dims.total())
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(v, dims).expect("Gaussian vector is nonzero")
    }

    pub fn vector(&self) -> &[C64] {
        &self.vector
    }

    pub fn dims(&self) -> &FactoredDims {
        &self.dims
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.vector.len() != other.vector.len() {
            return Err(Error::DimensionMismatch("inner product of unequal dimensions".into()));
        }
        Ok(self.vector.iter().zip(&other.vector).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut f = self.dims.factors().to_vec();
        f.extend_from_slice(other.dims.factors());
        Self {
            vector: kron_vec(&self.vector, &other.vector),
            dims: FactoredDims::new(f).expect("tensor dimension in range"),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// `-sum p log2 p`, treating tiny negative round-off as zero.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.eigenvalues())
}

/// Entropy of a Hermitian unit-trace matrix that has not been wrapped as a state.
pub fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    Ok(shannon_entropy(&hermitian_eigenvalues(m)?))
}

pub fn binary_entropy(z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain { value: z, domain: "[0, 1]" });
    }
    Ok(shannon_entropy(&[z, 1.0 - z]))
}

/// Value of a quantum divergence; `Infinite` when the support condition fails.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn value(self) -> f64 {
        match self {
            Divergence::Finite(v) => v,
            Divergence::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Divergence::Finite(_))
    }
}

impl PartialOrd for Divergence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Divergence::Infinite, Divergence::Infinite) => Some(Ordering::Equal),
            (Divergence::Infinite, _) => Some(Ordering::Greater),
            (_, Divergence::Infinite) => Some(Ordering::Less),
            (Divergence::Finite(a), Divergence::Finite(b)) => a.partial_cmp(b),
        }
    }
}

/// `Tr rho (log2 rho - log2 sigma)`.
pub fn quantum_divergence(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Divergence> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "divergence between dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let es = hermitian_eigen(sigma.matrix())?;
    let mut cross = 0.0;
    for (k, &s) in es.values.iter().enumerate() {
        let v = es.vector(k);
        let rv = rho.matrix().mul_vec(&v);
        let weight: f64 = v.iter().zip(&rv).map(|(a, b)| (a.conj() * b).re).sum();
        if s < SUPPORT_TOL {
            if weight > SUPPORT_TOL {
                return Ok(Divergence::Infinite);
            }
            continue;
        }
        cross += weight * s.log2();
    }
    Ok(Divergence::Finite((-von_neumann_entropy(rho) - cross).max(0.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FidelityBures {
    pub fidelity: f64,
    pub bures: f64,
}

/// `F = Tr sqrt(sqrt(rho) sigma sqrt(rho))` and `B = 2 sqrt(1 - F)`.
pub fn fidelity_bures(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<FidelityBures> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch("fidelity of unequal dimensions".into()));
    }
    let sr = psd_sqrt(rho.matrix())?;
    let inner = &(&sr * sigma.matrix()) * &sr;
    let f: f64 = hermitian_eigenvalues(&inner.hermitian_part())?
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .sum();
    let fidelity = f.clamp(0.0, 1.0);
    Ok(FidelityBures {
        fidelity,
        bures: 2.0 * (1.0 - fidelity).sqrt(),
    })
}

/// `|<psi|phi>|`.
pub fn pure_fidelity(psi: &PureState, phi: &PureState) -> Result<f64> {
    Ok(psi.inner(phi)?.norm().min(1.0))
}

/// Entropy of the reduction of `psi` onto the factors in `side_a`.
pub fn reduced_entanglement_entropy(psi: &PureState, side_a: &[usize]) -> Result<f64> {
    let n = psi.dims().len();
    let mut a = side_a.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.is_empty() || a.len() >= n || a.iter().any(|&k| k >= n) {
        return Err(Error::InvalidArgument(format!(
            "{side_a:?} is not a proper bipartition of {n} factors"
        )));
    }
    let rho = psi.density();
    Ok(von_neumann_entropy(&rho.partial_trace(&a)?))
}

/// Result of one teleportation run.
#[derive(Clone, Debug)]
pub struct TeleportOutcome {
    pub x: usize,
    pub y: usize,
    pub probability: f64,
    pub received: PureState,
    pub fidelity: f64,
}

fn omega_pow(d: usize, k: i64) -> C64 {
    let k = k.rem_euclid(d as i64) as f64;
    C64::from_polar(1.0, 2.0 * PI * k / d as f64)
}

/// Bob's unnormalized state after Alice projects onto `psi_{x,y}`.
fn bob_branch(d: usize, a: &[C64], x: usize, y: usize) -> Vec<C64> {
    // Joint state a_j |j>_C (sum_k |k>_A |k>_B)/sqrt(d), contracted with
    // <psi_{x,y}| = sum_i omega^{-ix}/sqrt(d) <i|_C <i+y|_A.
    let mut bob = vec![c(0.0, 0.0); d];
    for i in 0..d {
        let k = (i + y) % d;
        bob[k] += omega_pow(d, -((i * x) as i64)) * a[i] / d as f64;
    }
    bob
}

/// Bob's correction `u_{ij} = delta_{j, i+y} omega^{ix}`.
fn correct(d: usize, bob: &[C64], x: usize, y: usize) -> Vec<C64> {
    (0..d)
        .map(|i| omega_pow(d, (i * x) as i64) * bob[(i + y) % d])
        .collect()
}

fn run_outcome(psi: &PureState, x: usize, y: usize) -> Result<TeleportOutcome> {
    let d = psi.vector().len();
    let bob = bob_branch(d, psi.vector(), x, y);
    let probability: f64 = bob.iter().map(|z| z.norm_sqr()).sum();
    let received = PureState::normalized(correct(d, &bob, x, y), FactoredDims::single(d))?;
    let fidelity = pure_fidelity(&received, psi)?;
    Ok(TeleportOutcome {
        x,
        y,
        probability,
        received,
        fidelity,
    })
}

fn check_teleport_input(d: usize, psi: &PureState) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("teleportation needs d >= 2, got {d}")));
    }
    if psi.vector().len() != d {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for d = {d}",
            psi.vector().len()
        )));
    }
    Ok(())
}

/// Teleports `psi` once, sampling Alice's outcome from the protocol distribution.
pub fn teleport_roundtrip(d: usize, psi: &PureState, seed: u64) -> Result<TeleportOutcome> {
    check_teleport_input(d, psi)?;
    let mut rng = rng::seeded(seed);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = None;
    for x in 0..d {
        for y in 0..d {
            let out = run_outcome(psi, x, y)?;
            acc += out.probability;
            if u < acc {
                return Ok(out);
            }
            last = Some(out);
        }
    }
    Ok(last.expect("d >= 2"))
}

/// Runs every one of the d^2 measurement outcomes.
pub fn teleport_all_outcomes(d: usize, psi: &PureState) -> Result<Vec<TeleportOutcome>> {
    check_teleport_input(d, psi)?;
    let mut out = Vec::with_capacity(d * d);
    for x in 0..d {
        for y in 0..d {
            out.push(run_outcome(psi, x, y)?);
        }
    }
    Ok(out)
}
