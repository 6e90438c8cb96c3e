//! Two-qubit concurrence and entanglement of formation, logarithmic
//! negativity, the Pauli-channel negativity/cost gap, and spectra of
//! antisymmetric states.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::channel::{PauliProbs, StinespringPair};
use crate::error::{Error, Result};
use crate::info::{binary_entropy, shannon_entropy, DensityMatrix};
use crate::matrix::{c, hermitian_eigen, hermitian_eigenvalues, partial_transpose, trace_norm, ComplexMatrix, C64};

const ANTISYM_TOL: f64 = 1e-10;
const BISECTION_ITERS: usize = 200;

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dims().factors() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "expected a 2x2 bipartite state, got factors {:?}",
            rho.dims().factors()
        )));
    }
    Ok(())
}

/// `(sy (x) sy) rho^T (sy (x) sy)`.
pub fn spin_flip(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    require_two_qubits(rho)?;
    // sy (x) sy is the anti-diagonal (-1, 1, 1, -1).
    let sign = [-1.0, 1.0, 1.0, -1.0];
    let m = rho.matrix();
    Ok(ComplexMatrix::from_fn(4, |i, j| m[(3 - j, 3 - i)] * (sign[i] * sign[j])))
}

/// Wootters concurrence. The `lambda_i` are the singular values of
/// `W^T (sy (x) sy) W` for `rho = W W^dagger`, read off the Hermitian dilation
/// `[[0, M], [M^dagger, 0]]` so that tiny values are not square roots of round-off.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let e = hermitian_eigen(rho.matrix())?;
    let w = ComplexMatrix::from_fn(4, |i, k| e.vectors[(i, k)] * e.values[k].max(0.0).sqrt());
    let sign = [-1.0, 1.0, 1.0, -1.0];
    let m = ComplexMatrix::from_fn(4, |k, l| {
        (0..4).map(|i| w[(i, k)] * w[(3 - i, l)] * sign[i]).sum()
    });
    let dilation = ComplexMatrix::from_fn(8, |i, j| match (i < 4, j < 4) {
        (true, false) => m[(i, j - 4)],
        (false, true) => m[(j, i - 4)].conj(),
        _ => c(0.0, 0.0),
    });
    let lam = hermitian_eigenvalues(&dilation)?;
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).clamp(0.0, 1.0))
}

pub fn eof_from_concurrence(conc: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&conc) {
        return Err(Error::Domain { value: conc, domain: "[0, 1]" });
    }
    binary_entropy((1.0 - (1.0 - conc * conc).max(0.0).sqrt()) / 2.0)
}

/// Entanglement of formation of a two-qubit state, in ebits.
pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    eof_from_concurrence(concurrence(rho)?)
}

/// `log2 || rho^Gamma ||_1`, transposing the second factor.
pub fn log_negativity(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims().len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "log-negativity needs two factors, got {:?}",
            rho.dims().factors()
        )));
    }
    let pt = partial_transpose(rho.matrix(), rho.dims(), 1)?;
    Ok(trace_norm(&pt)?.log2().max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub p: [f64; 4],
    pub t0: f64,
    pub e_n: f64,
    pub e_c: f64,
    pub condition_value: f64,
    pub gap_holds: bool,
}

/// `f(t) = t^4 - t^3 + 4 e3 t - 16 e4`, with `e3`, `e4` the elementary
/// symmetric polynomials of the Kraus probabilities.
pub fn gap_quartic(p: PauliProbs, t: f64) -> f64 {
    let [a, b, cc, d] = p.as_array();
    let e3 = a * b * cc + a * b * d + a * cc * d + b * cc * d;
    let e4 = a * b * cc * d;
    t.powi(4) - t.powi(3) + 4.0 * e3 * t - 16.0 * e4
}

/// Negative root of `f(2t)` on `[-1/2, -1e-16]`, or 0 when there is no sign change.
fn negative_root(p: PauliProbs) -> f64 {
    let g = |t: f64| gap_quartic(p, 2.0 * t);
    let (mut lo, mut hi) = (-0.5, -1e-16);
    let (glo, ghi) = (g(lo), g(hi));
    if !(glo > 0.0 && ghi < 0.0) {
        return 0.0;
    }
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Compares the negativity of the Stinespring pair state with the entanglement
/// cost `H(p0 + pz)`. Requires the ordering condition on the Kraus probabilities.
pub fn gap_condition(p0: f64, px: f64, py: f64, pz: f64) -> Result<GapReport> {
    let p = PauliProbs::new(p0, px, py, pz)?;
    if !p.king_ruskai() {
        return Err(Error::KingRuskai(format!(
            "axis radii {:?} are not ordered with z largest",
            p.axis_radii()
        )));
    }
    gap_condition_unchecked(p)
}

/// [`gap_condition`] without the ordering requirement.
pub fn gap_condition_unchecked(p: PauliProbs) -> Result<GapReport> {
    let t0 = negative_root(p);
    let e_n = (1.0 - 4.0 * t0).log2();
    let e_c = binary_entropy((p.p0 + p.pz).clamp(0.0, 1.0))?;
    let condition_value = gap_quartic(p, -(e_c.exp2() - 1.0) / 2.0);
    Ok(GapReport {
        p: p.as_array(),
        t0,
        e_n,
        e_c,
        condition_value,
        gap_holds: condition_value > 0.0,
    })
}

/// `log2 || rho_Lambda^Gamma ||_1` from the explicit 2 (x) 4 state, transposing
/// the output qubit.
pub fn pair_state_log_negativity(p: PauliProbs) -> Result<f64> {
    let rho = StinespringPair::new(p).rho_mix(0.5)?;
    let pt = partial_transpose(rho.matrix(), rho.dims(), 0)?;
    Ok(trace_norm(&pt)?.log2())
}

/// `log2(d / (d - 1))`.
pub fn antisym_lower_bound(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {d}")));
    }
    Ok((d as f64 / (d - 1) as f64).log2())
}

/// Dimension `d^n` of one side, capped like every other matrix.
fn side_dim(d: usize, n: usize) -> Result<usize> {
    if d < 2 || n == 0 {
        return Err(Error::InvalidArgument(format!("need d >= 2 and n >= 1, got d = {d}, n = {n}")));
    }
    u32::try_from(n)
        .ok()
        .and_then(|n| d.checked_pow(n))
        .filter(|&s| s <= 64)
        .ok_or_else(|| Error::DimensionMismatch(format!("d^n too large for d = {d}, n = {n}")))
}

fn pair_layout(len: usize, d: usize, n: usize) -> Result<usize> {
    let side = side_dim(d, n)?;
    if len != side * side {
        return Err(Error::DimensionMismatch(format!("expected {} amplitudes, got {len}", side * side)));
    }
    Ok(side)
}

/// Base-`d` digits of `idx`, most significant first.
fn digits(mut idx: usize, d: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % d;
        idx /= d;
    }
    out
}

/// Splits an ambient index over `A1 B1 A2 B2 ...` into `(A index, B index)`.
fn split_index(idx: usize, d: usize, n: usize) -> (usize, usize) {
    let dg = digits(idx, d, 2 * n);
    let fold = |off: usize| (0..n).fold(0, |acc, k| acc * d + dg[2 * k + off]);
    (fold(0), fold(1))
}

/// Norm of `psi - P psi`, with `P` the projector onto the antisymmetric
/// subspace of every `A_k B_k` pair.
pub fn antisym_residual(amplitudes: &[C64], d: usize, n: usize) -> Result<f64> {
    pair_layout(amplitudes.len(), d, n)?;
    let mut v = amplitudes.to_vec();
    for k in 0..n {
        let (sa, sb) = (d.pow((2 * n - 1 - 2 * k) as u32), d.pow((2 * n - 2 - 2 * k) as u32));
        let swapped: Vec<C64> = (0..v.len())
            .map(|idx| {
                let (a, b) = ((idx / sa) % d, (idx / sb) % d);
                let j = idx - a * sa - b * sb + b * sa + a * sb;
                v[j]
            })
            .collect();
        for (x, s) in v.iter_mut().zip(swapped) {
            *x = (*x - s) * 0.5;
        }
    }
    Ok(v.iter()
        .zip(amplitudes)
        .map(|(p, a)| (p - a).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Reduced matrix on `A1 A2 ... An` of a pure state given by its amplitudes
/// over `A1 B1 A2 B2 ... An Bn`, each factor of dimension `d`.
pub fn pair_reduction(amplitudes: &[C64], d: usize, n: usize) -> Result<ComplexMatrix> {
    let side = pair_layout(amplitudes.len(), d, n)?;
    let mut coef = vec![c(0.0, 0.0); side * side];
    for (idx, &amp) in amplitudes.iter().enumerate() {
        let (a, b) = split_index(idx, d, n);
        coef[a * side + b] = amp;
    }
    Ok(ComplexMatrix::from_fn(side, |i, j| {
        (0..side)
            .map(|b| coef[i * side + b] * coef[j * side + b].conj())
            .sum()
    }))
}

/// Largest eigenvalue of the `A`-side reduction of a normalized state in the
/// n-fold antisymmetric subspace.
pub fn max_reduced_eigenvalue(amplitudes: &[C64], d: usize, n: usize) -> Result<f64> {
    let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > ANTISYM_TOL {
        return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
    }
    let residual = antisym_residual(amplitudes, d, n)?;
    if residual >= ANTISYM_TOL {
        return Err(Error::NotAntisymmetric(residual));
    }
    Ok(hermitian_eigenvalues(&pair_reduction(amplitudes, d, n)?)?[0])
}

/// Random normalized state of the n-fold antisymmetric subspace: complex
/// Gaussian coefficients on the products of `(|ij> - |ji>)/sqrt(2)`, `i < j`.
pub fn random_antisymmetric(d: usize, n: usize, rng: &mut impl Rng) -> Result<Vec<C64>> {
    let side = side_dim(d, n)?;
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let count = pairs.len().pow(n as u32);
    let coeffs: Vec<C64> = (0..count)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let mut v = vec![c(0.0, 0.0); side * side];
    for (t, &coef) in coeffs.iter().enumerate() {
        let choice = digits(t, pairs.len(), n);
        // Each pair contributes |ij> - |ji>; expand the 2^n signed terms.
        for mask in 0..1usize << n {
            let mut idx = 0;
            let mut sign = 1.0;
            for (k, &q) in choice.iter().enumerate() {
                let (i, j) = pairs[q];
                let (a, b) = if mask >> k & 1 == 0 { (i, j) } else { (j, i) };
                if mask >> k & 1 == 1 {
                    sign = -sign;
                }
                idx = (idx * d + a) * d + b;
            }
            v[idx] += coef * sign;
        }
    }
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Ok(v.into_iter().map(|a| a / norm).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AntisymSpectrum {
    pub p: [f64; 3],
    /// Three eigenvalues of the coupled block (descending), then
    /// `p12/4, p12/4, p13/4, p13/4, p23/4, p23/4`.
    pub eigenvalues: [f64; 9],
    pub entropy: f64,
}

impl AntisymSpectrum {
    pub fn block_eigenvalues(&self) -> [f64; 3] {
        [self.eigenvalues[0], self.eigenvalues[1], self.eigenvalues[2]]
    }
}

/// `(p12, p13, p23)` for the weights of `|23>|23>`, `|31>|31>`, `|12>|12>`.
fn pair_weights(p: [f64; 3]) -> (f64, f64, f64) {
    (p[2], p[1], p[0])
}

/// The coupled 3x3 block of the reduced matrix.
pub fn antisym_block(p1: f64, p2: f64, p3: f64) -> ComplexMatrix {
    let (p12, p13, p23) = pair_weights([p1, p2, p3]);
    let r = |a: f64, b: f64| (a * b).sqrt();
    let rows = [
        [p12 + p13, r(p13, p23), r(p12, p23)],
        [r(p13, p23), p12 + p23, r(p12, p13)],
        [r(p12, p23), r(p12, p13), p13 + p23],
    ];
    ComplexMatrix::from_fn(3, |i, j| c(rows[i][j] / 4.0, 0.0))
}

/// Spectrum and entropy of the `A1 A2` reduction of
/// `sqrt(p1)|23>|23> + sqrt(p2)|31>|31> + sqrt(p3)|12>|12>`.
pub fn antisym_pair_spectrum(p1: f64, p2: f64, p3: f64) -> Result<AntisymSpectrum> {
    let p = [p1, p2, p3];
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbabilities(format!("{p:?} is not a point of the simplex")));
    }
    let block = hermitian_eigen(&antisym_block(p1, p2, p3))?.values;
    let (p12, p13, p23) = pair_weights(p);
    let mut eigenvalues = [0.0; 9];
    eigenvalues[..3].copy_from_slice(&block);
    for (k, w) in [p12, p13, p23].into_iter().enumerate() {
        eigenvalues[3 + 2 * k] = w / 4.0;
        eigenvalues[4 + 2 * k] = w / 4.0;
    }
    Ok(AntisymSpectrum {
        p,
        eigenvalues,
        entropy: shannon_entropy(&eigenvalues),
    })
}

pub fn antisym_pair_entropy(p1: f64, p2: f64, p3: f64) -> Result<f64> {
    Ok(antisym_pair_spectrum(p1, p2, p3)?.entropy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::info::{reduced_entanglement_entropy, PureState};
    use crate::matrix::FactoredDims;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn two_qubit(m: ComplexMatrix) -> DensityMatrix {
        DensityMatrix::new(m, FactoredDims::qubits(2)).unwrap()
    }

    fn pure(v: [C64; 4]) -> DensityMatrix {
        PureState::normalized(v.to_vec(), FactoredDims::qubits(2)).unwrap().density()
    }

    fn random_pure(rng: &mut impl Rng) -> PureState {
        let v = (0..4)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        PureState::normalized(v, FactoredDims::qubits(2)).unwrap()
    }

    #[test]
    fn spin_flip_fixed_points() {
        let mixed = DensityMatrix::maximally_mixed(FactoredDims::qubits(2));
        assert!(spin_flip(&mixed).unwrap().max_abs_diff(mixed.matrix()) < 1e-15);
        let h = FRAC_1_SQRT_2;
        let singlet = pure([c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]);
        assert!(spin_flip(&singlet).unwrap().max_abs_diff(singlet.matrix()) < 1e-15);
        let qutrit = DensityMatrix::maximally_mixed(FactoredDims::single(4));
        assert!(spin_flip(&qutrit).is_err());
    }

    #[test]
    fn spin_flip_entry_pattern() {
        // Display: [0..F] -> [F,-E,-D,C; -B,A,9,-8; -7,6,5,-4; 3,-2,-1,0],
        // read off the transposed input.
        let pattern: [[(usize, f64); 4]; 4] = [
            [(15, 1.0), (14, -1.0), (13, -1.0), (12, 1.0)],
            [(11, -1.0), (10, 1.0), (9, 1.0), (8, -1.0)],
            [(7, -1.0), (6, 1.0), (5, 1.0), (4, -1.0)],
            [(3, 1.0), (2, -1.0), (1, -1.0), (0, 1.0)],
        ];
        let mut rng = seeded(5);
        let psi = random_pure(&mut rng);
        let rho = psi.density();
        let t = rho.matrix().transpose();
        let out = spin_flip(&rho).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let (src, s) = pattern[i][j];
                assert!((out[(i, j)] - t[(src / 4, src % 4)] * s).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn concurrence_of_standard_states() {
        let h = FRAC_1_SQRT_2;
        let phi_plus = pure([c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);
        assert!((concurrence(&phi_plus).unwrap() - 1.0).abs() < 1e-10);
        assert!((eof_two_qubit(&phi_plus).unwrap() - 1.0).abs() < 1e-10);
        let product = two_qubit(ComplexMatrix::from_diag(&[0.1, 0.2, 0.3, 0.4]));
        assert_eq!(concurrence(&product).unwrap(), 0.0);
        assert_eq!(eof_two_qubit(&product).unwrap(), 0.0);
        // Werner state p|Psi-><Psi-| + (1-p) I/4 has C = max(0, (3p - 1)/2).
        let singlet = pure([c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]);
        for p in [0.2, 0.5, 0.8] {
            let m = &singlet.matrix().scale(p) + &ComplexMatrix::identity(4).scale((1.0 - p) / 4.0);
            let conc = concurrence(&two_qubit(m)).unwrap();
            assert!((conc - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn eof_of_pure_states_matches_reduced_entropy() {
        let mut rng = seeded(11);
        for _ in 0..1000 {
            let psi = random_pure(&mut rng);
            let eof = eof_two_qubit(&psi.density()).unwrap();
            let oracle = reduced_entanglement_entropy(&psi, &[0]).unwrap();
            assert!((eof - oracle).abs() < 1e-8, "{eof} vs {oracle}");
        }
    }

    #[test]
    fn log_negativity_values() {
        let h = FRAC_1_SQRT_2;
        let phi_plus = pure([c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);
        assert!((log_negativity(&phi_plus).unwrap() - 1.0).abs() < 1e-12);
        let product = two_qubit(ComplexMatrix::from_diag(&[0.1, 0.2, 0.3, 0.4]));
        assert!(log_negativity(&product).unwrap().abs() < 1e-12);
        let three = DensityMatrix::maximally_mixed(FactoredDims::qubits(3));
        assert!(log_negativity(&three).is_err());
    }

    #[test]
    fn gap_at_the_symmetric_point() {
        let r = gap_condition(0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0).unwrap();
        // Reference value truncated to five decimals.
        assert!((r.condition_value - 0.00784).abs() < 1e-5, "{}", r.condition_value);
        assert!(r.gap_holds);
        assert!(r.e_n < r.e_c);
        let p = PauliProbs::new(0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0).unwrap();
        assert!((pair_state_log_negativity(p).unwrap() - r.e_n).abs() < 1e-10);
    }

    #[test]
    fn gap_noiseless_and_invalid() {
        let r = gap_condition(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!((r.t0, r.e_n, r.e_c), (0.0, 0.0, 0.0));
        assert!(!r.gap_holds);
        assert!(matches!(gap_condition(0.1, 0.6, 0.2, 0.1), Err(Error::KingRuskai(_))));
        assert!(gap_condition(0.5, 0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn gap_family_closed_form() {
        for &(u, v) in &[(0.5, 0.5), (0.3, 0.7), (0.9, 0.2), (0.1, 0.1), (0.65, 0.45)] {
            let p = PauliProbs::new(u / 2.0, (1.0 - v) / 2.0, v / 2.0, (1.0 - u) / 2.0).unwrap();
            let r = gap_condition_unchecked(p).unwrap();
            let (a, b) = (u - 0.5, v - 0.5);
            let expected = 0.5 * a * a + 0.5 * b * b - a * a * b * b;
            assert!((r.condition_value - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn gap_matches_explicit_partial_transpose() {
        let mut rng = seeded(21);
        let mut checked = 0;
        while checked < 100 {
            let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
            let s: f64 = w.iter().sum();
            let Ok(r) = gap_condition(w[0] / s, w[1] / s, w[2] / s, w[3] / s) else {
                continue;
            };
            let p = PauliProbs::new(r.p[0], r.p[1], r.p[2], r.p[3]).unwrap();
            let direct = pair_state_log_negativity(p).unwrap();
            assert!((direct - r.e_n).abs() < 1e-10, "{direct} vs {}", r.e_n);
            assert!(r.t0 < 0.0);
            if r.gap_holds {
                assert!(r.e_n < r.e_c);
            }
            checked += 1;
        }
    }

    #[test]
    fn lower_bounds() {
        assert_eq!(antisym_lower_bound(2).unwrap(), 1.0);
        assert!((antisym_lower_bound(3).unwrap() - 0.585).abs() < 1e-3);
        assert!((antisym_lower_bound(10).unwrap() - (10.0f64 / 9.0).log2()).abs() < 1e-15);
        assert!(antisym_lower_bound(1).is_err());
    }

    fn basis_pair(d: usize, i: usize, j: usize) -> Vec<C64> {
        let mut v = vec![c(0.0, 0.0); d * d];
        v[i * d + j] = c(FRAC_1_SQRT_2, 0.0);
        v[j * d + i] = c(-FRAC_1_SQRT_2, 0.0);
        v
    }

    #[test]
    fn reduced_eigenvalue_examples() {
        let singlet = basis_pair(2, 0, 1);
        assert!((max_reduced_eigenvalue(&singlet, 2, 1).unwrap() - 0.5).abs() < 1e-12);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let v = basis_pair(3, i, j);
            assert!((max_reduced_eigenvalue(&v, 3, 1).unwrap() - 0.5).abs() < 1e-12);
        }
        let mut sym = vec![c(0.0, 0.0); 4];
        sym[1] = c(FRAC_1_SQRT_2, 0.0);
        sym[2] = c(FRAC_1_SQRT_2, 0.0);
        assert!(matches!(max_reduced_eigenvalue(&sym, 2, 1), Err(Error::NotAntisymmetric(_))));
    }

    #[test]
    fn sampled_antisymmetric_states_obey_the_bound() {
        let mut rng = seeded(3);
        for n in [1, 2] {
            let bound = (2.0f64 / 3.0).powi(n as i32);
            for _ in 0..200 {
                let v = random_antisymmetric(3, n, &mut rng).unwrap();
                assert!(antisym_residual(&v, 3, n).unwrap() < 1e-12);
                assert!(max_reduced_eigenvalue(&v, 3, n).unwrap() <= bound + 1e-9);
            }
        }
    }

    /// `sum sqrt(p_ij) |i,j>|i,j>` over `A1 B1 A2 B2`.
    fn psi_prime(p: [f64; 3]) -> Vec<C64> {
        let pairs = [(1, 2), (2, 0), (0, 1)];
        let mut v = vec![c(0.0, 0.0); 81];
        for (w, &(i, j)) in p.iter().zip(&pairs) {
            let one = basis_pair(3, i, j);
            for (a, x) in one.iter().enumerate() {
                for (b, y) in one.iter().enumerate() {
                    v[a * 9 + b] += x * y * w.sqrt();
                }
            }
        }
        v
    }

    #[test]
    fn pair_spectrum_matches_direct_reduction() {
        for p in [[1.0, 0.0, 0.0], [0.2, 0.3, 0.5], [1.0 / 3.0; 3], [0.05, 0.9, 0.05]] {
            let s = antisym_pair_spectrum(p[0], p[1], p[2]).unwrap();
            let xi = pair_reduction(&psi_prime(p), 3, 2).unwrap();
            let mut direct = hermitian_eigenvalues(&xi).unwrap();
            let mut ours = s.eigenvalues.to_vec();
            direct.sort_by(f64::total_cmp);
            ours.sort_by(f64::total_cmp);
            for (a, b) in direct.iter().zip(&ours) {
                assert!((a - b).abs() < 1e-12, "{direct:?} vs {ours:?}");
            }
            assert!((shannon_entropy(&direct) - s.entropy).abs() < 1e-10);
        }
        let s = antisym_pair_spectrum(1.0, 0.0, 0.0).unwrap();
        let mut ev = s.eigenvalues;
        ev.sort_by(|a, b| b.total_cmp(a));
        assert!(ev[..4].iter().all(|v| (v - 0.25).abs() < 1e-14));
        assert!(ev[4..].iter().all(|v| v.abs() < 1e-14));
        assert!((s.entropy - 2.0).abs() < 1e-12);
        assert!(antisym_pair_spectrum(0.5, 0.6, -0.1).is_err());
    }

    #[test]
    fn block_characteristic_polynomial() {
        let mut rng = seeded(8);
        for _ in 0..50 {
            let w: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>());
            let s: f64 = w.iter().sum();
            let p = w.map(|v| v / s);
            let b = antisym_block(p[0], p[1], p[2]);
            let e = |i: usize, j: usize| b[(i, j)].re;
            let a1 = -(e(0, 0) + e(1, 1) + e(2, 2));
            let a2 = e(0, 0) * e(1, 1) + e(0, 0) * e(2, 2) + e(1, 1) * e(2, 2)
                - e(0, 1).powi(2)
                - e(0, 2).powi(2)
                - e(1, 2).powi(2);
            let det = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2).powi(2)) - e(0, 1) * (e(0, 1) * e(2, 2) - e(1, 2) * e(0, 2))
                + e(0, 2) * (e(0, 1) * e(1, 2) - e(1, 1) * e(0, 2));
            assert!((a1 + 0.5).abs() < 1e-12);
            assert!((a2 - 1.0 / 16.0).abs() < 1e-12);
            assert!((-det + p[0] * p[1] * p[2] / 16.0).abs() < 1e-12);
        }
    }

    /// Roots of `g` in the trigonometric form `(1 - cos(theta + 2 pi k / 3)) / 6`.
    fn trig_roots(p: [f64; 3]) -> [f64; 3] {
        // Product of roots (1 - cos 3 theta)/864 = p12 p13 p23 / 16.
        let theta = (1.0 - 54.0 * p[0] * p[1] * p[2]).clamp(-1.0, 1.0).acos() / 3.0;
        let mut r = [0.0, 2.0, 4.0].map(|k: f64| (1.0 - (theta + k * PI / 3.0).cos()) / 6.0);
        r.sort_by(|a, b| b.total_cmp(a));
        r
    }

    #[test]
    fn block_spectrum_matches_trigonometric_roots() {
        for p in [[1.0 / 3.0; 3], [0.2, 0.3, 0.5], [0.7, 0.2, 0.1], [1.0, 0.0, 0.0]] {
            let s = antisym_pair_spectrum(p[0], p[1], p[2]).unwrap();
            let roots = trig_roots(p);
            for (a, b) in s.block_eigenvalues().iter().zip(&roots) {
                assert!((a - b).abs() < 1e-10, "{:?} vs {roots:?}", s.block_eigenvalues());
            }
        }
    }

    proptest! {
        #[test]
        fn pair_entropy_at_least_two(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (p1, p2) = if a + b <= 1.0 { (a, b) } else { (1.0 - a, 1.0 - b) };
            let p3 = (1.0 - p1 - p2).max(0.0);
            let s = antisym_pair_spectrum(p1, p2, p3).unwrap();
            prop_assert!((s.eigenvalues.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(s.entropy >= 2.0 - 1e-9);
        }

        #[test]
        fn log_negativity_vanishes_on_product_mixtures(seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let parts: Vec<DensityMatrix> = (0..3)
                .map(|_| {
                    let a = random_pure(&mut rng).density().partial_trace(&[0]).unwrap();
                    let b = random_pure(&mut rng).density().partial_trace(&[1]).unwrap();
                    a.tensor(&b)
                })
                .collect();
            let w: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 0.01).collect();
            let total: f64 = w.iter().sum();
            let mix: Vec<(f64, &DensityMatrix)> = w.iter().map(|x| x / total).zip(&parts).collect();
            let rho = DensityMatrix::mixture(&mix).unwrap();
            prop_assert!(log_negativity(&rho).unwrap().abs() < 1e-10);
            prop_assert!(concurrence(&rho).unwrap() >= 0.0);
        }

        #[test]
        fn concurrence_in_unit_interval(seed in any::<u64>(), s in 0.0f64..1.0) {
            let mut rng = seeded(seed);
            let a = random_pure(&mut rng).density();
            let b = random_pure(&mut rng).density();
            let rho = DensityMatrix::mixture(&[(s, &a), (1.0 - s, &b)]).unwrap();
            let conc = concurrence(&rho).unwrap();
            prop_assert!((0.0..=1.0).contains(&conc));
            prop_assert!(log_negativity(&rho).unwrap() >= 0.0);
        }
    }
}
