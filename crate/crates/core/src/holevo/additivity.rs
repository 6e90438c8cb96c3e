//! Two-copy divergence scan over Schmidt-form inputs.
//!
//! `C(L (x) L) > 2 C(L)` would require a pure two-qubit input whose output has
//! divergence above `2 C(L)` from `sigma (x) sigma`, where `sigma` is the optimal
//! average output. Pure inputs are parameterized as
//! `sqrt(p) |u>|v> + e^{i nu} sqrt(1-p) |u_perp>|v_perp>`.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{stokes_matrix, BlochPoint, QubitChannel};
use crate::error::{Error, Result};
use crate::info::{matrix_entropy, PureState};
use crate::matrix::{c, hermitian_eigen, kron, ComplexMatrix, FactoredDims, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchmidtPoint {
    pub p: f64,
    pub theta_u: f64,
    pub phi_u: f64,
    pub theta_v: f64,
    pub phi_v: f64,
    pub nu: f64,
}

const TWO_PI: f64 = 2.0 * PI;

impl SchmidtPoint {
    pub fn new(p: f64, theta_u: f64, phi_u: f64, theta_v: f64, phi_v: f64, nu: f64) -> Result<Self> {
        let inside = |v: f64, hi: f64| (0.0..=hi).contains(&v);
        if !inside(p, 1.0) {
            return Err(Error::Domain { value: p, domain: "[0, 1]" });
        }
        for v in [theta_u, theta_v, nu] {
            if !inside(v, TWO_PI) {
                return Err(Error::Domain { value: v, domain: "[0, 2 pi]" });
            }
        }
        for v in [phi_u, phi_v] {
            if !inside(v, FRAC_PI_2) {
                return Err(Error::Domain { value: v, domain: "[0, pi/2]" });
            }
        }
        Ok(Self {
            p,
            theta_u,
            phi_u,
            theta_v,
            phi_v,
            nu,
        })
    }

    /// `sqrt(p)|00> + sqrt(1-p)|11>` up to the sign convention of `u_perp`, `v_perp`.
    pub fn diagonal(p: f64) -> Result<Self> {
        Self::new(p, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn state(&self) -> PureState {
        let ket = |theta: f64, phi: f64| {
            let (s, co) = theta.sin_cos();
            (
                [c(co, 0.0), C64::from_polar(s, phi)],
                [C64::from_polar(s, -phi), c(-co, 0.0)],
            )
        };
        let (u, u_perp) = ket(self.theta_u, self.phi_u);
        let (v, v_perp) = ket(self.theta_v, self.phi_v);
        let a = self.p.sqrt();
        let b = C64::from_polar((1.0 - self.p).sqrt(), self.nu);
        let mut psi = Vec::with_capacity(4);
        for i in 0..2 {
            for j in 0..2 {
                psi.push(u[i] * v[j] * a + u_perp[i] * v_perp[j] * b);
            }
        }
        PureState::normalized(psi, FactoredDims::qubits(2)).expect("orthonormal Schmidt vectors")
    }
}

/// Grid resolution: `p_points` values of `p` and `angle_points` per angle.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SchmidtGrid {
    pub p_points: usize,
    pub angle_points: usize,
}

impl Default for SchmidtGrid {
    fn default() -> Self {
        Self {
            p_points: 17,
            angle_points: 9,
        }
    }
}

impl SchmidtGrid {
    pub fn len(&self) -> usize {
        self.p_points * self.angle_points.pow(5)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn axis(n: usize, hi: f64) -> Vec<f64> {
        if n == 1 {
            return vec![0.0];
        }
        (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect()
    }

    pub fn p_values(&self) -> Vec<f64> {
        Self::axis(self.p_points, 1.0)
    }

    /// Grid point with flat index `idx`; `p` varies fastest.
    pub fn point(&self, idx: usize) -> SchmidtPoint {
        let a = self.angle_points;
        let wide = Self::axis(a, TWO_PI);
        let narrow = Self::axis(a, FRAC_PI_2);
        let ps = self.p_values();
        let mut r = idx;
        let mut take = |n: usize| {
            let d = r % n;
            r /= n;
            d
        };
        let ip = take(self.p_points);
        let (itu, ipu, itv, ipv, inu) = (take(a), take(a), take(a), take(a), take(a));
        SchmidtPoint {
            p: ps[ip],
            theta_u: wide[itu],
            phi_u: narrow[ipu],
            theta_v: wide[itv],
            phi_v: narrow[ipv],
            nu: wide[inu],
        }
    }
}

/// `S((L (x) L)(|psi><psi|))` for a two-qubit pure state.
pub fn two_copy_output_entropy(ch: &QubitChannel, psi: &PureState) -> Result<f64> {
    let out = ch.apply_two_copies(&ComplexMatrix::outer(psi.vector()))?;
    matrix_entropy(&out.hermitian_part())
}

/// `log2(sigma (x) sigma)`, or `None` when sigma is not full rank.
fn log_reference(sigma: BlochPoint) -> Option<ComplexMatrix> {
    let e = hermitian_eigen(&stokes_matrix(sigma)).expect("Hermitian");
    if e.values.iter().any(|&v| v < 1e-12) {
        return None;
    }
    let l = e.map(f64::log2);
    let id = ComplexMatrix::identity(2);
    Some(&kron(&l, &id) + &kron(&id, &l))
}

fn divergence_with_log(ch: &QubitChannel, psi: &PureState, log_ref: &ComplexMatrix) -> Result<f64> {
    let out = ch.apply_two_copies(&ComplexMatrix::outer(psi.vector()))?.hermitian_part();
    let cross: f64 = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| (out[(i, j)] * log_ref[(j, i)]).re)
        .sum();
    Ok(-matrix_entropy(&out)? - cross)
}

/// `H((L (x) L)(|psi><psi|) || sigma (x) sigma)`; infinite for a pure `sigma`.
pub fn two_copy_divergence(ch: &QubitChannel, psi: &PureState, sigma: BlochPoint) -> Result<f64> {
    match log_reference(sigma) {
        Some(l) => divergence_with_log(ch, psi, &l),
        None => Ok(f64::INFINITY),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditivityScan {
    pub max_value: f64,
    pub argmax: SchmidtPoint,
    /// `(p, value)` along the `p` axis at the maximizing angles.
    pub p_slice: Vec<(f64, f64)>,
    pub evaluated: usize,
}

/// Maximizes the two-copy divergence over the Schmidt grid. Ties keep the
/// smallest flat index, so the result does not depend on scheduling.
pub fn additivity_scan(ch: &QubitChannel, sigma_prime: BlochPoint, grid: SchmidtGrid) -> Result<AdditivityScan> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty Schmidt grid".into()));
    }
    let Some(log_ref) = log_reference(sigma_prime) else {
        return Err(Error::InvalidArgument("average output must be full rank".into()));
    };
    let eval = |idx: usize| -> Result<(f64, usize)> {
        let v = divergence_with_log(ch, &grid.point(idx).state(), &log_ref)?;
        Ok((v, idx))
    };
    let (max_value, best) = (0..grid.len())
        .into_par_iter()
        .map(eval)
        .try_reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
            },
        )?;
    let argmax = grid.point(best);
    let p_slice = grid
        .p_values()
        .into_iter()
        .map(|p| {
            let pt = SchmidtPoint { p, ..argmax };
            divergence_with_log(ch, &pt.state(), &log_ref).map(|v| (p, v))
        })
        .collect::<Result<_>>()?;
    Ok(AdditivityScan {
        max_value,
        argmax,
        p_slice,
        evaluated: grid.len(),
    })
}
