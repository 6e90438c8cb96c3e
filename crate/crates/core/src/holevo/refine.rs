//! Newton refinement of engaging inputs.
//!
//! Unknowns: a tangent offset `(a_i, b_i)` for each input `u_i`, the first
//! `m - 1` weights and the common divergence `t`. Equations: `D(L u_i + c || sigma) = t`
//! and the tangential gradient of `u -> D(L u + c || sigma)` vanishing at each
//! `u_i`, with `sigma = sum_j p_j (L u_j + c)`. The tangent frame is re-centred
//! after every accepted step, so offsets start at zero each iteration.

use nalgebra::{DMatrix, DVector};

use super::bloch::{self, Reference};
use super::restricted::{members, require_cptp, sphere_max_divergence};
use super::CapacityResult;
use crate::channel::{BlochPoint, QubitChannel};
use crate::error::{Error, Result};

pub const REFINE_TOL: f64 = 1e-12;
const MAX_ITERS: usize = 60;
const MAX_HALVINGS: usize = 20;
const STEP_CAP: f64 = 0.5;
const FD_STEP: f64 = 1e-7;

fn tangent_basis(u: BlochPoint) -> (BlochPoint, BlochPoint) {
    let a = if u.x.abs() < 0.9 {
        BlochPoint::new_unchecked(1.0, 0.0, 0.0)
    } else {
        BlochPoint::new_unchecked(0.0, 1.0, 0.0)
    };
    let e1 = a.sub(u.scale(a.dot(u))).normalized();
    (e1, u.cross(e1))
}

fn transpose_apply(ch: &QubitChannel, g: BlochPoint) -> BlochPoint {
    let l = ch.linear();
    BlochPoint::new_unchecked(
        l[0][0] * g.x + l[1][0] * g.y + l[2][0] * g.z,
        l[0][1] * g.x + l[1][1] * g.y + l[2][1] * g.z,
        l[0][2] * g.x + l[1][2] * g.y + l[2][2] * g.z,
    )
}

struct System<'a> {
    ch: &'a QubitChannel,
    centers: Vec<BlochPoint>,
    frames: Vec<(BlochPoint, BlochPoint)>,
}

struct State {
    inputs: Vec<BlochPoint>,
    weights: Vec<f64>,
    t: f64,
}

impl System<'_> {
    fn m(&self) -> usize {
        self.centers.len()
    }

    fn unpack(&self, x: &[f64]) -> State {
        let m = self.m();
        let inputs = (0..m)
            .map(|i| {
                let (e1, e2) = self.frames[i];
                self.centers[i]
                    .add(e1.scale(x[2 * i]))
                    .add(e2.scale(x[2 * i + 1]))
                    .normalized()
            })
            .collect();
        let mut weights = x[2 * m..3 * m - 1].to_vec();
        weights.push(1.0 - weights.iter().sum::<f64>());
        State {
            inputs,
            weights,
            t: x[3 * m - 1],
        }
    }

    fn sigma(&self, s: &State) -> BlochPoint {
        s.inputs
            .iter()
            .zip(&s.weights)
            .fold(BlochPoint::ORIGIN, |acc, (&u, &w)| acc.add(self.ch.map_point(u).scale(w)))
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let s = self.unpack(x);
        let sigma = self.sigma(&s);
        let m = self.m();
        if !(sigma.norm() < 1.0) {
            return vec![f64::NAN; 3 * m];
        }
        let r = Reference::new(sigma);
        let mut f = Vec::with_capacity(3 * m);
        for &u in &s.inputs {
            f.push(r.divergence(self.ch.map_point(u)) - s.t);
        }
        for (i, &u) in s.inputs.iter().enumerate() {
            let g = transpose_apply(self.ch, bloch::grad_first(self.ch.map_point(u), sigma));
            let gt = g.sub(u.scale(g.dot(u)));
            let (e1, e2) = self.frames[i];
            f.push(gt.dot(e1));
            f.push(gt.dot(e2));
        }
        f
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        let mut jac = DMatrix::zeros(n, n);
        let mut xp = x.to_vec();
        for k in 0..n {
            let orig = xp[k];
            xp[k] = orig + FD_STEP;
            let fp = self.residual(&xp);
            xp[k] = orig - FD_STEP;
            let fm = self.residual(&xp);
            xp[k] = orig;
            for i in 0..n {
                jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * FD_STEP);
            }
        }
        jac
    }

    fn recentre(&mut self, x: &mut [f64]) {
        let s = self.unpack(x);
        self.centers = s.inputs;
        self.frames = self.centers.iter().map(|&u| tangent_basis(u)).collect();
        for v in x[..2 * self.m()].iter_mut() {
            *v = 0.0;
        }
    }
}

fn max_abs(f: &[f64]) -> f64 {
    f.iter().fold(0.0f64, |a, v| if v.is_nan() { f64::INFINITY } else { a.max(v.abs()) })
}

/// Solves the continuous stationarity system starting from a restricted
/// (lattice) result with clustered engaging inputs.
pub fn refine_capacity(ch: &QubitChannel, seed: &CapacityResult, tol: f64) -> Result<CapacityResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    require_cptp(ch)?;
    let m = seed.ensemble.len();
    if m == 0 {
        return Err(Error::InvalidArgument("seed has an empty ensemble".into()));
    }
    let centers: Vec<BlochPoint> = seed.ensemble.iter().map(|e| e.input.normalized()).collect();
    let mut sys = System {
        ch,
        frames: centers.iter().map(|&u| tangent_basis(u)).collect(),
        centers,
    };
    let mut x = vec![0.0; 3 * m];
    for (i, e) in seed.ensemble.iter().take(m - 1).enumerate() {
        x[2 * m + i] = e.weight;
    }
    {
        let s = sys.unpack(&x);
        let r = Reference::new(sys.sigma(&s));
        x[3 * m - 1] = s
            .inputs
            .iter()
            .zip(&s.weights)
            .map(|(&u, &w)| w * r.divergence(ch.map_point(u)))
            .sum();
    }

    let mut f = sys.residual(&x);
    let mut fnorm = max_abs(&f);
    let mut iters = 0;
    while fnorm >= tol {
        if iters == MAX_ITERS {
            return Err(Error::NewtonDiverged(format!(
                "residual {fnorm:e} after {MAX_ITERS} iterations"
            )));
        }
        iters += 1;
        let jac = sys.jacobian(&x);
        let rhs = DVector::from_iterator(f.len(), f.iter().map(|v| -v));
        let dx = jac
            .svd(true, true)
            .solve(&rhs, 1e-13)
            .map_err(|e| Error::NewtonDiverged(e.to_string()))?;
        let step = dx.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !(step <= STEP_CAP) {
            return Err(Error::NewtonDiverged(format!("step {step:e} exceeds the cap")));
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let cand: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + lambda * d).collect();
            if sys.unpack(&cand).weights.iter().all(|&w| w > 0.0) {
                let nc = max_abs(&sys.residual(&cand));
                if nc < fnorm {
                    x = cand;
                    fnorm = nc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NewtonDiverged(format!(
                "no decrease from residual {fnorm:e} after {MAX_HALVINGS} halvings"
            )));
        }
        sys.recentre(&mut x);
        f = sys.residual(&x);
        fnorm = max_abs(&f);
    }

    let s = sys.unpack(&x);
    let sigma = sys.sigma(&s);
    let entropy_sigma = bloch::entropy(sigma.norm());
    let value = entropy_sigma
        - s.inputs
            .iter()
            .zip(&s.weights)
            .map(|(&u, &w)| w * bloch::entropy(ch.map_point(u).norm()))
            .sum::<f64>();
    let ensemble: Vec<(f64, BlochPoint)> = s.weights.iter().copied().zip(s.inputs.iter().copied()).collect();
    let sphere = sphere_max_divergence(ch, sigma, seed.k_used.max(20), &s.inputs);
    let gap = sphere - value;
    Ok(CapacityResult {
        value,
        ensemble: members(ch, sigma, &ensemble),
        average_output: sigma,
        certificate_gap: gap,
        error_bound: gap.max(0.0) + fnorm,
        k_used: seed.k_used,
        refined: true,
        residual: fnorm,
    })
}
