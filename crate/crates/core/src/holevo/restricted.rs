//! Capacity restricted to lattice inputs.
//!
//! Blahut-Arimoto iterations `p_i <- p_i 2^{D_i}` give a warm start. The exact
//! optimum is then found by an active-set search: on a small working set, solve
//! the equal-divergence system for each candidate support, accept the first
//! support whose divergence dominates the rest of the working set, and add the
//! global argmax of the divergence while it still exceeds the common value.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::bloch::{self, Reference};
use super::lattice::{lattice_points, Lattice};
use super::{CapacityResult, EnsembleMember};
use crate::channel::{cptp_check, density_to_stokes, BlochPoint, QubitChannel, CPTP_TOL};
use crate::error::{Error, Result};
use crate::info::DensityMatrix;

const WARM_ITERS: usize = 3000;
const MAX_BA_ITERS: usize = 200_000;
const MAX_SUPPORT: usize = 4;
const PRUNE_WEIGHT: f64 = 1e-6;

pub(crate) struct Outputs {
    pub points: Vec<BlochPoint>,
    pub entropies: Vec<f64>,
}

impl Outputs {
    pub fn new(ch: &QubitChannel, inputs: &[BlochPoint]) -> Self {
        let points: Vec<BlochPoint> = inputs.iter().map(|&u| ch.map_point(u)).collect();
        let entropies = points.iter().map(|o| bloch::entropy(o.norm())).collect();
        Self { points, entropies }
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    fn divergence(&self, r: &Reference, i: usize) -> f64 {
        r.divergence_with_entropy(self.points[i], self.entropies[i])
    }

    fn average(&self, weights: impl Iterator<Item = (usize, f64)>) -> BlochPoint {
        weights.fold(BlochPoint::ORIGIN, |acc, (i, w)| acc.add(self.points[i].scale(w)))
    }

    fn divergences(&self, r: &Reference) -> Vec<f64> {
        (0..self.len()).into_par_iter().map(|i| self.divergence(r, i)).collect()
    }
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &x)| if x > bv { (i, x) } else { (bi, bv) })
}

/// Sparse optimum of the restricted problem.
struct Optimum {
    support: Vec<(usize, f64)>,
    sigma: BlochPoint,
    value: f64,
    max_divergence: f64,
}

fn evaluate(out: &Outputs, support: Vec<(usize, f64)>) -> Optimum {
    let sigma = out.average(support.iter().copied());
    let r = Reference::new(sigma);
    let value = support.iter().map(|&(i, w)| w * out.divergence(&r, i)).sum();
    let max_divergence = argmax(&out.divergences(&r)).1;
    Optimum {
        support,
        sigma,
        value,
        max_divergence,
    }
}

fn blahut_arimoto(out: &Outputs, p: &mut [f64], iters: usize, tol: f64) -> f64 {
    let mut gap = f64::INFINITY;
    for _ in 0..iters {
        let sigma = out.average(p.iter().copied().enumerate());
        let r = Reference::new(sigma);
        let d = out.divergences(&r);
        let (_, max) = argmax(&d);
        let value: f64 = p.iter().zip(&d).map(|(w, x)| w * x).sum();
        gap = max - value;
        if gap <= tol || !gap.is_finite() {
            break;
        }
        let mut z = 0.0;
        for (w, x) in p.iter_mut().zip(&d) {
            *w *= (x - max).exp2();
            z += *w;
        }
        p.iter_mut().for_each(|w| *w /= z);
    }
    gap
}

/// Weights on `set` (in order) giving equal divergence `t` to their average.
fn equal_divergence(out: &Outputs, set: &[usize], init: &[f64]) -> Option<(Vec<f64>, f64)> {
    let m = set.len();
    if m == 1 {
        return Some((vec![1.0], 0.0));
    }
    let residual = |w: &[f64], t: f64| -> Option<(Vec<f64>, BlochPoint)> {
        let sigma = out.average(set.iter().copied().zip(w.iter().copied()));
        if !(sigma.norm() < 1.0) {
            return None;
        }
        let r = Reference::new(sigma);
        let f: Vec<f64> = set.iter().map(|&i| out.divergence(&r, i) - t).collect();
        f.iter().all(|v| v.is_finite()).then_some((f, sigma))
    };
    let full = |x: &[f64]| -> Vec<f64> {
        let mut w = x[..m - 1].to_vec();
        w.push(1.0 - w.iter().sum::<f64>());
        w
    };
    let norm = |f: &[f64]| f.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let mut x: Vec<f64> = init[..m - 1].to_vec();
    let (f0, _) = residual(&full(&x), 0.0)?;
    x.push(f0.iter().sum::<f64>() / m as f64);
    let (mut f, mut sigma) = residual(&full(&x), x[m - 1])?;
    let mut fnorm = norm(&f);

    for _ in 0..100 {
        if fnorm < 1e-15 {
            break;
        }
        let last = out.points[set[m - 1]];
        let jac = DMatrix::from_fn(m, m, |i, k| {
            if k == m - 1 {
                -1.0
            } else {
                let g = bloch::grad_second(out.points[set[i]], sigma);
                g.dot(out.points[set[k]].sub(last))
            }
        });
        let rhs = DVector::from_iterator(m, f.iter().map(|v| -v));
        let dx = jac.lu().solve(&rhs)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + lambda * d).collect();
            if let Some((fc, sc)) = residual(&full(&cand), cand[m - 1]) {
                let nc = norm(&fc);
                if nc < fnorm {
                    x = cand;
                    f = fc;
                    sigma = sc;
                    fnorm = nc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (fnorm < 1e-11).then(|| (full(&x), x[m - 1]))
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    if items.len() < size {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], size - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn active_set(out: &Outputs, warm: &[f64]) -> Option<Optimum> {
    let mut order: Vec<usize> = (0..out.len()).collect();
    order.sort_by(|&a, &b| warm[b].total_cmp(&warm[a]).then(a.cmp(&b)));
    let mut working: Vec<usize> = order.into_iter().take(MAX_SUPPORT).collect();

    for _ in 0..200 {
        let mut found = None;
        'search: for size in 1..=MAX_SUPPORT.min(working.len()) {
            for set in subsets(&working, size) {
                let mass: f64 = set.iter().map(|&i| warm[i]).sum();
                let init: Vec<f64> = if mass > 0.0 {
                    set.iter().map(|&i| warm[i] / mass).collect()
                } else {
                    vec![1.0 / size as f64; size]
                };
                let Some((w, t)) = equal_divergence(out, &set, &init) else {
                    continue;
                };
                if w.iter().any(|&v| v <= 0.0) {
                    continue;
                }
                let r = Reference::new(out.average(set.iter().copied().zip(w.iter().copied())));
                if working.iter().all(|&j| out.divergence(&r, j) <= t + 1e-12) {
                    found = Some((set, w, t, r));
                    break 'search;
                }
            }
        }
        let (set, w, t, r) = found?;
        let (j, dj) = argmax(&out.divergences(&r));
        if dj <= t + 1e-13 {
            return Some(evaluate(out, set.into_iter().zip(w).collect()));
        }
        working = set;
        working.push(j);
    }
    None
}

/// Barycentric weights of `sigma` in the simplex spanned by `set`, if it lies inside.
fn barycentric(out: &Outputs, set: &[usize], sigma: BlochPoint) -> Option<Vec<f64>> {
    let m = set.len();
    let last = out.points[set[m - 1]];
    let w = if m == 1 {
        vec![1.0]
    } else {
        let a = DMatrix::from_fn(3, m - 1, |r, k| out.points[set[k]].sub(last).to_array()[r]);
        let b = DVector::from_column_slice(&sigma.sub(last).to_array());
        let x = a.svd(true, true).solve(&b, 1e-12).ok()?;
        let mut w: Vec<f64> = x.iter().copied().collect();
        w.push(1.0 - w.iter().sum::<f64>());
        w
    };
    let fit = out.average(set.iter().copied().zip(w.iter().copied()));
    (fit.sub(sigma).norm() < 1e-10 && w.iter().all(|&v| v > 1e-12)).then_some(w)
}

/// Looks for a smaller optimal support: keep all but some of the current
/// support points, add one other point attaining the maximal divergence, and
/// require the average output to stay inside the new simplex. The average
/// output is unique, so any such support is optimal too.
fn reduce_support(out: &Outputs, opt: Optimum) -> Optimum {
    let r = Reference::new(opt.sigma);
    let d = out.divergences(&r);
    let active: Vec<usize> = (0..out.len()).filter(|&j| d[j] >= opt.max_divergence - 1e-10).collect();
    let current: Vec<usize> = opt.support.iter().map(|s| s.0).collect();
    for size in 1..current.len() {
        for keep in subsets(&current, size - 1) {
            for &j in &active {
                if keep.contains(&j) {
                    continue;
                }
                let mut set = keep.clone();
                set.push(j);
                let Some(w) = barycentric(out, &set, opt.sigma) else {
                    continue;
                };
                let w = equal_divergence(out, &set, &w).map_or(w, |(exact, _)| exact);
                if w.iter().all(|&v| v > 0.0) {
                    return evaluate(out, set.into_iter().zip(w).collect());
                }
            }
        }
    }
    opt
}

fn solve_restricted(out: &Outputs, tol: f64) -> Result<Optimum> {
    let n = out.len();
    let mut p = vec![1.0 / n as f64; n];
    blahut_arimoto(out, &mut p, WARM_ITERS, 1e-14);
    let mut best = evaluate(out, p.iter().copied().enumerate().filter(|&(_, w)| w > 0.0).collect());
    if let Some(exact) = active_set(out, &p) {
        if exact.value >= best.value - 1e-12 {
            best = reduce_support(out, exact);
        }
    }
    if best.max_divergence - best.value > tol {
        let gap = blahut_arimoto(out, &mut p, MAX_BA_ITERS, tol);
        if gap > tol {
            return Err(Error::NoConvergence(format!(
                "restricted optimum gap {gap:e} above tolerance {tol:e}"
            )));
        }
        best = evaluate(out, p.iter().copied().enumerate().filter(|&(_, w)| w > 0.0).collect());
    }
    Ok(best)
}

/// Merges weighted inputs closer than `radius` (geodesic) and drops weights
/// below 1e-6; cluster directions are weighted centroids re-projected to the sphere.
pub fn cluster_ensemble(inputs: &[(f64, BlochPoint)], radius: f64) -> Vec<(f64, BlochPoint)> {
    let mut items: Vec<(f64, BlochPoint)> = inputs.iter().copied().filter(|&(w, _)| w > PRUNE_WEIGHT).collect();
    items.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut clusters: Vec<(f64, BlochPoint, BlochPoint)> = Vec::new();
    for (w, u) in items {
        match clusters.iter_mut().find(|c| c.2.angle_to(u) <= radius) {
            Some(c) => {
                c.0 += w;
                c.1 = c.1.add(u.scale(w));
            }
            None => clusters.push((w, u.scale(w), u)),
        }
    }
    let total: f64 = clusters.iter().map(|c| c.0).sum();
    clusters
        .into_iter()
        .map(|(w, sum, _)| (w / total, sum.normalized()))
        .collect()
}

pub(crate) fn members(ch: &QubitChannel, sigma: BlochPoint, ensemble: &[(f64, BlochPoint)]) -> Vec<EnsembleMember> {
    let r = Reference::new(sigma);
    ensemble
        .iter()
        .map(|&(weight, input)| {
            let output = ch.map_point(input);
            EnsembleMember {
                weight,
                input,
                output,
                divergence: r.divergence(output),
            }
        })
        .collect()
}

/// Local maximum of `u -> D(L u + c || sigma)` on the unit sphere, by
/// projected gradient ascent with an adaptive step.
fn ascend(ch: &QubitChannel, r: &Reference, start: BlochPoint) -> f64 {
    let lt = |g: BlochPoint| {
        let l = ch.linear();
        BlochPoint::new_unchecked(
            l[0][0] * g.x + l[1][0] * g.y + l[2][0] * g.z,
            l[0][1] * g.x + l[1][1] * g.y + l[2][1] * g.z,
            l[0][2] * g.x + l[1][2] * g.y + l[2][2] * g.z,
        )
    };
    let mut u = start.normalized();
    let mut val = r.divergence(ch.map_point(u));
    if !val.is_finite() {
        return val;
    }
    let mut step = 0.1;
    for _ in 0..2000 {
        let g = lt(bloch::grad_first(ch.map_point(u), r.s));
        let gt = g.sub(u.scale(g.dot(u)));
        if gt.norm() < 1e-14 {
            break;
        }
        loop {
            let cand = u.add(gt.scale(step)).normalized();
            let cv = r.divergence(ch.map_point(cand));
            if cv > val {
                u = cand;
                val = cv;
                step *= 2.0;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                return val;
            }
        }
    }
    val
}

/// Maximum of `D(Lambda u || sigma)` over the whole input sphere, started
/// from the best vertices of a `k`-lattice and any extra starting points.
pub fn sphere_max_divergence(ch: &QubitChannel, sigma: BlochPoint, k: usize, extra: &[BlochPoint]) -> f64 {
    let pts = lattice_points(k.max(2)).expect("k in range");
    let r = Reference::new(sigma);
    let out = Outputs::new(ch, &pts);
    let d = out.divergences(&r);
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    let starts: Vec<BlochPoint> = idx.iter().take(16).map(|&i| pts[i]).chain(extra.iter().copied()).collect();
    let lattice_max = d[idx[0]];
    starts
        .par_iter()
        .map(|&u| ascend(ch, &r, u))
        .reduce(|| lattice_max, f64::max)
}

/// `max { D(Lambda rho || sigma) : rho in lattice }` in Stokes form.
pub fn certify_radius_bloch(ch: &QubitChannel, sigma: BlochPoint, lat: &Lattice) -> f64 {
    let out = Outputs::new(ch, &lat.points);
    argmax(&out.divergences(&Reference::new(sigma))).1
}

pub fn certify_radius(ch: &QubitChannel, sigma: &DensityMatrix, lat: &Lattice) -> Result<f64> {
    Ok(certify_radius_bloch(ch, density_to_stokes(sigma)?, lat))
}

pub(crate) fn require_cptp(ch: &QubitChannel) -> Result<()> {
    let report = cptp_check(ch, CPTP_TOL);
    if !report.is_cptp {
        return Err(Error::NotCptp(report.min_choi_eigenvalue));
    }
    Ok(())
}

/// Maximizes the Holevo quantity over ensembles supported on lattice vertices.
pub fn restricted_capacity(ch: &QubitChannel, lat: &Lattice, tol: f64) -> Result<CapacityResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    require_cptp(ch)?;
    let out = Outputs::new(ch, &lat.points);
    let opt = solve_restricted(&out, tol)?;
    let raw: Vec<(f64, BlochPoint)> = opt.support.iter().map(|&(i, w)| (w, lat.points[i])).collect();
    let clustered = cluster_ensemble(&raw, 2.0 * PI / lat.k as f64);
    let extra: Vec<BlochPoint> = clustered.iter().map(|c| c.1).collect();
    let sphere = sphere_max_divergence(ch, opt.sigma, lat.k, &extra);
    Ok(CapacityResult {
        value: opt.value,
        ensemble: members(ch, opt.sigma, &clustered),
        average_output: opt.sigma,
        certificate_gap: opt.max_divergence - opt.value,
        error_bound: (sphere - opt.value).max(0.0),
        k_used: lat.k,
        refined: false,
        residual: 0.0,
    })
}
