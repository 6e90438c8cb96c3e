use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::BlochPoint;
use crate::error::{Error, Result};

/// Vertices of the latitude/longitude grid that splits every meridian into
/// `k` arcs and the equator into `k` arcs, poles counted once.
#[derive(Clone, Debug, Serialize)]
pub struct Lattice {
    pub k: usize,
    pub points: Vec<BlochPoint>,
    /// Largest geodesic distance from a sphere point to its nearest vertex,
    /// estimated on a deterministic sample of `10 k^2` points.
    pub delta: f64,
}

pub const MAX_K: usize = 1024;

fn vertex(k: usize, u: usize, v: usize) -> BlochPoint {
    let (su, cu) = (u as f64 * PI / k as f64).sin_cos();
    let (sv, cv) = (2.0 * v as f64 * PI / k as f64).sin_cos();
    BlochPoint::new_unchecked(su * cv, su * sv, cu)
}

pub fn lattice_points(k: usize) -> Result<Vec<BlochPoint>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("lattice needs k >= 2, got {k}")));
    }
    if k > MAX_K {
        return Err(Error::ResourceLimit(format!("lattice k = {k} exceeds {MAX_K}")));
    }
    let mut pts = Vec::with_capacity(k * k - k + 2);
    pts.push(BlochPoint::new_unchecked(0.0, 0.0, 1.0));
    for u in 1..k {
        for v in 0..k {
            pts.push(vertex(k, u, v));
        }
    }
    pts.push(BlochPoint::new_unchecked(0.0, 0.0, -1.0));
    Ok(pts)
}

/// Distance from the point with polar angle `theta` and azimuth `phi` to the nearest vertex.
///
/// On a fixed ring the distance grows with the azimuth gap, so the closest
/// vertex of each ring is the one with the nearest longitude.
pub fn nearest_vertex_distance(k: usize, theta: f64, phi: f64) -> f64 {
    let q = BlochPoint::from_angles(theta, phi);
    let mut best = theta.min(PI - theta);
    let step = 2.0 * PI / k as f64;
    let v = (phi.rem_euclid(2.0 * PI) / step).round() as usize % k;
    for u in 1..k {
        best = best.min(q.angle_to(vertex(k, u, v)));
    }
    best
}

/// Fibonacci-spiral sample of `n` points given as `(theta, phi)`.
fn sphere_sample(n: usize) -> impl IndexedParallelIterator<Item = (f64, f64)> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n).into_par_iter().map(move |i| {
        let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
        (z.clamp(-1.0, 1.0).acos(), golden * i as f64)
    })
}

pub fn coarseness(k: usize) -> f64 {
    sphere_sample(10 * k * k)
        .map(|(t, p)| nearest_vertex_distance(k, t, p))
        .reduce(|| 0.0, f64::max)
}

pub fn build_lattice(k: usize) -> Result<Lattice> {
    let points = lattice_points(k)?;
    Ok(Lattice {
        k,
        points,
        delta: coarseness(k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_counts() {
        assert_eq!(lattice_points(2).unwrap().len(), 4);
        assert_eq!(lattice_points(20).unwrap().len(), 382);
        assert!(lattice_points(1).is_err());
        for p in lattice_points(7).unwrap() {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nested_lattices() {
        let coarse = lattice_points(5).unwrap();
        let fine = lattice_points(10).unwrap();
        for p in coarse {
            assert!(fine.iter().any(|q| p.sub(*q).norm() < 1e-12));
        }
    }

    #[test]
    fn ring_search_matches_brute_force() {
        for k in [2, 3, 6, 11] {
            let pts = lattice_points(k).unwrap();
            let golden = PI * (3.0 - 5f64.sqrt());
            for i in 0..500 {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / 500.0;
                let (t, p) = (z.acos(), golden * i as f64);
                let q = BlochPoint::from_angles(t, p);
                let brute = pts.iter().map(|v| q.angle_to(*v)).fold(f64::INFINITY, f64::min);
                assert!((brute - nearest_vertex_distance(k, t, p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coarseness_shrinks_like_one_over_k() {
        let d10 = build_lattice(10).unwrap().delta;
        let d20 = build_lattice(20).unwrap().delta;
        assert!(d10 <= 3.0 * PI / 10.0 && d20 <= 3.0 * PI / 20.0);
        assert!(d20 < 0.6 * d10 && d20 > 0.4 * d10);
    }
}
