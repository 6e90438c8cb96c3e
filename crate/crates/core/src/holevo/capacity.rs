use serde::Serialize;

use super::lattice::build_lattice;
use super::refine::{refine_capacity, REFINE_TOL};
use super::restricted::restricted_capacity;
use super::CapacityResult;
use crate::channel::QubitChannel;
use crate::error::{Error, Result};

pub const DEFAULT_SCHEDULE: [usize; 6] = [10, 20, 40, 80, 160, 320];
const RESTRICTED_TOL: f64 = 1e-12;

/// Capacity with the default lattice schedule.
pub fn capacity(ch: &QubitChannel, target_err: f64) -> Result<CapacityResult> {
    capacity_with_schedule(ch, target_err, &DEFAULT_SCHEDULE)
}

/// Solves on successively finer lattices, refining each restricted optimum,
/// until two refined values agree within `target_err` and the certificate gap
/// is below `target_err`.
pub fn capacity_with_schedule(ch: &QubitChannel, target_err: f64, schedule: &[usize]) -> Result<CapacityResult> {
    if !(target_err > 0.0) {
        return Err(Error::InvalidArgument(format!("target error must be positive, got {target_err}")));
    }
    let mut previous: Option<f64> = None;
    let mut best: Option<CapacityResult> = None;
    for &k in schedule {
        let lat = build_lattice(k)?;
        let restricted = restricted_capacity(ch, &lat, RESTRICTED_TOL)?;
        match refine_capacity(ch, &restricted, REFINE_TOL.min(target_err)) {
            Ok(refined) => {
                let settled = previous.is_some_and(|p| (refined.value - p).abs() < target_err)
                    && refined.certificate_gap < target_err;
                if settled {
                    return Ok(refined);
                }
                previous = Some(refined.value);
                best = Some(refined);
            }
            Err(_) => {
                previous = None;
                if best.as_ref().map_or(true, |b| restricted.value > b.value) {
                    best = Some(restricted);
                }
            }
        }
    }
    let best = best.map_or("none".to_string(), |b| format!("{} (k = {})", b.value, b.k_used));
    Err(Error::ResourceLimit(format!(
        "capacity did not settle within the lattice schedule {schedule:?}; best value {best}"
    )))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub k: usize,
    pub points: usize,
    pub delta: f64,
    pub value: f64,
    /// `reference - value`.
    pub error: f64,
    /// `error * k^2 / log2 k`.
    pub scaled_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceStudy {
    pub reference: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Smallest `A` with `error <= A log2(k) / k^2` on every row.
    pub fitted_a: f64,
}

impl ConvergenceStudy {
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].value >= w[0].value - 1e-12)
    }
}

/// Restricted values on each lattice compared against a refined reference value.
pub fn lattice_convergence(ch: &QubitChannel, ks: &[usize], reference: Option<f64>) -> Result<ConvergenceStudy> {
    let reference = match reference {
        Some(r) => r,
        None => capacity(ch, 1e-10)?.value,
    };
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let lat = build_lattice(k)?;
        let r = restricted_capacity(ch, &lat, RESTRICTED_TOL)?;
        let error = reference - r.value;
        rows.push(ConvergenceRow {
            k,
            points: lat.points.len(),
            delta: lat.delta,
            value: r.value,
            error,
            scaled_error: error * (k * k) as f64 / (k as f64).log2(),
        });
    }
    let fitted_a = rows.iter().map(|r| r.scaled_error).fold(0.0, f64::max);
    Ok(ConvergenceStudy {
        reference,
        rows,
        fitted_a,
    })
}
