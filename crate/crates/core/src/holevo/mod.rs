//! Holevo capacity of qubit channels.
//!
//! The input sphere is replaced by a finite lattice, the resulting concave
//! program over the probability simplex is solved exactly, and the engaging
//! inputs it finds seed a Newton solve of the continuous stationarity system.
//! Every result carries a certificate: the largest divergence from any input's
//! output to the average output, minus the achieved value.

pub mod additivity;
pub mod bloch;
mod capacity;
pub mod lattice;
mod refine;
mod restricted;

use serde::Serialize;

use crate::channel::{stokes_density, BlochPoint};
use crate::info::DensityMatrix;

pub use additivity::{
    additivity_scan, two_copy_divergence, two_copy_output_entropy, AdditivityScan, SchmidtGrid, SchmidtPoint,
};
pub use capacity::{capacity, capacity_with_schedule, lattice_convergence, ConvergenceRow, ConvergenceStudy, DEFAULT_SCHEDULE};
pub use lattice::{build_lattice, Lattice};
pub use refine::{refine_capacity, REFINE_TOL};
pub use restricted::{certify_radius, certify_radius_bloch, cluster_ensemble, restricted_capacity, sphere_max_divergence};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnsembleMember {
    pub weight: f64,
    pub input: BlochPoint,
    pub output: BlochPoint,
    /// Divergence of the output from the average output.
    pub divergence: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityResult {
    pub value: f64,
    pub ensemble: Vec<EnsembleMember>,
    pub average_output: BlochPoint,
    /// Largest divergence over the input sphere (or lattice) minus `value`.
    pub certificate_gap: f64,
    /// Upper bound on `C - value`; `value` itself is always achievable.
    pub error_bound: f64,
    pub k_used: usize,
    pub refined: bool,
    /// Newton residual for refined results, zero otherwise.
    pub residual: f64,
}

impl CapacityResult {
    pub fn engaging_number(&self) -> usize {
        self.ensemble.len()
    }

    pub fn average_output_density(&self) -> DensityMatrix {
        stokes_density(self.average_output).expect("average of channel outputs lies in the ball")
    }
}
