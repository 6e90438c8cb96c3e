//! Seeded searches for violations of the strong superadditivity inequality
//! `E_F(psi) >= E_F(rho_A1B1) + E_F(rho_A2B2)` on four qubits ordered
//! `A1 B1 A2 B2`, and the gap-region scan over Pauli channels. For a pure
//! state `E_F(psi) = S(rho_A1A2)`, so the margin is `S(rho_A1A2) - rhs`.
//!
//! Sample `i` of a run draws from `rng::sample_rng(master_seed, i)`, so every
//! report is independent of thread count and evaluation order.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::PauliProbs;
use crate::entanglement::{eof_two_qubit, gap_condition, GapReport};
use crate::error::{Error, Result};
use crate::info::{von_neumann_entropy, PureState};
use crate::matrix::{c, FactoredDims, C64};
use crate::rng::sample_rng;

/// `rhs > lhs + VIOLATION_TOL` counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

const A1A2: [usize; 2] = [0, 2];
const A1B1: [usize; 2] = [0, 1];
const A2B2: [usize; 2] = [2, 3];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuperaddSample {
    pub seed_index: u64,
    /// `S(rho_A1A2)`, the entanglement of the pure state across `A1A2 : B1B2`.
    pub lhs: f64,
    /// `E_F(rho_A1B1) + E_F(rho_A2B2)`.
    pub rhs: f64,
    pub violated: bool,
}

impl SuperaddSample {
    /// `lhs - rhs`; negative only for a violation.
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

fn superadd_values(psi: &PureState) -> Result<(f64, f64)> {
    if psi.dims().factors() != [2, 2, 2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "expected four qubits, got factors {:?}",
            psi.dims().factors()
        )));
    }
    let rho = psi.density();
    let lhs = von_neumann_entropy(&rho.partial_trace(&A1A2)?);
    let rhs = eof_two_qubit(&rho.partial_trace(&A1B1)?)? + eof_two_qubit(&rho.partial_trace(&A2B2)?)?;
    Ok((lhs, rhs))
}

pub fn superadd_check(psi: &PureState) -> Result<SuperaddSample> {
    let (lhs, rhs) = superadd_values(psi)?;
    Ok(SuperaddSample {
        seed_index: 0,
        lhs,
        rhs,
        violated: rhs > lhs + VIOLATION_TOL,
    })
}

/// How the sixteen coefficients are drawn before normalization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Independent standard normal real and imaginary parts.
    #[default]
    Gaussian,
    /// Real and imaginary parts uniform on `[-1, 1]`.
    Square,
}

fn draw(rng: &mut impl Rng, sampling: Sampling, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| match sampling {
            Sampling::Gaussian => c(rng.sample(StandardNormal), rng.sample(StandardNormal)),
            Sampling::Square => c(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)),
        })
        .collect()
}

fn normalize(mut v: Vec<C64>) -> Vec<C64> {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut v {
        *a /= norm;
    }
    v
}

fn four_qubits(v: Vec<C64>) -> PureState {
    PureState::normalized(v, FactoredDims::qubits(4)).expect("nonzero sample")
}

pub fn random_state(rng: &mut impl Rng, sampling: Sampling) -> PureState {
    four_qubits(draw(rng, sampling, 16))
}

/// Product of random `A1B1` and `A2B2` states plus `epsilon` times a random
/// unit four-qubit vector, renormalized.
pub fn perturbed_product_state(rng: &mut impl Rng, epsilon: f64) -> PureState {
    let left = normalize(draw(rng, Sampling::Gaussian, 4));
    let right = normalize(draw(rng, Sampling::Gaussian, 4));
    let noise = normalize(draw(rng, Sampling::Gaussian, 16));
    let v = (0..16)
        .map(|idx| left[idx >> 2] * right[idx & 3] + noise[idx] * epsilon)
        .collect();
    four_qubits(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchMode {
    Random { sampling: Sampling },
    ZeroNeighborhood { epsilon: f64 },
    Minimum,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub mode: SearchMode,
    pub samples: usize,
    pub violations: usize,
    pub min_margin: f64,
    /// Index of the sample attaining `min_margin`; the smallest index wins ties.
    pub argmin: u64,
    pub master_seed: u64,
}

#[derive(Clone, Debug)]
pub struct SearchRun {
    pub report: SearchReport,
    pub samples: Vec<SuperaddSample>,
}

impl SearchRun {
    /// `(S(rho_A1A2), E_F(rho_A1B1) + E_F(rho_A2B2))` scatter with a header
    /// line carrying the seed and parameters.
    pub fn scatter_csv(&self) -> String {
        let r = &self.report;
        let mut out = format!("# {} master_seed={} samples={}\n", mode_label(&r.mode), r.master_seed, r.samples);
        out.push_str("index,lhs,rhs,margin,violated\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{:.17e},{:.17e},{:.17e},{}", s.seed_index, s.lhs, s.rhs, s.margin(), s.violated);
        }
        out
    }
}

fn mode_label(mode: &SearchMode) -> String {
    match mode {
        SearchMode::Random { sampling } => format!("mode=random sampling={sampling:?}").to_lowercase(),
        SearchMode::ZeroNeighborhood { epsilon } => format!("mode=zero_neighborhood epsilon={epsilon:e}"),
        SearchMode::Minimum => "mode=minimum".into(),
    }
}

fn run_samples(
    n: usize,
    master_seed: u64,
    mode: SearchMode,
    make: impl Fn(&mut rand_chacha::ChaCha8Rng) -> PureState + Sync,
) -> Result<SearchRun> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let samples: Vec<SuperaddSample> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let psi = make(&mut sample_rng(master_seed, i));
            superadd_check(&psi).map(|s| SuperaddSample { seed_index: i, ..s })
        })
        .collect::<Result<_>>()?;
    let violations = samples.iter().filter(|s| s.violated).count();
    let best = samples
        .iter()
        .min_by(|a, b| a.margin().total_cmp(&b.margin()))
        .expect("n >= 1");
    Ok(SearchRun {
        report: SearchReport {
            mode,
            samples: n,
            violations,
            min_margin: best.margin(),
            argmin: best.seed_index,
            master_seed,
        },
        samples,
    })
}

pub fn random_search(n: usize, master_seed: u64, sampling: Sampling) -> Result<SearchRun> {
    run_samples(n, master_seed, SearchMode::Random { sampling }, |rng| random_state(rng, sampling))
}

pub fn zero_neighborhood_search(epsilon: f64, n: usize, master_seed: u64) -> Result<SearchRun> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    run_samples(n, master_seed, SearchMode::ZeroNeighborhood { epsilon }, |rng| {
        perturbed_product_state(rng, epsilon)
    })
}

/// Neighbourhood schedule for [`minimum_search`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinimumSchedule {
    pub candidates: usize,
    pub initial_radius: f64,
    pub shrink: f64,
    pub final_radius: f64,
    pub max_stages: usize,
}

impl Default for MinimumSchedule {
    fn default() -> Self {
        Self {
            candidates: 200,
            initial_radius: 0.3,
            shrink: 0.5,
            final_radius: 1e-6,
            max_stages: 20_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stage {
    pub step: usize,
    pub radius: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimumTrace {
    pub trial: u64,
    pub master_seed: u64,
    pub trajectory: Vec<Stage>,
    pub final_margin: f64,
    /// Largest eigenvalue of `rho_A1B1` at the final point; 1 for a product
    /// across `A1B1 : A2B2`.
    pub final_cut_weight: f64,
    pub final_point: Vec<[f64; 2]>,
}

/// Local descent on `lhs - rhs`. Each stage samples candidates
/// `normalize(x + r g)` around the current point; the best candidate is taken
/// if it lowers the margin, otherwise `r` shrinks.
pub fn minimum_search(master_seed: u64, trial: u64, schedule: MinimumSchedule) -> Result<MinimumTrace> {
    let s = schedule;
    if s.candidates == 0 || !(s.initial_radius > s.final_radius && s.final_radius > 0.0 && s.shrink > 0.0 && s.shrink < 1.0) {
        return Err(Error::InvalidArgument(format!("invalid schedule {s:?}")));
    }
    let mut rng = sample_rng(master_seed, trial);
    let mut x = random_state(&mut rng, Sampling::Gaussian).vector().to_vec();
    let margin_of = |v: &[C64]| -> Result<f64> {
        let (lhs, rhs) = superadd_values(&four_qubits(v.to_vec()))?;
        Ok(lhs - rhs)
    };
    let mut margin = margin_of(&x)?;
    let mut radius = s.initial_radius;
    let mut trajectory = vec![Stage { step: 0, radius, margin }];
    let mut step = 0;
    while radius >= s.final_radius && step < s.max_stages {
        step += 1;
        let scale = radius / (32f64).sqrt();
        let candidates: Vec<Vec<C64>> = (0..s.candidates)
            .map(|_| {
                let g = draw(&mut rng, Sampling::Gaussian, 16);
                normalize(x.iter().zip(&g).map(|(a, d)| a + d * scale).collect())
            })
            .collect();
        let margins: Vec<f64> = candidates
            .par_iter()
            .map(|v| margin_of(v))
            .collect::<Result<_>>()?;
        let (best, &best_margin) = margins
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
            .expect("candidates >= 1");
        if best_margin < margin {
            margin = best_margin;
            x = candidates[best].clone();
        } else {
            radius *= s.shrink;
        }
        trajectory.push(Stage { step, radius, margin });
    }
    let psi = four_qubits(x);
    let cut = psi.density().partial_trace(&A1B1)?.eigenvalues()[0];
    Ok(MinimumTrace {
        trial,
        master_seed,
        trajectory,
        final_margin: margin,
        final_cut_weight: cut,
        final_point: psi.vector().iter().map(|a| [a.re, a.im]).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapScanPoint {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub report: GapReport,
}

/// Gap condition on the grid `px, py, pz in step * N` with `p0 = 1 - px - py - pz >= 0`,
/// keeping only points where the z axis has the largest output radius.
pub fn gap_region_scan(grid_step: f64) -> Result<Vec<GapScanPoint>> {
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(Error::InvalidArgument(format!("grid step must lie in (0, 0.1], got {grid_step}")));
    }
    let n = (1.0 / grid_step + 1e-9).floor() as usize;
    let triples: Vec<(usize, usize, usize)> = (0..=n)
        .flat_map(|i| (0..=n - i).flat_map(move |j| (0..=n - i - j).map(move |k| (i, j, k))))
        .collect();
    let points: Vec<Option<GapScanPoint>> = triples
        .into_par_iter()
        .map(|(i, j, k)| {
            let (px, py, pz) = (i as f64 * grid_step, j as f64 * grid_step, k as f64 * grid_step);
            let p0 = (1.0 - px - py - pz).max(0.0);
            let p = PauliProbs::new(p0, px, py, pz).ok()?;
            if !p.king_ruskai() {
                return None;
            }
            let report = gap_condition(p0, px, py, pz).ok()?;
            Some(GapScanPoint { px, py, pz, report })
        })
        .collect();
    Ok(points.into_iter().flatten().collect())
}

pub fn gap_scan_csv(points: &[GapScanPoint], grid_step: f64) -> String {
    let mut out = format!("# gap-scan grid_step={grid_step:e} points={}\n", points.len());
    out.push_str("px,py,pz,condition_value,gap_holds\n");
    for p in points {
        let _ = writeln!(out, "{:.17e},{:.17e},{:.17e},{:.17e},{}", p.px, p.py, p.pz, p.report.condition_value, p.report.gap_holds);
    }
    out
}
