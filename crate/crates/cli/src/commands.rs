//! Dispatch of a resolved [`RunConfig`] to the library, and rendering of the
//! text summary, JSON record and CSV plot data.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use holevo_core::entanglement::{
    antisym_lower_bound, antisym_pair_spectrum, gap_condition, max_reduced_eigenvalue, random_antisymmetric,
};
use holevo_core::holevo::{additivity_scan, bloch, capacity, lattice_convergence, SchmidtGrid};
use holevo_core::info::{teleport_all_outcomes, teleport_roundtrip, TeleportOutcome};
use holevo_core::rng::{sample_rng, seeded};
use holevo_core::search::{
    gap_region_scan, gap_scan_csv, minimum_search, random_search, zero_neighborhood_search, MinimumSchedule, Sampling,
    VIOLATION_TOL,
};
use holevo_core::{BlochPoint, CapacityResult, FactoredDims, PureState};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ChannelConfig, Command, RunConfig, SearchKind};

/// Two-copy values above `2C` by more than this count as an additivity violation.
const ADDITIVITY_TOL: f64 = 1e-6;

/// Whether the command found what it was looking for (a violation or a gap).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    Found,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Completed => 0,
            Outcome::Found => 2,
        }
    }
}

/// What a command produced before it is written anywhere.
pub struct Report {
    pub text: String,
    pub result: Value,
    /// Plot data; commands without it write the JSON record to `--output`.
    pub csv: Option<String>,
    pub found: bool,
}

#[derive(Serialize)]
struct Record<'a> {
    config: &'a RunConfig,
    result: &'a Value,
}

/// Runs the command, writes `--output` if given and prints the summary.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    let report = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("cannot start the worker pool")?
            .install(|| execute(config))?,
        None => execute(config)?,
    };
    let record = serde_json::to_string_pretty(&Record {
        config,
        result: &report.result,
    })?;
    if let Some(path) = &config.output {
        let body = match &report.csv {
            Some(csv) => format!("# holevo {}\n{csv}", serde_json::to_string(config)?),
            None => format!("{record}\n"),
        };
        std::fs::write(path, body).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if config.json {
        println!("{record}");
    } else {
        print!("{}", report.text);
    }
    Ok(if report.found { Outcome::Found } else { Outcome::Completed })
}

/// Runs the command without writing anything.
pub fn execute(config: &RunConfig) -> Result<Report> {
    let f = Fmt(config.digits);
    match &config.command {
        Command::Capacity { channel, tol } => capacity_cmd(f, channel, *tol),
        Command::Engaging { channel, tol } => engaging_cmd(f, channel, *tol),
        Command::Gap { p } => gap_cmd(f, *p),
        Command::GapScan { grid_step } => gap_scan_cmd(*grid_step),
        Command::Superadd {
            mode,
            samples,
            seed,
            epsilon,
            trials,
            square,
        } => superadd_cmd(f, *mode, *samples, *seed, *epsilon, *trials, *square),
        Command::Antisym { d, p, n, samples, seed } => antisym_cmd(f, *d, *p, *n, *samples, *seed),
        Command::LatticeConvergence { channel, k } => lattice_cmd(f, channel, k),
        Command::AdditivityScan {
            channel,
            p_points,
            angle_points,
            tol,
        } => additivity_cmd(f, channel, *p_points, *angle_points, *tol),
        Command::Teleport { d, exhaustive, seed } => teleport_cmd(f, *d, *exhaustive, *seed),
    }
}

/// Number formatting with a fixed count of significant digits.
#[derive(Clone, Copy)]
pub struct Fmt(pub usize);

impl Fmt {
    pub fn num(self, v: f64) -> String {
        if v == 0.0 || !v.is_finite() {
            return format!("{v}");
        }
        let exp = v.abs().log10().floor() as i32;
        let digits = self.0 as i32;
        if (-4..digits).contains(&exp) {
            format!("{:.*}", (digits - 1 - exp).max(0) as usize, v)
        } else {
            format!("{:.*e}", self.0 - 1, v)
        }
    }

    fn point(self, p: BlochPoint) -> String {
        format!("({}, {}, {})", self.num(p.x), self.num(p.y), self.num(p.z))
    }
}

fn solve(channel: &ChannelConfig, tol: f64) -> Result<CapacityResult> {
    capacity(&channel.channel, tol).context("capacity computation failed")
}

fn capacity_cmd(f: Fmt, channel: &ChannelConfig, tol: f64) -> Result<Report> {
    let r = solve(channel, tol)?;
    let mut t = String::new();
    writeln!(t, "capacity         {}", f.num(r.value))?;
    writeln!(t, "engaging inputs  {}", r.engaging_number())?;
    writeln!(t, "certificate gap  {}", f.num(r.certificate_gap))?;
    writeln!(t, "error bound      {}", f.num(r.error_bound))?;
    writeln!(t, "lattice k        {}{}", r.k_used, if r.refined { " (refined)" } else { "" })?;
    writeln!(
        t,
        "average output   {}  entropy {}",
        f.point(r.average_output),
        f.num(bloch::entropy(r.average_output.norm()))
    )?;
    for m in &r.ensemble {
        writeln!(t, "  {}  input {}  divergence {}", f.num(m.weight), f.point(m.input), f.num(m.divergence))?;
    }
    Ok(Report {
        text: t,
        result: serde_json::to_value(&r)?,
        csv: None,
        found: false,
    })
}

fn engaging_cmd(f: Fmt, channel: &ChannelConfig, tol: f64) -> Result<Report> {
    let r = solve(channel, tol)?;
    let mut rows = Vec::new();
    let mut t = String::new();
    let mut csv = String::from("probability,x,y,z,polar_deg,azimuth_deg,out_x,out_y,out_z,output_entropy,divergence\n");
    for m in &r.ensemble {
        let (polar, azimuth) = m.input.angles();
        let s = bloch::entropy(m.output.norm());
        writeln!(
            t,
            "{}  input {}  polar {}  azimuth {}  output {}  S {}",
            f.num(m.weight),
            f.point(m.input),
            f.num(polar.to_degrees()),
            f.num(azimuth.to_degrees()),
            f.point(m.output),
            f.num(s)
        )?;
        let cells = [
            m.weight,
            m.input.x,
            m.input.y,
            m.input.z,
            polar.to_degrees(),
            azimuth.to_degrees(),
            m.output.x,
            m.output.y,
            m.output.z,
            s,
            m.divergence,
        ];
        csv.push_str(&cells.map(|v| format!("{v:.17e}")).join(","));
        csv.push('\n');
        rows.push(json!({
            "probability": m.weight,
            "input": m.input,
            "polar_deg": polar.to_degrees(),
            "azimuth_deg": azimuth.to_degrees(),
            "output": m.output,
            "output_entropy": s,
            "divergence": m.divergence,
        }));
    }
    writeln!(
        t,
        "average output {}  entropy {}  capacity {}",
        f.point(r.average_output),
        f.num(bloch::entropy(r.average_output.norm())),
        f.num(r.value)
    )?;
    Ok(Report {
        text: t,
        result: json!({ "capacity": r.value, "average_output": r.average_output, "engaging": rows }),
        csv: Some(csv),
        found: false,
    })
}

fn gap_cmd(f: Fmt, p: [f64; 4]) -> Result<Report> {
    let g = gap_condition(p[0], p[1], p[2], p[3])?;
    let mut t = String::new();
    writeln!(t, "trace norm       {}", f.num(2f64.powf(g.e_n)))?;
    writeln!(t, "E_N              {}", f.num(g.e_n))?;
    writeln!(t, "E_C              {}", f.num(g.e_c))?;
    writeln!(t, "condition value  {}", f.num(g.condition_value))?;
    writeln!(t, "gap_holds={}", g.gap_holds)?;
    Ok(Report {
        text: t,
        result: serde_json::to_value(g)?,
        csv: None,
        found: g.gap_holds,
    })
}

fn gap_scan_cmd(grid_step: f64) -> Result<Report> {
    let points = gap_region_scan(grid_step)?;
    let with_gap = points.iter().filter(|p| p.report.gap_holds).count();
    let text = format!("{} grid points, gap holds at {with_gap}\n", points.len());
    Ok(Report {
        text,
        result: json!({ "points": points.len(), "gap_points": with_gap }),
        csv: Some(gap_scan_csv(&points, grid_step)),
        found: with_gap > 0,
    })
}

fn superadd_cmd(
    f: Fmt,
    mode: SearchKind,
    samples: usize,
    seed: u64,
    epsilon: f64,
    trials: u64,
    square: bool,
) -> Result<Report> {
    if mode == SearchKind::Minimum {
        let traces = (0..trials)
            .map(|trial| minimum_search(seed, trial, MinimumSchedule::default()))
            .collect::<holevo_core::Result<Vec<_>>>()?;
        let mut t = String::new();
        let mut csv = String::from("trial,step,radius,margin\n");
        for tr in &traces {
            writeln!(
                t,
                "trial {}  stages {}  final margin {}  cut weight {}",
                tr.trial,
                tr.trajectory.len() - 1,
                f.num(tr.final_margin),
                f.num(tr.final_cut_weight)
            )?;
            for s in &tr.trajectory {
                writeln!(csv, "{},{},{:.17e},{:.17e}", tr.trial, s.step, s.radius, s.margin)?;
            }
        }
        let found = traces.iter().any(|tr| tr.final_margin < -VIOLATION_TOL);
        Ok(Report {
            text: t,
            result: serde_json::to_value(&traces)?,
            csv: Some(csv),
            found,
        })
    } else {
        let run = match mode {
            SearchKind::Random => {
                let sampling = if square { Sampling::Square } else { Sampling::Gaussian };
                random_search(samples, seed, sampling)?
            }
            _ => zero_neighborhood_search(epsilon, samples, seed)?,
        };
        let r = &run.report;
        let mut t = String::new();
        writeln!(t, "samples     {}", r.samples)?;
        writeln!(t, "violations  {}", r.violations)?;
        writeln!(t, "min margin  {} (sample {})", f.num(r.min_margin), r.argmin)?;
        Ok(Report {
            text: t,
            result: serde_json::to_value(r)?,
            csv: Some(run.scatter_csv()),
            found: r.violations > 0,
        })
    }
}

fn antisym_cmd(f: Fmt, d: usize, p: [f64; 3], n: usize, samples: usize, seed: u64) -> Result<Report> {
    let mut t = String::new();
    let mut result = serde_json::Map::new();
    let lb = antisym_lower_bound(d)?;
    writeln!(t, "lower bound (d = {d})  {}", f.num(lb))?;
    result.insert("lower_bound".into(), json!(lb));
    if d == 3 {
        let s = antisym_pair_spectrum(p[0], p[1], p[2])?;
        writeln!(t, "two-copy spectrum at p = ({}, {}, {})", f.num(p[0]), f.num(p[1]), f.num(p[2]))?;
        let eig: Vec<String> = s.eigenvalues.iter().map(|&v| f.num(v)).collect();
        writeln!(t, "  {}", eig.join(" "))?;
        writeln!(t, "  entropy {}", f.num(s.entropy))?;
        result.insert("pair_spectrum".into(), serde_json::to_value(s)?);
    }
    if samples > 0 {
        let values = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let v = random_antisymmetric(d, n, &mut sample_rng(seed, i))?;
                max_reduced_eigenvalue(&v, d, n)
            })
            .collect::<holevo_core::Result<Vec<f64>>>()?;
        let worst = values.iter().cloned().fold(0.0, f64::max);
        writeln!(t, "largest reduced eigenvalue over {samples} samples (n = {n})  {}", f.num(worst))?;
        result.insert("max_reduced_eigenvalue".into(), json!(worst));
    }
    Ok(Report {
        text: t,
        result: Value::Object(result),
        csv: None,
        found: false,
    })
}

fn lattice_cmd(f: Fmt, channel: &ChannelConfig, ks: &[usize]) -> Result<Report> {
    let study = lattice_convergence(&channel.channel, ks, None)?;
    let mut t = String::new();
    writeln!(t, "reference  {}", f.num(study.reference))?;
    let mut csv = String::from("k,points,delta,value,error,scaled_error\n");
    for r in &study.rows {
        writeln!(t, "k {:>4}  points {:>6}  value {}  error {}", r.k, r.points, f.num(r.value), f.num(r.error))?;
        writeln!(csv, "{},{},{:.17e},{:.17e},{:.17e},{:.17e}", r.k, r.points, r.delta, r.value, r.error, r.scaled_error)?;
    }
    writeln!(t, "fitted A   {}", f.num(study.fitted_a))?;
    writeln!(t, "monotone   {}", study.is_monotone())?;
    Ok(Report {
        text: t,
        result: serde_json::to_value(&study)?,
        csv: Some(csv),
        found: false,
    })
}

fn additivity_cmd(f: Fmt, channel: &ChannelConfig, p_points: usize, angle_points: usize, tol: f64) -> Result<Report> {
    let r = solve(channel, tol)?;
    let grid = SchmidtGrid { p_points, angle_points };
    let scan = additivity_scan(&channel.channel, r.average_output, grid)?;
    let bound = 2.0 * r.value;
    let found = scan.max_value > bound + ADDITIVITY_TOL;
    let mut t = String::new();
    writeln!(t, "grid points     {}", scan.evaluated)?;
    writeln!(t, "max divergence  {}", f.num(scan.max_value))?;
    writeln!(t, "2 C             {}", f.num(bound))?;
    writeln!(t, "violation       {found}")?;
    Ok(Report {
        text: t,
        result: json!({ "capacity": r.value, "scan": scan }),
        csv: None,
        found,
    })
}

fn outcome_json(o: &TeleportOutcome) -> Value {
    json!({ "x": o.x, "y": o.y, "probability": o.probability, "fidelity": o.fidelity })
}

fn teleport_cmd(f: Fmt, d: usize, exhaustive: bool, seed: u64) -> Result<Report> {
    let dims = FactoredDims::new(vec![d])?;
    let psi = PureState::random(dims, &mut seeded(seed));
    let outcomes = if exhaustive {
        teleport_all_outcomes(d, &psi)?
    } else {
        vec![teleport_roundtrip(d, &psi, seed)?]
    };
    let mut t = String::new();
    for o in &outcomes {
        writeln!(
            t,
            "x {} y {}  probability {}  fidelity {}",
            o.x,
            o.y,
            f.num(o.probability),
            f.num(o.fidelity)
        )?;
    }
    let worst = outcomes.iter().map(|o| (o.fidelity - 1.0).abs()).fold(0.0, f64::max);
    writeln!(t, "{} outcomes, max |fidelity - 1| {}", outcomes.len(), f.num(worst))?;
    Ok(Report {
        text: t,
        result: json!({ "outcomes": outcomes.iter().map(outcome_json).collect::<Vec<_>>() }),
        csv: None,
        found: false,
    })
}
