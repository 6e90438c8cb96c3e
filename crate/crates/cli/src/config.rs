//! Argument parsing and the resolved run configuration.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use holevo_core::channel::{parse_channel_file, pauli_channel};
use holevo_core::QubitChannel;
use serde::Serialize;

/// Probability lists given on the command line may be rounded (`0.1667`);
/// sums within this distance of 1 are rescaled, anything further is rejected.
const SUM_SLACK: f64 = 1e-3;

#[derive(Parser, Debug)]
#[command(name = "holevo", version, about = "Holevo capacity of qubit channels and entanglement measures")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Significant digits in printed numbers (1-17)
    #[arg(long, global = true, default_value_t = 10)]
    digits: usize,

    /// Worker threads; defaults to HOLEVO_THREADS, then to the number of cores
    #[arg(long, global = true, env = "HOLEVO_THREADS")]
    threads: Option<usize>,

    /// Write the result record (JSON) or plot data (CSV) to this file
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Print the JSON record on stdout instead of the text summary
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Args, Debug, Clone)]
struct ChannelArgs {
    /// Pauli channel from Kraus probabilities p0,px,py,pz
    #[arg(long, value_name = "P0,PX,PY,PZ", conflicts_with_all = ["affine", "channel_file"])]
    pauli: Option<String>,

    /// Linear part of the Bloch map, rows separated by ';'
    #[arg(long, value_name = "MATRIX", requires = "shift", conflicts_with = "channel_file")]
    affine: Option<String>,

    /// Translation of the Bloch map (with --affine)
    #[arg(long, value_name = "X Y Z", requires = "affine")]
    shift: Option<String>,

    /// Channel spec file: one `name m_xx .. m_zz c_x c_y c_z` or
    /// `name pauli p0 px py pz` per line
    #[arg(long, value_name = "PATH")]
    channel_file: Option<PathBuf>,

    /// Channel to take from --channel-file; the first one by default
    #[arg(long, requires = "channel_file")]
    channel_name: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Holevo capacity with its optimal ensemble and certificate
    Capacity {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Target error of the capacity value
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Table of engaging inputs: probability, Bloch vector, angles, output
    Engaging {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Logarithmic negativity against entanglement cost for a Pauli channel
    Gap {
        /// Kraus probabilities p0,px,py,pz
        #[arg(long, value_name = "P0,PX,PY,PZ")]
        p: String,
    },
    /// Gap condition over a grid of Pauli channels (CSV)
    GapScan {
        #[arg(long, default_value_t = 0.05)]
        grid_step: f64,
    },
    /// Seeded searches for strong superadditivity violations on four qubits
    Superadd {
        #[arg(long, value_enum, default_value_t = SearchKind::Random)]
        mode: SearchKind,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Perturbation size for --mode zero
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Independent descents for --mode minimum
        #[arg(long, default_value_t = 10)]
        trials: u64,
        /// Draw coefficients uniformly from the square instead of Gaussian
        #[arg(long)]
        square: bool,
    },
    /// Antisymmetric-state bounds and the two-copy spectrum
    Antisym {
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Simplex point p1,p2,p3 for the two-copy spectrum (d = 3)
        #[arg(long, value_name = "P1,P2,P3")]
        p: Option<String>,
        /// Copies for the sampled reduced-eigenvalue check
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Sampled antisymmetric states; 0 skips sampling
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Restricted capacity on a sequence of lattices against the refined value
    LatticeConvergence {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Lattice parameters, comma separated
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        k: Vec<usize>,
    },
    /// Two-copy divergence over a grid of entangled inputs
    AdditivityScan {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 17)]
        p_points: usize,
        #[arg(long, default_value_t = 9)]
        angle_points: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Teleport a qudit through a maximally entangled pair
    Teleport {
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Run every measurement outcome instead of sampling one
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SearchKind {
    Random,
    Zero,
    Minimum,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSource {
    Pauli { p: [f64; 4] },
    Affine { linear: [[f64; 3]; 3], shift: [f64; 3] },
    File { path: PathBuf, name: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelConfig {
    pub source: ChannelSource,
    pub channel: QubitChannel,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Capacity { channel: ChannelConfig, tol: f64 },
    Engaging { channel: ChannelConfig, tol: f64 },
    Gap { p: [f64; 4] },
    GapScan { grid_step: f64 },
    Superadd {
        mode: SearchKind,
        samples: usize,
        seed: u64,
        epsilon: f64,
        trials: u64,
        square: bool,
    },
    Antisym {
        d: usize,
        p: [f64; 3],
        n: usize,
        samples: usize,
        seed: u64,
    },
    LatticeConvergence { channel: ChannelConfig, k: Vec<usize> },
    AdditivityScan {
        channel: ChannelConfig,
        p_points: usize,
        angle_points: usize,
        tol: f64,
    },
    Teleport { d: usize, exhaustive: bool, seed: u64 },
}

/// Everything a run depends on. The serialized form is embedded in every
/// output file; thread count and destination do not change results and are
/// left out so reruns compare byte for byte.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub digits: usize,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub json: bool,
}

/// Why parsing stopped: clap's own errors (including `--help`) keep their
/// formatting, everything else is a validation failure.
#[derive(Debug)]
pub enum ParseError {
    Clap(clap::Error),
    Invalid(anyhow::Error),
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseError::Clap(e) => write!(f, "{e}"),
            ParseError::Invalid(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for ParseError {}

pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, ParseError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(ParseError::Clap)?;
    resolve(cli).map_err(ParseError::Invalid)
}

fn resolve(cli: Cli) -> Result<RunConfig> {
    if !(1..=17).contains(&cli.digits) {
        bail!("--digits must be between 1 and 17, got {}", cli.digits);
    }
    if cli.threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    let command = match cli.command {
        Cmd::Capacity { channel, tol } => Command::Capacity {
            channel: resolve_channel(&channel)?,
            tol: positive(tol, "--tol")?,
        },
        Cmd::Engaging { channel, tol } => Command::Engaging {
            channel: resolve_channel(&channel)?,
            tol: positive(tol, "--tol")?,
        },
        Cmd::Gap { p } => Command::Gap {
            p: probabilities::<4>(&p, "--p")?,
        },
        Cmd::GapScan { grid_step } => {
            if !(grid_step > 0.0 && grid_step <= 0.1) {
                bail!("--grid-step must lie in (0, 0.1], got {grid_step}");
            }
            Command::GapScan { grid_step }
        }
        Cmd::Superadd {
            mode,
            samples,
            seed,
            epsilon,
            trials,
            square,
        } => {
            if samples == 0 {
                bail!("--samples must be at least 1");
            }
            if mode == SearchKind::Zero {
                positive(epsilon, "--epsilon")?;
            }
            if mode == SearchKind::Minimum && trials == 0 {
                bail!("--trials must be at least 1");
            }
            Command::Superadd {
                mode,
                samples,
                seed,
                epsilon,
                trials,
                square,
            }
        }
        Cmd::Antisym { d, p, n, samples, seed } => {
            if d < 2 {
                bail!("--d must be at least 2, got {d}");
            }
            if n == 0 {
                bail!("--n must be at least 1");
            }
            let p = match p {
                Some(s) => probabilities::<3>(&s, "--p")?,
                None => [1.0 / 3.0; 3],
            };
            Command::Antisym { d, p, n, samples, seed }
        }
        Cmd::LatticeConvergence { channel, k } => {
            if k.is_empty() || k.iter().any(|&k| k < 2) {
                bail!("--k needs lattice parameters of at least 2, got {k:?}");
            }
            Command::LatticeConvergence {
                channel: resolve_channel(&channel)?,
                k,
            }
        }
        Cmd::AdditivityScan {
            channel,
            p_points,
            angle_points,
            tol,
        } => {
            if p_points == 0 || angle_points == 0 {
                bail!("grid resolutions must be at least 1");
            }
            Command::AdditivityScan {
                channel: resolve_channel(&channel)?,
                p_points,
                angle_points,
                tol: positive(tol, "--tol")?,
            }
        }
        Cmd::Teleport { d, exhaustive, seed } => {
            if d < 2 {
                bail!("--d must be at least 2, got {d}");
            }
            Command::Teleport { d, exhaustive, seed }
        }
    };
    Ok(RunConfig {
        command,
        digits: cli.digits,
        threads: cli.threads,
        output: cli.output,
        json: cli.json,
    })
}

fn positive(v: f64, flag: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        bail!("{flag} must be positive, got {v}")
    }
}

fn numbers(s: &str, sep: &[char]) -> Result<Vec<f64>> {
    s.split(sep)
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("not a number: {t:?}")))
        .collect()
}

/// `N` comma-separated probabilities, rescaled to sum exactly to 1.
fn probabilities<const N: usize>(s: &str, flag: &str) -> Result<[f64; N]> {
    let v = numbers(s, &[','])?;
    let p: [f64; N] = v
        .try_into()
        .map_err(|v: Vec<f64>| anyhow!("{flag} expects {N} comma-separated values, got {}", v.len()))?;
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        bail!("{flag} has a negative or non-finite entry: {s}");
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SUM_SLACK {
        bail!("{flag} must sum to 1, got {sum}");
    }
    Ok(p.map(|x| x / sum))
}

fn resolve_channel(args: &ChannelArgs) -> Result<ChannelConfig> {
    if let Some(p) = &args.pauli {
        let p = probabilities::<4>(p, "--pauli")?;
        let channel = pauli_channel(p[0], p[1], p[2], p[3])?;
        return Ok(ChannelConfig {
            source: ChannelSource::Pauli { p },
            channel,
        });
    }
    if let Some(m) = &args.affine {
        let rows: Vec<Vec<f64>> = m.split(';').map(|r| numbers(r, &[' ', ','])).collect::<Result<_>>()?;
        if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
            bail!("--affine expects three rows of three numbers separated by ';', got {m:?}");
        }
        let linear = [0, 1, 2].map(|i| [rows[i][0], rows[i][1], rows[i][2]]);
        let shift_text = args.shift.as_deref().unwrap_or_default();
        let shift: [f64; 3] = numbers(shift_text, &[' ', ','])?
            .try_into()
            .map_err(|_| anyhow!("--shift expects three numbers, got {shift_text:?}"))?;
        let channel = QubitChannel::affine(linear, shift)?;
        return Ok(ChannelConfig {
            source: ChannelSource::Affine { linear, shift },
            channel,
        });
    }
    if let Some(path) = &args.channel_file {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read channel file {}", path.display()))?;
        let specs = parse_channel_file(&text).with_context(|| format!("in channel file {}", path.display()))?;
        let spec = match &args.channel_name {
            Some(name) => specs
                .into_iter()
                .find(|s| &s.name == name)
                .ok_or_else(|| anyhow!("no channel named {name:?} in {}", path.display()))?,
            None => specs
                .into_iter()
                .next()
                .ok_or_else(|| anyhow!("channel file {} is empty", path.display()))?,
        };
        return Ok(ChannelConfig {
            source: ChannelSource::File {
                path: path.clone(),
                name: spec.name,
            },
            channel: spec.channel,
        });
    }
    bail!("a channel is required: give --pauli, --affine with --shift, or --channel-file")
}
