//! Command-line flags, the optional TOML configuration file and their merge.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gl_kramers::BoundaryCondition;
use serde::{Deserialize, Serialize};

/// Invalid or missing input; reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

#[derive(Debug, Parser)]
#[command(name = "gl-kramers", version, about = "Kramers rates for the stochastic Ginzburg-Landau equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate breakdown at one length for one or more noise intensities
    Rate(CommonArgs),
    /// Rate breakdown over a grid of lengths and noise intensities
    Sweep(CommonArgs),
    /// Transition-state profile sampled on a grid (--modes grid points)
    Profile(CommonArgs),
    /// Transition-state Hessian eigenvalues (--modes basis functions)
    Spectrum(CommonArgs),
    /// Monte Carlo mean first-passage time from the Galerkin SPDE (--modes cutoff K)
    Mfpt(CommonArgs),
    /// Deterministic self-checks
    Verify(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Rate(_) => "rate",
            Command::Sweep(_) => "sweep",
            Command::Profile(_) => "profile",
            Command::Spectrum(_) => "spectrum",
            Command::Mfpt(_) => "mfpt",
            Command::Verify(_) => "verify",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Rate(a)
            | Command::Sweep(a)
            | Command::Profile(a)
            | Command::Spectrum(a)
            | Command::Mfpt(a)
            | Command::Verify(a) => a,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Boundary conditions: periodic or neumann
    #[arg(long)]
    pub bc: Option<String>,
    /// Interval length
    #[arg(long = "L", allow_negative_numbers = true)]
    pub length: Option<f64>,
    /// Length grid a:b:step; each number may carry a "pi" suffix
    #[arg(long = "L-range")]
    pub length_range: Option<String>,
    /// Noise intensity (repeatable)
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Vec<f64>,
    /// Mode count: Galerkin cutoff (mfpt), basis size (spectrum) or grid points (profile)
    #[arg(long)]
    pub modes: Option<usize>,
    /// Time step
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Simulation horizon
    #[arg(long, allow_negative_numbers = true)]
    pub tmax: Option<f64>,
    /// Number of trajectories
    #[arg(long)]
    pub ntraj: Option<usize>,
    /// Random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; a manifest is written next to it
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Skip the slow quadrature checks
    #[arg(long)]
    pub quick: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    bc: Option<String>,
    #[serde(rename = "L")]
    length: Option<f64>,
    #[serde(rename = "L-range", alias = "L_range")]
    length_range: Option<String>,
    eps: Option<OneOrMany>,
    modes: Option<usize>,
    dt: Option<f64>,
    tmax: Option<f64>,
    ntraj: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    quick: Option<bool>,
}

/// Flags merged over the configuration file, before command-specific checks.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Resolved {
    pub bc: Option<BoundaryCondition>,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    #[serde(rename = "L-range")]
    pub length_range: Option<String>,
    pub eps: Vec<f64>,
    pub modes: Option<usize>,
    pub dt: Option<f64>,
    pub tmax: Option<f64>,
    pub ntraj: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub quick: bool,
}

fn read_file_config(path: &Path) -> anyhow::Result<FileConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("config file {}: {}", path.display(), e.message())))
}

/// Merges flags over the file; flags win.
pub fn resolve(args: &CommonArgs) -> anyhow::Result<Resolved> {
    let file = match &args.config {
        Some(path) => read_file_config(path)?,
        None => FileConfig::default(),
    };
    let bc_text = args.bc.clone().or(file.bc);
    let bc = bc_text
        .map(|text| {
            text.parse::<BoundaryCondition>()
                .map_err(|_| usage(format!("invalid value for `bc`: {text:?} (expected periodic or neumann)")))
        })
        .transpose()?;
    let eps = if !args.eps.is_empty() {
        args.eps.clone()
    } else {
        match file.eps {
            Some(OneOrMany::One(v)) => vec![v],
            Some(OneOrMany::Many(v)) => v,
            None => Vec::new(),
        }
    };
    let resolved = Resolved {
        bc,
        length: args.length.or(file.length),
        length_range: args.length_range.clone().or(file.length_range),
        eps,
        modes: args.modes.or(file.modes),
        dt: args.dt.or(file.dt),
        tmax: args.tmax.or(file.tmax),
        ntraj: args.ntraj.or(file.ntraj),
        seed: args.seed.or(file.seed),
        out: args.out.clone().or(file.out),
        quick: args.quick || file.quick.unwrap_or(false),
    };
    resolved.validate()?;
    Ok(resolved)
}

fn positive(name: &str, value: Option<f64>) -> anyhow::Result<()> {
    match value {
        Some(v) if !(v.is_finite() && v > 0.0) => {
            Err(usage(format!("invalid value for `{name}`: {v} (must be finite and > 0)")))
        }
        _ => Ok(()),
    }
}

impl Resolved {
    fn validate(&self) -> anyhow::Result<()> {
        positive("L", self.length)?;
        for &e in &self.eps {
            positive("eps", Some(e))?;
        }
        positive("dt", self.dt)?;
        positive("tmax", self.tmax)?;
        if self.ntraj == Some(0) {
            return Err(usage("invalid value for `ntraj`: 0 (need at least one trajectory)"));
        }
        if let Some(range) = &self.length_range {
            parse_length_range(range)?;
        }
        Ok(())
    }

    pub fn require_bc(&self) -> anyhow::Result<BoundaryCondition> {
        self.bc.ok_or_else(|| usage("missing required parameter `bc`"))
    }

    pub fn require_length(&self) -> anyhow::Result<f64> {
        self.length.ok_or_else(|| usage("missing required parameter `L`"))
    }

    pub fn require_single_eps(&self) -> anyhow::Result<f64> {
        match self.eps.as_slice() {
            [e] => Ok(*e),
            [] => Err(usage("missing required parameter `eps`")),
            _ => Err(usage("`eps` must be given once for this command")),
        }
    }

    /// Lengths from `--L-range`, or the single `--L`.
    pub fn lengths(&self) -> anyhow::Result<Vec<f64>> {
        match (&self.length_range, self.length) {
            (Some(range), _) => parse_length_range(range),
            (None, Some(l)) => Ok(vec![l]),
            (None, None) => Err(usage("missing required parameter `L` or `L-range`")),
        }
    }
}

fn parse_scaled(text: &str) -> Option<(f64, bool)> {
    let text = text.trim();
    match text.strip_suffix("pi") {
        Some("") => Some((1.0, true)),
        Some(number) => number.trim().parse().ok().map(|v| (v, true)),
        None => text.parse().ok().map(|v| (v, false)),
    }
}

/// Parses `a:b:step`. With a `pi` suffix on every part the grid is built in
/// units of π; grid factors are rounded to 12 decimals so that `1.0pi` is
/// exactly π.
pub fn parse_length_range(text: &str) -> anyhow::Result<Vec<f64>> {
    let bad = || usage(format!("invalid value for `L-range`: {text:?} (expected a:b:step)"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let parsed: Vec<(f64, bool)> = parts.iter().map(|p| parse_scaled(p)).collect::<Option<_>>().ok_or_else(bad)?;
    let in_pi = parsed[0].1;
    if parsed.iter().any(|p| p.1 != in_pi) {
        return Err(usage(format!(
            "invalid value for `L-range`: {text:?} (use the pi suffix on all three parts or none)"
        )));
    }
    let (a, b, step) = (parsed[0].0, parsed[1].0, parsed[2].0);
    if !(a.is_finite() && b.is_finite() && step.is_finite()) || step <= 0.0 || b < a {
        return Err(usage(format!("empty `L-range`: {text:?}")));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    let unit = if in_pi { PI } else { 1.0 };
    let values: Vec<f64> = (0..count)
        .map(|i| {
            let factor = ((a + i as f64 * step) * 1e12).round() / 1e12;
            factor * unit
        })
        .collect();
    if values.iter().any(|&l| l <= 0.0) {
        return Err(usage(format!("invalid value for `L-range`: {text:?} (lengths must be > 0)")));
    }
    Ok(values)
}
