//! Flag parsing and resolution into a validated [`StudyConfig`].
//!
//! Precedence: command-line flags, then the JSON file given by `--config`,
//! then built-in defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ridgequad::models::ModelKind;
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "ridgequad", version, about = "Gaussian quadrature and polynomial approximation for ridge functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (default 1; output is identical for any count).
    #[arg(long, global = true, env = "RIDGEQUAD_THREADS")]
    pub threads: Option<usize>,

    /// JSON file with default values for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density q(u) of u = aᵀx as a `u,q` table.
    Density(CommonArgs),
    /// Gauss rule for q(u) as a `lambda,nu` table.
    Quadrature(CommonArgs),
    /// Pseudospectral approximation of an exact ridge function.
    Approx(ApproxArgs),
    /// Near-ridge approximation from sampled conditional means.
    NearApprox(NearArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionSource {
    /// `(1, …, 1)/√m`.
    Ones,
    /// Normalized Gaussian vector drawn from `--seed`.
    Random,
    /// Averaged finite-difference gradient of the model at 50 seeded points.
    Gradient,
    /// Components read from `--direction-file`.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Allocation {
    /// The same number of samples at every node.
    Equal,
    /// Samples in proportion to the quadrature weights.
    Proportional,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Model: exact_ridge, near_ridge, hartmann or constant.
    #[arg(long)]
    pub model: Option<String>,
    /// Where the ridge direction comes from.
    #[arg(long, value_enum)]
    pub direction: Option<DirectionSource>,
    /// Direction components (JSON array or comma/whitespace separated).
    #[arg(long)]
    pub direction_file: Option<PathBuf>,
    /// Dimension for `ones`/`random` directions (density and quadrature only).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Density grid points (odd).
    #[arg(long = "N")]
    pub n_points: Option<usize>,
    /// Polynomial degree; the rule has d+1 nodes.
    #[arg(long = "d")]
    pub degree: Option<usize>,
    /// RNG seed; required by every stochastic step.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (density, quadrature; default stdout) or directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Error grid over N and d, e.g. `N=1001,10001,d=10,20,30`.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Points in the profile comparison table.
    #[arg(long)]
    pub profile_points: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct NearArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Samples per node.
    #[arg(long = "M")]
    pub samples_per_node: Option<usize>,
    /// Total evaluation budget, split across the d+1 nodes.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, value_enum)]
    pub allocation: Option<Allocation>,
    /// Monte Carlo points for the reported L² error.
    #[arg(long)]
    pub mc_points: Option<usize>,
    /// Points in the shadow-plot table.
    #[arg(long)]
    pub shadow_points: Option<usize>,
    /// Budgets for the Hartmann comparison against the Legendre baseline.
    #[arg(long, value_delimiter = ',')]
    pub budgets: Option<Vec<usize>>,
}

/// Values accepted from a `--config` file; keys mirror the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<String>,
    direction: Option<DirectionSource>,
    direction_file: Option<PathBuf>,
    dim: Option<usize>,
    #[serde(rename = "N")]
    n_points: Option<usize>,
    #[serde(rename = "d")]
    degree: Option<usize>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    format: Option<Format>,
    threads: Option<usize>,
    sweep: Option<String>,
    profile_points: Option<usize>,
    #[serde(rename = "M")]
    samples_per_node: Option<usize>,
    budget: Option<usize>,
    allocation: Option<Allocation>,
    mc_points: Option<usize>,
    shadow_points: Option<usize>,
    budgets: Option<Vec<usize>>,
}

/// Invalid flags or configuration; exits with code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub model: ModelKind,
    pub direction: Option<DirectionSource>,
    pub direction_file: Option<PathBuf>,
    pub dim: Option<usize>,
    pub n_points: usize,
    pub degree: usize,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub threads: usize,
    pub sweep: Option<Sweep>,
    pub profile_points: usize,
    pub samples_per_node: Option<usize>,
    pub budget: Option<usize>,
    pub allocation: Allocation,
    pub mc_points: usize,
    pub shadow_points: usize,
    pub budgets: Vec<usize>,
}

impl StudyConfig {
    pub fn require_seed(&self, why: &str) -> anyhow::Result<u64> {
        self.seed.ok_or_else(|| usage(format!("--seed is required for {why}")))
    }

    pub fn require_output(&self) -> anyhow::Result<&Path> {
        self.output
            .as_deref()
            .ok_or_else(|| usage("--output <DIR> is required for this command"))
    }
}

/// Grid of `N` and `d` values for the error sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub n_points: Vec<usize>,
    pub degrees: Vec<usize>,
}

/// Parses `N=1001,10001,d=10,20` (groups may also be split by `;`).
pub fn parse_sweep(spec: &str) -> anyhow::Result<Sweep> {
    let mut sweep = Sweep {
        n_points: Vec::new(),
        degrees: Vec::new(),
    };
    let mut key: Option<String> = None;
    for token in spec.split([',', ';']).map(str::trim).filter(|t| !t.is_empty()) {
        let value = match token.split_once('=') {
            Some((k, v)) => {
                key = Some(k.trim().to_string());
                v.trim()
            }
            None => token,
        };
        let parsed: usize = value
            .parse()
            .map_err(|_| usage(format!("bad sweep value `{value}`")))?;
        match key.as_deref() {
            Some("N") => sweep.n_points.push(parsed),
            Some("d") => sweep.degrees.push(parsed),
            Some(k) => return Err(usage(format!("unknown sweep key `{k}` (use N and d)"))),
            None => return Err(usage("sweep values must follow `N=` or `d=`")),
        }
    }
    if sweep.n_points.is_empty() || sweep.degrees.is_empty() {
        return Err(usage("sweep needs both N= and d= values"));
    }
    Ok(sweep)
}

fn check_grid_size(n: usize) -> anyhow::Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(usage(format!("--N must be odd and at least 3, got {n}")));
    }
    Ok(())
}

fn load_file(path: Option<&Path>) -> anyhow::Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
}

/// Merges flags, the config file and defaults, and validates the result.
pub fn resolve(
    common: &CommonArgs,
    approx: Option<&ApproxArgs>,
    near: Option<&NearArgs>,
    threads: Option<usize>,
    config: Option<&Path>,
) -> anyhow::Result<StudyConfig> {
    let file = load_file(config)?;
    let model_name = common
        .model
        .clone()
        .or(file.model)
        .unwrap_or_else(|| "exact_ridge".to_string());
    let model = ModelKind::from_name(&model_name).map_err(|e| usage(e.to_string()))?;

    let sweep = match approx.and_then(|a| a.sweep.clone()).or(file.sweep) {
        Some(s) => Some(parse_sweep(&s)?),
        None => None,
    };
    let cfg = StudyConfig {
        model,
        direction: common.direction.or(file.direction),
        direction_file: common.direction_file.clone().or(file.direction_file),
        dim: common.dim.or(file.dim),
        n_points: common.n_points.or(file.n_points).unwrap_or(10_001),
        degree: common.degree.or(file.degree).unwrap_or(10),
        seed: common.seed.or(file.seed),
        output: common.output.clone().or(file.output),
        format: common.format.or(file.format).unwrap_or(Format::Csv),
        threads: threads.or(file.threads).unwrap_or(1),
        sweep,
        profile_points: approx
            .and_then(|a| a.profile_points)
            .or(file.profile_points)
            .unwrap_or(1001),
        samples_per_node: near.and_then(|n| n.samples_per_node).or(file.samples_per_node),
        budget: near.and_then(|n| n.budget).or(file.budget),
        allocation: near
            .and_then(|n| n.allocation)
            .or(file.allocation)
            .unwrap_or(Allocation::Equal),
        mc_points: near.and_then(|n| n.mc_points).or(file.mc_points).unwrap_or(10_000),
        shadow_points: near
            .and_then(|n| n.shadow_points)
            .or(file.shadow_points)
            .unwrap_or(1000),
        budgets: near
            .and_then(|n| n.budgets.clone())
            .or(file.budgets)
            .unwrap_or_else(|| vec![25, 50, 100, 200]),
    };

    check_grid_size(cfg.n_points)?;
    if let Some(sweep) = &cfg.sweep {
        for &n in &sweep.n_points {
            check_grid_size(n)?;
        }
    }
    if cfg.threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    if cfg.samples_per_node == Some(0) {
        return Err(usage("--M must be at least 1"));
    }
    if cfg.samples_per_node.is_some() && cfg.budget.is_some() {
        return Err(usage("give either --M or --budget, not both"));
    }
    if cfg.direction == Some(DirectionSource::File) && cfg.direction_file.is_none() {
        return Err(usage("--direction file needs --direction-file"));
    }
    if cfg.dim == Some(0) {
        return Err(usage("--dim must be at least 1"));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_forms() {
        let want = Sweep {
            n_points: vec![1001, 10001],
            degrees: vec![10, 20],
        };
        assert_eq!(parse_sweep("N=1001,10001,d=10,20").unwrap(), want);
        assert_eq!(parse_sweep("N=1001,10001; d=10,20").unwrap(), want);
        assert!(parse_sweep("N=1001").is_err());
        assert!(parse_sweep("x=3,d=1").is_err());
        assert!(parse_sweep("5,d=1").is_err());
    }

    #[test]
    fn grid_size_must_be_odd() {
        assert!(check_grid_size(10_000).is_err());
        assert!(check_grid_size(1).is_err());
        assert!(check_grid_size(10_001).is_ok());
    }
}
