use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wmit_core::dist::{DiscreteLaw, Dist, DistSpec};
use wmit_core::numerics::Grid;
use wmit_core::weights::{WeightFn, WeightSpec};

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Measure,
    OrderCheck,
    Iwmit,
    Reconstruct,
    Simulate,
    Acceptance,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Measure => "measure",
            Command::OrderCheck => "order-check",
            Command::Iwmit => "iwmit",
            Command::Reconstruct => "reconstruct",
            Command::Simulate => "simulate",
            Command::Acceptance => "acceptance",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid, ConfigError> {
        let g = match self.spacing {
            Spacing::Log => Grid::log_spaced(self.lo, self.hi, self.points),
            Spacing::Linear => Grid::linear(self.lo, self.hi, self.points),
        };
        g.map_err(|e| ConfigError::new("grid", e.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// A distribution given either as shorthand (`exponential:rate=2`) or as a tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistArg {
    Short(String),
    Tree(DistSpec),
}

impl DistArg {
    fn spec(&self) -> Result<DistSpec, String> {
        match self {
            DistArg::Short(s) => s.parse().map_err(|e: wmit_core::Error| e.to_string()),
            DistArg::Tree(t) => Ok(t.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightArg {
    Short(String),
    Tree(WeightSpec),
}

impl WeightArg {
    fn spec(&self) -> Result<WeightSpec, String> {
        match self {
            WeightArg::Short(s) => s.parse().map_err(|e: wmit_core::Error| e.to_string()),
            WeightArg::Tree(t) => Ok(t.clone()),
        }
    }
}

/// Everything a single run needs; the CLI flags and `--config` files both
/// produce this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    #[serde(alias = "dist_specs")]
    pub dists: Vec<DistArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[serde(alias = "weight_spec")]
    pub weight: Option<WeightArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[serde(alias = "order_kind")]
    pub order: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// For `order-check`: also run the implication suite.
    #[serde(default)]
    pub implications: bool,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            dists: Vec::new(),
            weight: None,
            order: None,
            quantity: None,
            model: None,
            counts: None,
            n: None,
            t: Vec::new(),
            p: None,
            grid: None,
            tol: DEFAULT_TOL,
            seed: None,
            samples: DEFAULT_SAMPLES,
            implications: false,
            output: OutputSpec::default(),
        }
    }

    /// The explicit seed, or the first 8 bytes of the SHA-256 of the
    /// seedless config with the output destination removed.
    pub fn effective_seed(&self) -> u64 {
        if let Some(s) = self.seed {
            return s;
        }
        let mut c = self.clone();
        c.seed = None;
        c.output = OutputSpec::default();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        let mut head = [0u8; 8];
        head.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(head)
    }
}

/// A validation failure naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid field '{}': {}", self.field, self.message)
    }
}

/// A config whose specs have been built into library objects.
pub struct Validated {
    pub config: RunConfig,
    pub dists: Vec<Dist>,
    pub dist_labels: Vec<String>,
    pub weight: Option<WeightFn>,
    pub grid: Option<Grid>,
    pub seed: u64,
}

impl Validated {
    pub fn dist(&self, i: usize, field: &str) -> Result<&Dist, ConfigError> {
        self.dists
            .get(i)
            .ok_or_else(|| ConfigError::new(field, format!("command '{}' needs at least {} distribution(s)", self.config.command, i + 1)))
    }

    pub fn weight_or_identity(&self) -> WeightFn {
        self.weight.clone().unwrap_or_else(WeightFn::identity)
    }

    pub fn require_weight(&self) -> Result<&WeightFn, ConfigError> {
        self.weight
            .as_ref()
            .ok_or_else(|| ConfigError::new("weight", "this quantity needs a weight function"))
    }

    pub fn first_t(&self) -> Result<f64, ConfigError> {
        self.config
            .t
            .first()
            .copied()
            .ok_or_else(|| ConfigError::new("t", "this quantity needs a time point"))
    }

    pub fn n(&self) -> Result<u32, ConfigError> {
        self.config.n.ok_or_else(|| ConfigError::new("n", "this quantity needs an order index"))
    }

    pub fn p(&self) -> Result<f64, ConfigError> {
        self.config.p.ok_or_else(|| ConfigError::new("p", "this quantity needs a probability level"))
    }
}

pub fn validate(config: RunConfig) -> Result<Validated, ConfigError> {
    if !(config.tol > 0.0 && config.tol.is_finite()) {
        return Err(ConfigError::new("tol", format!("must be positive, got {}", config.tol)));
    }
    if config.samples < 1 {
        return Err(ConfigError::new("samples", "must be at least 1"));
    }
    if let Some(p) = config.p {
        if !(p > 0.0 && p < 1.0) {
            return Err(ConfigError::new("p", format!("must lie in (0, 1), got {p}")));
        }
    }
    if config.t.iter().any(|t| !t.is_finite()) {
        return Err(ConfigError::new("t", "time points must be finite"));
    }
    let mut dists = Vec::new();
    let mut dist_labels = Vec::new();
    for (i, arg) in config.dists.iter().enumerate() {
        let field = format!("dists[{i}]");
        let spec = arg.spec().map_err(|m| ConfigError::new(&field, m))?;
        let d = spec.build().map_err(|e| ConfigError::new(&field, e.to_string()))?;
        dist_labels.push(spec.to_string());
        dists.push(d);
    }
    let grid = config.grid.as_ref().map(GridSpec::build).transpose()?;
    let weight = match &config.weight {
        Some(arg) => {
            let spec = arg.spec().map_err(|m| ConfigError::new("weight", m))?;
            Some(
                spec.build(dists.first(), grid.as_ref())
                    .map_err(|e| ConfigError::new("weight", e.to_string()))?,
            )
        }
        None => None,
    };
    let seed = config.effective_seed();
    Ok(Validated {
        config,
        dists,
        dist_labels,
        weight,
        grid,
        seed,
    })
}

/// `geometric:q=0.5`, `point:m=1` or `pmf:p0,p1,...`.
pub fn parse_counts(s: &str) -> Result<DiscreteLaw, ConfigError> {
    let err = |m: String| ConfigError::new("counts", m);
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    match head.trim() {
        "geometric" => {
            let q = rest
                .trim()
                .strip_prefix("q=")
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| err("geometric needs q=<value>".into()))?;
            DiscreteLaw::geometric(q).map_err(|e| err(e.to_string()))
        }
        "point" => {
            let m = rest
                .trim()
                .strip_prefix("m=")
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| err("point needs m=<integer>".into()))?;
            if m == 0 {
                return Err(err("point mass must sit at m >= 1".into()));
            }
            Ok(DiscreteLaw::point(m))
        }
        "pmf" => {
            let pmf = rest
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| err("pmf needs comma-separated probabilities".into()))?;
            DiscreteLaw::from_pmf(pmf, "pmf").map_err(|e| err(e.to_string()))
        }
        other => Err(err(format!("unknown count law '{other}' (geometric, point, pmf)"))),
    }
}
