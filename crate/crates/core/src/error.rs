use thiserror::Error;

/// Errors raised by the numerical kernels and the measures built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: best estimate {best} with error estimate {error_estimate}")]
    NonConvergence { best: f64, error_estimate: f64 },

    #[error("integrand is not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error("probability {p} is outside the bracket image [{lo_value}, {hi_value}]")]
    Bracket { p: f64, lo_value: f64, hi_value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid parameter {name} = {value} for family {family}")]
    InvalidParameter {
        family: String,
        name: String,
        value: f64,
    },

    #[error("x = {x} lies outside the usable region D (F(x) = {cdf:e} below the floor {floor:e})")]
    BelowDomainFloor { x: f64, cdf: f64, floor: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },

    #[error("samples must be non-negative and finite, got {value}")]
    NegativeSample { value: f64 },

    #[error("{what} is not finite (the integral diverges)")]
    Divergent { what: String },

    #[error("{what}: residual {residual:e} exceeds tolerance {tolerance:e}")]
    Consistency {
        what: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("order index {n} outside the supported range {min}..={max}")]
    OrderGuard { n: u32, min: u32, max: u32 },

    #[error("precondition violated: {what}{}", witness.map(|w| format!(" (witness x = {w})")).unwrap_or_default())]
    Precondition { what: String, witness: Option<f64> },

    #[error("weighted inactivity time is not positive at x = {x}; the curve cannot characterize a distribution")]
    Characterization { x: f64 },

    #[error("mesh too coarse: error estimate {error_estimate:e} exceeds {tolerance:e}")]
    Resolution { error_estimate: f64, tolerance: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Reinterpret a quadrature failure over an unbounded range as divergence.
    pub(crate) fn into_divergence(self, what: &str) -> Self {
        match self {
            Error::NonConvergence { .. } | Error::NonFiniteIntegrand { .. } => Error::Divergent {
                what: what.to_string(),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
