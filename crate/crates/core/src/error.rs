use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{function}({x}) overflows; use the scaled variant")]
    Overflow { function: &'static str, x: f64 },

    #[error("{what} is undefined here: {reason}")]
    Domain { what: &'static str, reason: String },

    #[error("sideband grid did not converge within {cap} channels (edge {edge:.3e}, change {change:.3e})")]
    NonConvergence { cap: usize, edge: f64, change: f64 },

    #[error("{what} did not converge (residual {residual:.3e})")]
    NotConverged { what: &'static str, residual: f64 },

    #[error("linear solve broke down: {0}")]
    SolverBreakdown(String),

    #[error("channel {n} has a vanishing wavefunction at the origin")]
    DegenerateChannel { n: i64 },

    #[error("no transmitted weight in any open channel")]
    NoTransmission,

    #[error("record too short: frequency resolution {resolution:.3e} exceeds {required:.3e}")]
    Resolution { resolution: f64, required: f64 },

    #[error("norm drift {drift:.3e} exceeds {bound:.1e}")]
    Instability { drift: f64, bound: f64 },

    #[error("{failed} of {total} scan points failed")]
    ScanFailed { failed: usize, total: usize },

    #[error("outside the validity regime: {0}")]
    Regime(String),
}
