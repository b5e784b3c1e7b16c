//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid construction parameters (gamma out of range, k = 0, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Configuration could not be parsed (CLI exit status 2).
    #[error("config parse error: {0}")]
    ConfigParse(String),

    /// Concentration scales are not separated by the required factor
    /// (rho too large for the asymptotic regime; CLI exit status 3).
    #[error("scale collapse: {0}")]
    ScaleCollapse(String),

    /// Picard iteration failed to contract (CLI exit status 4).
    #[error("no contraction: measured factor {factor:.6} at iteration {iters}")]
    NoContraction { factor: f64, iters: usize },

    /// Adaptive quadrature exhausted its depth budget (CLI exit status 5).
    #[error("quadrature non-convergence: error estimate {error_estimate:.3e} over [{a:.6}, {b:.6}]")]
    QuadratureNonconvergence { error_estimate: f64, a: f64, b: f64 },

    /// Linear mode solve hit a near-zero eigenvalue.
    #[error("near-singular mode-{mode} system: smallest eigenvalue {sigma_min:.3e}")]
    NearSingular { mode: u32, sigma_min: f64 },

    /// A rescaled coordinate fell outside the requested annulus.
    #[error("point log_y = {log_y:.6} outside annulus {j} (bounds [{lo:.6}, {hi:.6}] in log|y|)")]
    OutOfAnnulus { j: usize, log_y: f64, lo: f64, hi: f64 },

    /// An exponential would overflow the log-space budget.
    #[error("log-space budget exceeded: exponent {exponent:.3e}")]
    Overflow { exponent: f64 },

    /// Slope fit rejected (too few points, non-positive data, or noise floor).
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// The coprime-form arithmetic contradicted the symmetry class.
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit status for this error kind.
    pub fn exit_status(&self) -> i32 {
        match self {
            Error::ConfigParse(_) | Error::InvalidParameter(_) => 2,
            Error::ScaleCollapse(_) => 3,
            Error::NoContraction { .. } => 4,
            Error::QuadratureNonconvergence { .. } => 5,
            _ => 1,
        }
    }
}
