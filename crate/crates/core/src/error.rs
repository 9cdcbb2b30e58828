use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: coefficients sum to {sum}, expected 1")]
    NotNormalized { what: &'static str, sum: f64 },

    #[error("{what}: entry {index} is negative ({value})")]
    NegativeProbability {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("{what}: value {value} outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("oracle inconsistency: {0}")]
    OracleInconsistent(String),

    #[error("ensemble annihilated: survival probability is zero")]
    EnsembleAnnihilated,

    #[error("eigenvalue solver did not converge for a {0}x{0} matrix")]
    EigenSolver(usize),

    #[error("no sign change of {quantity} on bracket [{lo}, {hi}]")]
    NoSignChange {
        quantity: &'static str,
        lo: f64,
        hi: f64,
    },

    #[error("target epsilon {0} is unreachable")]
    Unreachable(f64),

    #[error("invalid config at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable category, used by the CLI error record and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotNormalized { .. } => "not_normalized",
            Error::NegativeProbability { .. } => "negative_probability",
            Error::Domain { .. } => "domain",
            Error::OracleInconsistent(_) => "oracle_inconsistent",
            Error::EnsembleAnnihilated => "ensemble_annihilated",
            Error::EigenSolver(_) => "eigen_solver",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::Unreachable(_) => "unreachable",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
