use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    #[error(
        "category {category} has zero counts in every cluster; drop the category or add a single count to one cluster"
    )]
    ZeroCategory { category: usize },

    #[error("probability for category {category} is zero")]
    ZeroProbability { category: usize },

    #[error("invalid dispersion {phi} for draw size {n}: need 1 < phi < n")]
    InvalidDispersion { phi: f64, n: u64 },

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("calibration bracket failed: coverage {coverage} < target {target} at multiplier {upper}")]
    Bracket { coverage: f64, target: f64, upper: f64 },

    #[error("degenerate rank summary: {0}")]
    DegenerateRank(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("MCMC initialisation failed: {0}")]
    Initialization(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("unknown method '{id}'; valid ids: {valid}")]
    UnknownMethod { id: String, valid: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("simulation failed: {0}")]
    Simulation(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateDesign(_) => "DegenerateDesign",
            Error::ZeroCategory { .. } => "ZeroCategory",
            Error::ZeroProbability { .. } => "ZeroProbability",
            Error::InvalidDispersion { .. } => "InvalidDispersion",
            Error::NotPsd(_) => "NotPsd",
            Error::Bracket { .. } => "Bracket",
            Error::DegenerateRank(_) => "DegenerateRank",
            Error::Domain(_) => "Domain",
            Error::Initialization(_) => "Initialization",
            Error::Validation(_) => "Validation",
            Error::UnknownMethod { .. } => "UnknownMethod",
            Error::Parse(_) => "Parse",
            Error::Simulation(_) => "Simulation",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
