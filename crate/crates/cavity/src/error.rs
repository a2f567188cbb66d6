use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CavityError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Strict damping is needed by closed forms that have no regular limit.
    #[error("{0} requires sigma_minus > sigma_plus")]
    NeedsStrictDamping(&'static str),
    #[error("truncation overflow: tail mass {tail_mass:.3e} exceeds {limit:.1e} at cutoff M={cutoff}")]
    Truncation {
        tail_mass: f64,
        limit: f64,
        cutoff: usize,
    },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),
    #[error("singular matrix in {0}")]
    Singular(&'static str),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("support violation: reference state vanishes where the state has weight {0:.3e}")]
    Support(f64),
    /// Writing an output file or stream failed.
    #[error("output error: {0}")]
    Output(String),
}

impl From<std::io::Error> for CavityError {
    fn from(e: std::io::Error) -> Self {
        CavityError::Output(e.to_string())
    }
}

impl From<csv::Error> for CavityError {
    fn from(e: csv::Error) -> Self {
        CavityError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CavityError {
    fn from(e: serde_json::Error) -> Self {
        CavityError::Output(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CavityError>;
