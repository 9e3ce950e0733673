use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("unknown basis label `{0}`")]
    Label(String),
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("degenerate trajectory: {0}")]
    DegenerateTrajectory(String),
    #[error("anharmonicity must be nonzero for DRAG fields")]
    SingularAnharmonicity,
    #[error("duration diverges: {0}")]
    DivergentDuration(String),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("optimization failed: {0}")]
    Opt(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical failure.
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::Integration(_) | Error::Opt(_) | Error::Fit(_))
    }
}
