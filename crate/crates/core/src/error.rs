use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument left the domain where a map or elementary function is defined.
    #[error("domain error in {what}: {value}")]
    Domain { what: &'static str, value: f64 },

    /// The homogeneous pivot of a projective point is not locally constant.
    #[error("dehomogenization pivot unstable (modulus gap {gap:e} below threshold)")]
    PivotUnstable { gap: f64 },

    #[error("immersion is rank deficient (smallest metric eigenvalue {min_eigenvalue:e})")]
    RankDeficient { min_eigenvalue: f64 },

    /// Total symmetry of the second fundamental form failed; this is an upstream bug.
    #[error("second fundamental form is not totally symmetric (residual {residual:e})")]
    SymmetryViolation { residual: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid immersion specification: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
