use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("polynomials are not coprime: common roots {cluster:?}")]
    NotCoprime { cluster: Vec<Complex64> },

    #[error("evaluation at {z} is within tolerance of a pole of entry ({row}, {col})")]
    PoleProximity { row: usize, col: usize, z: Complex64 },

    #[error("ambiguous numerical rank at {z}: sigma_min {sigma} vs threshold {threshold}")]
    AmbiguousRank { z: Complex64, sigma: f64, threshold: f64 },

    #[error("spectral density not strictly positive: min {min} at theta {theta}")]
    NotPositive { min: f64, theta: f64 },

    #[error("spectral factorization did not converge: residual {residual} at section size {section}")]
    NoConvergence { residual: f64, section: usize },

    #[error("symbol not invertible on the circle: min modulus {min_modulus} at theta {theta}")]
    NotInvertible { min_modulus: f64, theta: f64 },

    #[error("winding refinement exhausted its budget of {samples} samples")]
    BudgetExhausted { samples: usize },

    #[error("closed-loop factor singular at theta {theta}: sigma_min {sigma_min}")]
    SingularAtPoint { theta: f64, sigma_min: f64 },

    #[error("no Bezout certificate within tolerance: residual {residual}")]
    CertificateNotFound { residual: f64 },

    #[error("internal inconsistency: {0}")]
    InternalConsistency(String),

    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },
}

impl Error {
    /// Short name of the variant, used in diagnostics documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "Domain",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotCoprime { .. } => "NotCoprime",
            Error::PoleProximity { .. } => "PoleProximity",
            Error::AmbiguousRank { .. } => "AmbiguousRank",
            Error::NotPositive { .. } => "NotPositive",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NotInvertible { .. } => "NotInvertible",
            Error::BudgetExhausted { .. } => "BudgetExhausted",
            Error::SingularAtPoint { .. } => "SingularAtPoint",
            Error::CertificateNotFound { .. } => "CertificateNotFound",
            Error::InternalConsistency(_) => "InternalConsistency",
            Error::Parse { .. } => "Parse",
        }
    }

    /// Process exit code: 2 for input errors, 3 for numerical or
    /// certification failures, 4 for internal inconsistencies.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::DimensionMismatch(_) => 2,
            Error::InternalConsistency(_) => 4,
            _ => 3,
        }
    }
}
