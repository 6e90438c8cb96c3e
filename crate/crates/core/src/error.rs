use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |h - h^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid state vector: {0}")]
    InvalidState(String),

    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("Bloch point outside the unit ball (norm {0})")]
    OutsideBlochBall(f64),

    #[error("channel is not CPTP (minimum Choi eigenvalue {0:e})")]
    NotCptp(f64),

    #[error("king-ruskai ordering violated: {0}")]
    KingRuskai(String),

    #[error("no sign change in the root bracket: {0}")]
    NoBracket(String),

    #[error("optimizer did not converge: {0}")]
    NoConvergence(String),

    #[error("Newton iteration diverged: {0}")]
    NewtonDiverged(String),

    #[error("resource cap exceeded: {0}")]
    ResourceLimit(String),

    #[error("state is outside the antisymmetric subspace (residual {0:e})")]
    NotAntisymmetric(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
