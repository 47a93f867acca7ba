use thiserror::Error;

/// Errors raised by the solvers, the design routines, the oracle and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LqgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hurwitz (spectral abscissa {abscissa:.3e})")]
    NotHurwitz { abscissa: f64 },

    #[error("pair (A, B) is not stabilizable")]
    NotStabilizable,

    #[error("pair (A, C) is not detectable")]
    NotDetectable,

    #[error("Riccati equation has no stabilizing solution: {0}")]
    NoStabilizingSolution(String),

    #[error("solution misses the residual bound: relative residual {relative_residual:.3e} > {bound:.1e}")]
    InaccurateSolution { relative_residual: f64, bound: f64 },

    #[error("effective filter noise V - 2*alpha*(Sigma0 - mu0*mu0^T) is indefinite (min eigenvalue {min_eigenvalue:.3e})")]
    IndefiniteEffectiveNoise { min_eigenvalue: f64 },

    #[error("discount exponent must be negative for a finite total cost (alpha = {alpha})")]
    AlphaNotNegative { alpha: f64 },

    #[error("shifted joint closed loop is not Hurwitz (spectral abscissa {abscissa:.3e}); the discounted cost diverges")]
    NotDiscountedStable { abscissa: f64 },

    #[error("internal consistency check failed for {what}: {first} vs {second}")]
    InternalConsistency {
        what: &'static str,
        first: f64,
        second: f64,
    },

    #[error("trajectory {trajectory} diverged (non-finite state or cost)")]
    NonFiniteState { trajectory: usize },

    #[error("numerical decomposition failed: {0}")]
    Decomposition(String),
}

pub type Result<T, E = LqgError> = std::result::Result<T, E>;
