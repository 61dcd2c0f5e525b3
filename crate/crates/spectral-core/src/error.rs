use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("lattice mismatch: {0} vs {1}")]
    LatticeMismatch(String, String),

    #[error("input must have zero phi-average; l=0 coefficient mass {mass:.3e}")]
    NonZeroPhiAverage { mass: f64 },

    #[error("|w.l| = {value:.6e} < {bound:.6e} at l = {ell:?}: diophantine bound fails")]
    DiophantineViolation {
        ell: Vec<i64>,
        value: f64,
        bound: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
