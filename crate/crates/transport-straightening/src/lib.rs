//! Straightening of quasi-periodic transport operators.
//!
//! The central object is the first-order operator `w . dphi + V(phi, x) dx`
//! with a small real coefficient V. A change of variables x = y + beta(phi, y)
//! along its characteristics conjugates it to the constant-coefficient
//! operator `w . dphi`. The diffeomorphism is found by solving the
//! characteristic equation for the inverse shift, either by Newton iteration
//! with an exact linearized inverse or by a dyadic-smoothing Nash-Moser
//! scheme, and the quality of the conjugation is measured directly on the
//! truncated operator.

mod characteristic;
mod config;
mod linear;
mod nmh;
mod straighten;

pub use characteristic::{solve_characteristic, CharacteristicRun, Method};
pub use config::NMHConfig;
pub use linear::{advected_gradient, linearized_transport_solve};
pub use nmh::{nmh_solve, NmhProblem, NmhSolution, NmhStage};
pub use straighten::{
    characteristic_deviation, composition_operator, conjugated_transport,
    straighten, Straightening,
};

use spectral_core::{FourierField, Parity, SpectralError};
use thiserror::Error;

pub(crate) type Field = FourierField<f64>;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{what} breaks the required parity (defect {defect:.3e})")]
    ParityViolation { what: String, defect: f64 },
    #[error("small divisor |w.l| = {divisor:.3e} at l = {ell:?}")]
    SmallDivisor { ell: Vec<i64>, divisor: f64 },
    #[error("residual grew over three consecutive steps (stage {stage}, residual {residual:.3e})")]
    Divergence { stage: usize, residual: f64 },
    #[error("no convergence after {stages} stages (residual {residual:.3e})")]
    NonConvergence { stages: usize, residual: f64 },
    #[error("smoothing inequality violated at stage {stage}: {ratio:.3e} exceeds the dyadic bound")]
    AxiomViolation { stage: usize, ratio: f64 },
    #[error("shift is not a diffeomorphism: sup |beta_x| = {0:.3}")]
    Diffeomorphism(f64),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Checks a parity constraint up to roundoff relative to the field size.
pub(crate) fn require_parity(
    u: &Field,
    phi: Parity,
    x: Parity,
    what: &str,
) -> Result<(), TransportError> {
    let defect = u.parity_defect(phi, x);
    if defect > 1e-9 * (1.0 + u.l2_norm()) {
        return Err(TransportError::ParityViolation {
            what: what.into(),
            defect,
        });
    }
    Ok(())
}
