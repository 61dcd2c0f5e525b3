//! Dirichlet-Neumann operator for 2pi-periodic water waves over finite
//! depth, computed by conformally flattening the fluid domain onto a
//! straight strip.  The crate solves the flattening fixed point, applies
//! the operator through the straightened multiplier, assembles its
//! smoothing remainder, and provides the shape derivative together with
//! an independent finite-difference solver used as a cross check.

mod apply;
mod frame;
mod oracle;
mod remainder;
mod shape;

pub use apply::{dn_apply, dn_apply_with_frame};
pub use frame::{solve_conformal, ConformalFrame};
pub use oracle::dn_oracle;
pub use remainder::{dn_remainder, remainder_decay, remainder_with_frame};
pub use shape::{shape_derivative, surface_velocity};

use spectral_core::{FourierField, SpectralError};
use thiserror::Error;

/// Default residual tolerance for fixed-point solves triggered implicitly.
pub const DEFAULT_TOL: f64 = 1e-13;

#[derive(Debug, Error)]
pub enum DnError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("fixed point stalled after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("surface shift too steep: sup |p'| = {0:.3}")]
    DiffeomorphismViolation(f64),
    #[error("linear solve failed: {0}")]
    SolveFailure(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

type Field = FourierField<f64>;

/// Profiles and traces handled here depend on x alone; any mass on
/// nonzero angle modes is a usage error.
pub(crate) fn require_x_only(f: &Field, what: &str) -> Result<(), DnError> {
    let mut mass = 0.0f64;
    f.lattice().for_each_mode(|idx, ell, _j| {
        if ell.iter().any(|&l| l != 0) {
            mass += f.coeffs()[idx].norm_sqr();
        }
    });
    let scale = 1.0 + f.l2_norm();
    if mass.sqrt() > 1e-12 * scale {
        return Err(DnError::InvalidInput(format!(
            "{what} must not depend on the angle variables (offending mass {:.3e})",
            mass.sqrt()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::ModeLattice;

    #[test]
    fn angle_dependence_is_rejected() {
        let lat = ModeLattice::new(1, 1, 8).unwrap();
        let ok = Field::trig(&lat, &[0], 2, 0.1, spectral_core::Parity::Even);
        assert!(require_x_only(&ok, "eta").is_ok());
        let bad = Field::trig(&lat, &[1], 2, 0.1, spectral_core::Parity::Even);
        assert!(matches!(
            require_x_only(&bad, "eta"),
            Err(DnError::InvalidInput(_))
        ));
    }
}
