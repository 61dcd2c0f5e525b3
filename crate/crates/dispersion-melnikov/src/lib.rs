//! Finite-depth dispersion diagnostics: the linear frequencies
//! sqrt(j tanh(h j)), exact Taylor data of the depth profile
//! sqrt(tanh(h^4)), generalized Vandermonde positivity, transversality
//! scans of frequency combinations over a depth window, membership
//! checks for the four families of small-divisor conditions, and grid
//! measures of the resonant depth set together with power-law fits.

mod context;
mod freq;
mod measure;
mod melnikov;
mod report;
mod series;
mod transversality;
mod vdm;

pub use context::{DispersionContext, FloquetSpectrum};
pub use freq::{deep_water_defect, omega, omega_vec};
pub use measure::{power_law_fit, resonant_measure, resonant_measure_with_frequency};
pub use melnikov::{melnikov_member, MelnikovIndex};
pub use report::{membership_scan_csv, ScanSummary};
pub use series::{g1, g1_taylor, g1_taylor_exact, gj};
pub use transversality::{transversality_scan, transversality_scan_with, ScanOptions};
pub use vdm::vandermonde_positive;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DispersionError {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("ordering violation: {0}")]
    OrderingViolation(String),
    #[error("empty index set")]
    EmptyIndexSet,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// All lattice vectors with |ell|_inf <= l_max.
pub(crate) fn ell_box(nu: usize, l_max: usize) -> Vec<Vec<i64>> {
    let r = l_max as i64;
    let mut out = Vec::new();
    let mut cur = vec![-r; nu];
    loop {
        out.push(cur.clone());
        let mut d = 0;
        loop {
            if d == nu {
                return out;
            }
            cur[d] += 1;
            if cur[d] <= r {
                break;
            }
            cur[d] = -r;
            d += 1;
        }
    }
}
