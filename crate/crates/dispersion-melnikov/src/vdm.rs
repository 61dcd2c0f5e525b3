//! Generalized Vandermonde determinants det [x_k^{alpha_i}].

use crate::DispersionError;
use nalgebra::DMatrix;

/// Determinant of [x_k^{alpha_i}] together with its sign test; for
/// 0 < x_1 < ... < x_N and alpha_1 < ... < alpha_N it is strictly
/// positive.
pub fn vandermonde_positive(x: &[f64], alpha: &[f64]) -> Result<(f64, bool), DispersionError> {
    if x.is_empty() || x.len() != alpha.len() {
        return Err(DispersionError::OrderingViolation(
            "need equally many nodes and exponents, at least one".into(),
        ));
    }
    if x[0] <= 0.0 {
        return Err(DispersionError::OrderingViolation(
            "nodes must be positive".into(),
        ));
    }
    if x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DispersionError::OrderingViolation(
            "nodes must increase strictly".into(),
        ));
    }
    if alpha.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DispersionError::OrderingViolation(
            "exponents must increase strictly".into(),
        ));
    }
    let n = x.len();
    let m = DMatrix::from_fn(n, n, |i, k| x[k].powf(alpha[i]));
    let det = m.determinant();
    Ok((det, det > 0.0))
}
