//! The shared smooth cutoffs and the regularized reciprocal built on them.
//!
//! Every module divides by small quantities through these exact functions,
//! so cut-off placement is bit-identical across the whole workspace.

use crate::Scalar;

/// psi(t) = exp(-1/t) for t > 0, else 0; the standard smooth step kernel.
pub fn psi_bump<T: Scalar>(t: T) -> T {
    if t > T::zero() {
        (-t.recip()).exp()
    } else {
        T::zero()
    }
}

/// Even cutoff: 0 for |xi| <= 1/3, 1 for |xi| >= 2/3, smooth monotone
/// blend psi(3|xi|-1) / (psi(3|xi|-1) + psi(2-3|xi|)) in between.
pub fn chi<T: Scalar>(xi: T) -> T {
    let a = xi.abs();
    let three = T::fr(3.0);
    let lo = T::one() / three;
    let hi = T::fr(2.0) / three;
    if a <= lo {
        T::zero()
    } else if a >= hi {
        T::one()
    } else {
        let up = psi_bump(three * a - T::one());
        let down = psi_bump(T::fr(2.0) - three * a);
        up / (up + down)
    }
}

/// Second even cutoff used by the descent stages: 0 for |xi| <= 4/5,
/// 1 for |xi| >= 7/8, same smooth blend on the transition band.
pub fn chi0<T: Scalar>(xi: T) -> T {
    let a = xi.abs();
    let lo = T::fr(0.8);
    let hi = T::fr(0.875);
    if a <= lo {
        T::zero()
    } else if a >= hi {
        T::one()
    } else {
        let u = (a - lo) / (hi - lo);
        let up = psi_bump(u);
        let down = psi_bump(T::one() - u);
        up / (up + down)
    }
}

/// h_rho(y) = chi(y/rho) / y with h_rho(0) = 0: equals 1/y for
/// |y| >= 2 rho / 3, vanishes for |y| <= rho / 3, and |h_rho| <= 3/rho.
pub fn regularized_reciprocal<T: Scalar>(y: T, rho: T) -> T {
    debug_assert!(rho > T::zero());
    let c = chi(y / rho);
    if c == T::zero() {
        T::zero()
    } else {
        c / y
    }
}

pub fn regularized_reciprocal_slice<T: Scalar>(values: &[T], rho: T) -> Vec<T> {
    values
        .iter()
        .map(|&y| regularized_reciprocal(y, rho))
        .collect()
}
