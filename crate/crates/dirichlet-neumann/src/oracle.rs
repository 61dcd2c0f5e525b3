//! Independent check of the operator: solve the harmonic boundary-value
//! problem directly with second-order finite differences and read off the
//! Neumann trace.
//!
//! The fluid domain -h < y < eta(x) is stretched onto the rectangle
//! sigma in [-1, 0] by y = -h + (sigma + 1)(h + eta(x)).  The transformed
//! equation
//!
//!   phi_xx + 2 sigma_x phi_{x sigma} + (sigma_x^2 + 1/D^2) phi_{sigma sigma}
//!     + sigma_xx phi_sigma = 0,      D = h + eta,
//!
//! is discretized on an n-by-n grid with a mirrored ghost level for the
//! bottom condition, solved by block elimination level by level, and the
//! trace (1 + eta_x^2) phi_sigma / D - eta_x psi_x is resampled to
//! Fourier coefficients.

use crate::{require_x_only, DnError, Field};
use nalgebra::DMatrix;
use num_complex::Complex;
use std::f64::consts::TAU;

pub fn dn_oracle(eta: &Field, h: f64, psi: &Field, grid: usize) -> Result<Field, DnError> {
    require_x_only(eta, "eta")?;
    require_x_only(psi, "psi")?;
    if grid < 64 {
        return Err(DnError::InvalidInput(format!(
            "grid resolution must be at least 64, got {grid}"
        )));
    }
    if psi.lattice().x_modes() + 1 >= grid {
        return Err(DnError::InvalidInput(
            "grid too coarse for the trace truncation".into(),
        ));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(DnError::InvalidInput(format!("depth must be positive, got {h}")));
    }

    let n = grid;
    let dx = TAU / n as f64;
    let ds = 1.0 / n as f64;
    let phis = vec![0.0f64; eta.lattice().nu()];

    let eta_x_f = eta.dx();
    let eta_xx_f = eta_x_f.dx();
    let psi_x_f = psi.dx();
    let mut depth = vec![0.0f64; n];
    let mut dp = vec![0.0f64; n];
    let mut dpp = vec![0.0f64; n];
    let mut surf = vec![0.0f64; n];
    let mut surf_x = vec![0.0f64; n];
    for m in 0..n {
        let x = m as f64 * dx;
        depth[m] = h + eta.eval_at(&phis, x).re;
        if depth[m] <= 0.0 {
            return Err(DnError::InvalidInput(
                "profile touches the bottom".into(),
            ));
        }
        dp[m] = eta_x_f.eval_at(&phis, x).re;
        dpp[m] = eta_xx_f.eval_at(&phis, x).re;
        surf[m] = psi.eval_at(&phis, x).re;
        surf_x[m] = psi_x_f.eval_at(&phis, x).re;
    }

    // level-k blocks: lower (couples k-1), diagonal, upper (couples k+1)
    let blocks = |k: usize| -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let sigma = -1.0 + k as f64 * ds;
        let mut lo = DMatrix::zeros(n, n);
        let mut di = DMatrix::zeros(n, n);
        let mut up = DMatrix::zeros(n, n);
        for m in 0..n {
            let d = depth[m];
            let a = -(sigma + 1.0) * dp[m] / d;
            let css = a * a + 1.0 / (d * d);
            let cs = (sigma + 1.0) * (2.0 * dp[m] * dp[m] / (d * d) - dpp[m] / d);
            let cxs = 2.0 * a;
            let mp = (m + 1) % n;
            let mm = (m + n - 1) % n;

            di[(m, m)] = -2.0 / (dx * dx) - 2.0 * css / (ds * ds);
            di[(m, mp)] += 1.0 / (dx * dx);
            di[(m, mm)] += 1.0 / (dx * dx);

            if k == 0 {
                // mirrored ghost level: phi(-1) = phi(1)
                up[(m, m)] += 2.0 * css / (ds * ds);
            } else {
                up[(m, m)] += css / (ds * ds) + cs / (2.0 * ds);
                up[(m, mp)] += cxs / (4.0 * dx * ds);
                up[(m, mm)] -= cxs / (4.0 * dx * ds);
                lo[(m, m)] += css / (ds * ds) - cs / (2.0 * ds);
                lo[(m, mp)] -= cxs / (4.0 * dx * ds);
                lo[(m, mm)] += cxs / (4.0 * dx * ds);
            }
        }
        (lo, di, up)
    };

    // forward block elimination over levels 0..n-1 (level n is Dirichlet)
    let mut carries: Vec<DMatrix<f64>> = Vec::with_capacity(n);
    let mut reduced: Vec<DMatrix<f64>> = Vec::with_capacity(n);
    let surface = DMatrix::from_column_slice(n, 1, &surf);
    for k in 0..n {
        let (lo, di, up) = blocks(k);
        let rhs = if k + 1 == n {
            -(&up * &surface)
        } else {
            DMatrix::zeros(n, 1)
        };
        let (m_eff, r_eff) = if k == 0 {
            (di, rhs)
        } else {
            let m_eff = di - &lo * &carries[k - 1];
            let r_eff = rhs - &lo * &reduced[k - 1];
            (m_eff, r_eff)
        };
        let lu = m_eff.lu();
        let carry = if k + 1 == n {
            DMatrix::zeros(n, n)
        } else {
            lu.solve(&up)
                .ok_or_else(|| DnError::SolveFailure(format!("singular block at level {k}")))?
        };
        let red = lu
            .solve(&r_eff)
            .ok_or_else(|| DnError::SolveFailure(format!("singular block at level {k}")))?;
        carries.push(carry);
        reduced.push(red);
    }

    // back substitution down to the two levels below the surface
    let mut level_above = surface.clone();
    let mut rows: Vec<DMatrix<f64>> = vec![DMatrix::zeros(n, 1); n];
    for k in (0..n).rev() {
        let val = &reduced[k] - &carries[k] * &level_above;
        level_above = val.clone();
        rows[k] = val;
    }

    let mut trace = vec![0.0f64; n];
    for m in 0..n {
        let one_sided =
            (3.0 * surf[m] - 4.0 * rows[n - 1][(m, 0)] + rows[n - 2][(m, 0)]) / (2.0 * ds);
        trace[m] = (1.0 + dp[m] * dp[m]) * one_sided / depth[m] - dp[m] * surf_x[m];
    }

    let mut out = Field::zeros(psi.lattice());
    let zeros = vec![0i64; psi.lattice().nu()];
    let jm = psi.lattice().j_max() as i64;
    for j in -jm..=jm {
        let mut acc = Complex::default();
        for (m, &t) in trace.iter().enumerate() {
            acc += Complex::from_polar(t, -(j as f64) * (m as f64) * dx);
        }
        out.set(&zeros, j, acc / n as f64);
    }
    out.set_real_flag(true);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dn_apply;
    use spectral_core::{ModeLattice, Parity};

    fn lat(j: usize) -> ModeLattice {
        ModeLattice::new(1, 1, j).unwrap()
    }

    #[test]
    fn constants_have_zero_trace() {
        let lattice = lat(8);
        let eta = Field::trig(&lattice, &[0], 1, 0.01, Parity::Even);
        let mut one = Field::zeros(&lattice);
        one.set(&[0], 0, Complex::new(1.0, 0.0));
        one.set_real_flag(true);
        let out = dn_oracle(&eta, 1.0, &one, 64).unwrap();
        assert!(out.l2_norm() <= 1e-9, "trace of constants {:.3e}", out.l2_norm());
    }

    #[test]
    fn flat_case_converges_at_second_order() {
        let lattice = lat(8);
        let eta = Field::zeros(&lattice);
        let psi = Field::trig(&lattice, &[0], 1, 1.0, Parity::Even)
            .add(&Field::trig(&lattice, &[0], 3, 0.3, Parity::Even));
        let h = 0.7;
        let mut want = psi.clone();
        lattice.for_each_mode(|idx, _ell, j| {
            let m = j.abs() as f64 * (h * j.abs() as f64).tanh();
            want.coeffs_mut()[idx] *= Complex::new(m, 0.0);
        });
        let e64 = dn_oracle(&eta, h, &psi, 64).unwrap().sub(&want).l2_norm();
        let e128 = dn_oracle(&eta, h, &psi, 128).unwrap().sub(&want).l2_norm();
        let order = (e64 / e128).log2();
        assert!(
            (order - 2.0).abs() <= 0.3,
            "observed order {order:.3} (errors {e64:.3e}, {e128:.3e})"
        );
    }

    #[test]
    fn curved_case_agrees_with_the_conformal_route() {
        let lattice = lat(8);
        let eta = Field::trig(&lattice, &[0], 1, 0.02, Parity::Even);
        let psi = Field::trig(&lattice, &[0], 1, 1.0, Parity::Even)
            .add(&Field::trig(&lattice, &[0], 2, 0.4, Parity::Odd));
        let reference = dn_apply(&eta, 1.0, &psi).unwrap();
        let e64 = dn_oracle(&eta, 1.0, &psi, 64).unwrap().sub(&reference).l2_norm();
        let e128 = dn_oracle(&eta, 1.0, &psi, 128).unwrap().sub(&reference).l2_norm();
        let order = (e64 / e128).log2();
        assert!(
            (order - 2.0).abs() <= 0.35,
            "observed order {order:.3} (errors {e64:.3e}, {e128:.3e})"
        );
        assert!(e128 < 1e-3);
    }
}
