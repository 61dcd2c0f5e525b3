//! First variation of the operator in the profile:
//!
//!   G'(eta)[eta_hat] psi = -G(eta)(B eta_hat) - d/dx (V eta_hat),
//!
//! with the surface velocities
//!
//!   B = (eta_x psi_x + G(eta) psi) / (1 + eta_x^2),   V = psi_x - B eta_x,
//!
//! i.e. the fluid velocity field evaluated on the free surface.

use crate::apply::apply_wide;
use crate::frame::{solve_conformal, ConformalFrame};
use crate::{require_x_only, DnError, Field, DEFAULT_TOL};
use num_complex::Complex;

fn grid_combine(
    fields: &[&Field],
    real: bool,
    f: impl Fn(&[Complex<f64>]) -> Complex<f64>,
) -> Field {
    let lattice = fields[0].lattice().clone();
    let grids: Vec<Vec<Complex<f64>>> = fields.iter().map(|g| g.grid_values()).collect();
    let n = grids[0].len();
    let mut vals = vec![Complex::default(); n];
    let mut slot = vec![Complex::default(); fields.len()];
    for i in 0..n {
        for (s, g) in slot.iter_mut().zip(&grids) {
            *s = g[i];
        }
        vals[i] = f(&slot);
    }
    let mut out = Field::from_grid(&lattice, vals);
    out.set_real_flag(real);
    out
}

/// B and V on the widened internal lattice.
fn velocities_wide(frame: &ConformalFrame, psi_wide: &Field) -> (Field, Field) {
    let eta_x = frame.eta_wide().dx();
    let psi_x = psi_wide.dx();
    let g_psi = apply_wide(frame, psi_wide);
    let real = frame.is_real() && psi_wide.is_real_flagged();
    let b = grid_combine(&[&eta_x, &psi_x, &g_psi], real, |v| {
        (v[0] * v[1] + v[2]) / (Complex::new(1.0, 0.0) + v[0] * v[0])
    });
    let v = grid_combine(&[&psi_x, &b, &eta_x], real, |v| v[0] - v[1] * v[2]);
    (b, v)
}

/// Surface velocities (B, V) for the given profile and trace, truncated
/// back to the input lattice.
pub fn surface_velocity(eta: &Field, h: f64, psi: &Field) -> Result<(Field, Field), DnError> {
    let frame = solve_conformal(eta, h, DEFAULT_TOL)?;
    require_x_only(psi, "psi")?;
    let psi_wide = psi.embed(frame.wide_lattice());
    let (b, v) = velocities_wide(&frame, &psi_wide);
    Ok((b.embed(frame.base_lattice()), v.embed(frame.base_lattice())))
}

/// Derivative of eta -> G(eta) psi in the direction eta_hat.
pub fn shape_derivative(
    eta: &Field,
    h: f64,
    psi: &Field,
    eta_hat: &Field,
) -> Result<Field, DnError> {
    let frame = solve_conformal(eta, h, DEFAULT_TOL)?;
    require_x_only(psi, "psi")?;
    require_x_only(eta_hat, "eta_hat")?;
    let wide = frame.wide_lattice();
    let psi_wide = psi.embed(wide);
    let hat_wide = eta_hat.embed(wide);
    let (b, v) = velocities_wide(&frame, &psi_wide);

    let b_hat = b.mul(&hat_wide);
    let v_hat = v.mul(&hat_wide);
    let out = apply_wide(&frame, &b_hat).add(&v_hat.dx()).scale(-1.0);
    let mut out = out.embed(frame.base_lattice());
    out.set_real_flag(
        frame.is_real() && psi.is_real_flagged() && eta_hat.is_real_flagged(),
    );
    Ok(out)
}
