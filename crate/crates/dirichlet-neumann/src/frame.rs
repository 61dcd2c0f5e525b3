//! Conformal straightening of the fluid domain.
//!
//! The free surface y = eta(x) is pulled back to the line Y = 0 by a
//! conformal map x = X + p(X, Y), y = Y + q(X, Y) of a straight strip of
//! depth h + c.  Everything is determined by the boundary trace
//! p(X) = p(X, 0) and the strip shift c, which solve the coupled system
//!
//!   c = < eta(X + p(X)) >,
//!   p = H (1/tanh((h+c)|D|)) [eta(X + p(X))],
//!
//! with H the Hilbert transform and <.> the average in X.

use crate::{require_x_only, DnError, Field};
use num_complex::Complex;
use spectral_core::ModeLattice;

const MAX_ITER: usize = 200;

/// Extra x-modes carried internally so that compositions with the
/// surface shift keep their spillover below roundoff.
const BAND_PAD: usize = 48;

pub struct ConformalFrame {
    base: ModeLattice,
    wide: ModeLattice,
    eta_wide: Field,
    p: Field,
    breve: Field,
    c: f64,
    h: f64,
    residual: f64,
    iterations: usize,
    real: bool,
}

impl ConformalFrame {
    /// Strip shift c.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Fluid depth h.
    pub fn depth(&self) -> f64 {
        self.h
    }

    /// Depth of the straightened strip, h + c.
    pub fn strip_depth(&self) -> f64 {
        self.h + self.c
    }

    /// Boundary trace p(X) of the horizontal displacement, on the
    /// internal widened lattice.
    pub fn p(&self) -> &Field {
        &self.p
    }

    /// Inverse shift: X = x + breve(x) inverts x = X + p(X).
    pub(crate) fn breve(&self) -> &Field {
        &self.breve
    }

    pub(crate) fn eta_wide(&self) -> &Field {
        &self.eta_wide
    }

    pub fn base_lattice(&self) -> &ModeLattice {
        &self.base
    }

    pub(crate) fn wide_lattice(&self) -> &ModeLattice {
        &self.wide
    }

    pub(crate) fn is_real(&self) -> bool {
        self.real
    }

    /// Final residual of the coupled system, max of both equations.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// sup |p'(X)|; the map is a diffeomorphism while this stays below 1.
    pub fn shift_sup(&self) -> f64 {
        self.p.dx().grid_sup()
    }
}

/// The straightening multiplier H f((h+c)|D|) with f(t) = 1/tanh(t),
/// mode by mode; constants are annihilated.
fn straightening_target(comp: &Field, strip_depth: f64) -> Field {
    let mut out = comp.clone();
    let real = comp.is_real_flagged();
    comp.lattice().for_each_mode(|idx, _ell, j| {
        if j == 0 {
            out.coeffs_mut()[idx] = Complex::default();
        } else {
            let s = if j > 0 { 1.0 } else { -1.0 };
            let gain = 1.0 / (strip_depth * j.abs() as f64).tanh();
            out.coeffs_mut()[idx] *= Complex::new(0.0, -s * gain);
        }
    });
    out.set_real_flag(real);
    out
}

pub fn solve_conformal(eta: &Field, h: f64, tol: f64) -> Result<ConformalFrame, DnError> {
    require_x_only(eta, "eta")?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(DnError::InvalidInput(format!("depth must be positive, got {h}")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(DnError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let real = eta.reality_defect() <= 1e-12 * (1.0 + eta.l2_norm());
    if !real {
        return Err(DnError::InvalidInput("profile must be a real function".into()));
    }

    let base = eta.lattice().clone();
    let wide = ModeLattice::new(base.nu(), base.l_max(), base.j_max() + BAND_PAD)?;
    let mut eta_wide = eta.embed(&wide);
    eta_wide.set_real_flag(true);

    let mut p = Field::zeros(&wide);
    p.set_real_flag(true);
    let mut c = 0.0f64;
    let mut prev_res = f64::INFINITY;
    let mut relax = false;
    let mut iterations = 0;

    for it in 1..=MAX_ITER {
        iterations = it;
        let comp = eta_wide.compose_x(&p);
        let c_new = comp.mean().re;
        if h + c_new <= 0.25 * h {
            return Err(DnError::DiffeomorphismViolation(h + c_new));
        }
        let target = straightening_target(&comp, h + c_new);
        let res = target.sub(&p).l2_norm().max((c_new - c).abs());

        if relax {
            p = target.scale(0.8).add(&p.scale(0.2));
        } else {
            p = target;
        }
        p.set_real_flag(true);
        c = c_new;

        let slope = p.dx().grid_sup();
        if slope >= 0.5 {
            return Err(DnError::DiffeomorphismViolation(slope));
        }
        if res <= tol {
            break;
        }
        if res > 0.9 * prev_res {
            relax = true;
        }
        prev_res = res;
        if it == MAX_ITER {
            return Err(DnError::NonConvergence { residual: res, iterations: it });
        }
    }

    // residuals of both equations at the returned point
    let comp = eta_wide.compose_x(&p);
    let r_c = (c - comp.mean().re).abs();
    let r_p = straightening_target(&comp, h + c).sub(&p).l2_norm();
    let residual = r_c.max(r_p);
    if residual > tol {
        return Err(DnError::NonConvergence { residual, iterations });
    }

    let breve = p.invert_x_diffeo();
    Ok(ConformalFrame {
        base,
        wide,
        eta_wide,
        p,
        breve,
        c,
        h,
        residual,
        iterations,
        real: true,
    })
}
