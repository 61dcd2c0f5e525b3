//! Applying the Dirichlet-Neumann operator through the straightened strip:
//!
//!   G(eta) psi = d/dx P^{-1} H tanh((h+c)|D|) P psi,
//!
//! where (P u)(X) = u(X + p(X)) composes with the boundary trace of the
//! conformal map and P^{-1} uses the pointwise-inverted diffeomorphism.

use crate::frame::{solve_conformal, ConformalFrame};
use crate::{require_x_only, DnError, Field, DEFAULT_TOL};
use num_complex::Complex;

/// H tanh(strip_depth |D|) mode by mode; kills constants.
fn strip_multiplier(w: &Field, strip_depth: f64) -> Field {
    let mut out = w.clone();
    let real = w.is_real_flagged();
    w.lattice().for_each_mode(|idx, _ell, j| {
        if j == 0 {
            out.coeffs_mut()[idx] = Complex::default();
        } else {
            let s = if j > 0 { 1.0 } else { -1.0 };
            let t = (strip_depth * j.abs() as f64).tanh();
            out.coeffs_mut()[idx] *= Complex::new(0.0, -s * t);
        }
    });
    out.set_real_flag(real);
    out
}

/// Pipeline on the widened lattice, without the final truncation.
pub(crate) fn apply_wide(frame: &ConformalFrame, psi_wide: &Field) -> Field {
    let pulled = psi_wide.compose_x(frame.p());
    let filtered = strip_multiplier(&pulled, frame.strip_depth());
    let pushed = filtered.compose_x(frame.breve());
    pushed.dx()
}

/// G(eta) psi for a previously solved frame.
pub fn dn_apply_with_frame(frame: &ConformalFrame, psi: &Field) -> Result<Field, DnError> {
    require_x_only(psi, "psi")?;
    if psi.lattice() != frame.base_lattice() {
        return Err(DnError::InvalidInput(
            "trace lattice does not match the frame".into(),
        ));
    }
    let wide = psi.embed(frame.wide_lattice());
    let mut out = apply_wide(frame, &wide).embed(frame.base_lattice());
    out.set_real_flag(psi.is_real_flagged() && frame.is_real());
    Ok(out)
}

/// G(eta, h) psi.  Solves the straightening fixed point, then applies the
/// operator; the output has zero average and annihilates constants.
pub fn dn_apply(eta: &Field, h: f64, psi: &Field) -> Result<Field, DnError> {
    let frame = solve_conformal(eta, h, DEFAULT_TOL)?;
    dn_apply_with_frame(&frame, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use spectral_core::{ModeLattice, Parity};

    fn lat(j: usize) -> ModeLattice {
        ModeLattice::new(1, 1, j).unwrap()
    }

    fn pairing(u: &Field, v: &Field) -> f64 {
        u.coeffs()
            .iter()
            .zip(v.coeffs())
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    fn random_profile(rng: &mut ChaCha8Rng, lattice: &ModeLattice, c2: f64) -> Field {
        let mut eta = Field::zeros(lattice);
        let kmax = lattice.j_max().min(6);
        for k in 1..=kmax as i64 {
            let decay = (k as f64).powi(-3);
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            eta = eta
                .add(&Field::trig(lattice, &[0], k, a * decay, Parity::Even))
                .add(&Field::trig(lattice, &[0], k, b * decay, Parity::Odd));
        }
        let norm =
            eta.grid_sup() + eta.dx().grid_sup() + eta.dx().dx().grid_sup();
        eta.scale(c2 / norm)
    }

    fn random_trace(rng: &mut ChaCha8Rng, lattice: &ModeLattice, zero_mean: bool) -> Field {
        let mut psi = Field::zeros(lattice);
        let j0 = if zero_mean { 1 } else { 0 };
        for j in j0..=lattice.j_max() as i64 {
            let decay = 1.0 / (1.0 + j as f64).powi(2);
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            psi = psi
                .add(&Field::trig(lattice, &[0], j, a * decay, Parity::Even))
                .add(&Field::trig(lattice, &[0], j, b * decay, Parity::Odd));
        }
        psi
    }

    #[test]
    fn flat_surface_reproduces_the_multiplier() {
        let lattice = lat(24);
        let mut rng = ChaCha8Rng::seed_from_u64(0x0d1e);
        let psi = random_trace(&mut rng, &lattice, false);
        for &h in &[0.5, 1.0, 2.0] {
            let eta = Field::zeros(&lattice);
            let got = dn_apply(&eta, h, &psi).unwrap();
            let mut want = psi.clone();
            lattice.for_each_mode(|idx, _ell, j| {
                let m = j.abs() as f64 * (h * j.abs() as f64).tanh();
                want.coeffs_mut()[idx] *= Complex::new(m, 0.0);
            });
            let defect = got.sub(&want).l2_norm();
            assert!(defect <= 1e-13 * psi.l2_norm(), "h={h}: defect {defect:.3e}");
        }
    }

    #[test]
    fn kernel_kills_constants_and_output_has_zero_average() {
        let lattice = lat(16);
        let eta = Field::trig(&lattice, &[0], 1, 0.02, Parity::Even)
            .add(&Field::trig(&lattice, &[0], 2, 0.01, Parity::Even));
        let mut one = Field::zeros(&lattice);
        one.set(&[0], 0, Complex::new(1.0, 0.0));
        one.set_real_flag(true);
        let g1 = dn_apply(&eta, 1.0, &one).unwrap();
        assert!(g1.l2_norm() <= 1e-12, "G(eta)1 = {:.3e}", g1.l2_norm());

        let mut rng = ChaCha8Rng::seed_from_u64(0x0d2e);
        let psi = random_trace(&mut rng, &lattice, false);
        let out = dn_apply(&eta, 1.0, &psi).unwrap();
        assert_eq!(out.mean(), Complex::default());
    }

    #[test]
    fn symmetric_and_positive_on_random_probes() {
        let lattice = lat(16);
        let mut rng = ChaCha8Rng::seed_from_u64(0x0d3e);
        for _ in 0..3 {
            let eta = random_profile(&mut rng, &lattice, 0.05);
            let frame = solve_conformal(&eta, 1.0, DEFAULT_TOL).unwrap();
            for _ in 0..3 {
                let u = random_trace(&mut rng, &lattice, false);
                let v = random_trace(&mut rng, &lattice, false);
                let gu = dn_apply_with_frame(&frame, &u).unwrap();
                let gv = dn_apply_with_frame(&frame, &v).unwrap();
                let defect = (pairing(&gu, &v) - pairing(&u, &gv)).abs();
                let scale = u.l2_norm() * v.l2_norm();
                assert!(defect <= 1e-11 * scale, "symmetry defect {defect:.3e}");
            }
            for _ in 0..3 {
                let w = random_trace(&mut rng, &lattice, true);
                let gw = dn_apply_with_frame(&frame, &w).unwrap();
                let quad = pairing(&gw, &w);
                assert!(quad >= -1e-12 * w.l2_norm().powi(2), "quadratic form {quad:.3e}");
            }
        }
    }

    #[test]
    fn even_profiles_preserve_evenness() {
        let lattice = lat(16);
        let eta = Field::trig(&lattice, &[0], 1, 0.03, Parity::Even)
            .add(&Field::trig(&lattice, &[0], 3, 0.01, Parity::Even));
        let psi = Field::trig(&lattice, &[0], 2, 1.0, Parity::Even)
            .add(&Field::trig(&lattice, &[0], 5, 0.4, Parity::Even));
        let out = dn_apply(&eta, 1.5, &psi).unwrap();
        let defect = out.parity_defect(Parity::Even, Parity::Even);
        assert!(defect <= 1e-11, "evenness defect {defect:.3e}");
    }
}
