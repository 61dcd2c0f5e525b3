use crate::{
    solve_characteristic, CharacteristicRun, Field, Method, NMHConfig, TransportError,
};
use psdo_calculus::{BlockOperator, CMat, C64};
use spectral_core::{DiophantineFrequency, ModeLattice, Parity, MAX_NU};

/// A transport operator together with the diffeomorphism that flattens it.
#[derive(Debug, Clone)]
pub struct Straightening {
    /// Forward shift: y = x + beta(phi, x).
    pub beta: Field,
    /// Inverse shift: x = y + beta_inv(phi, y).
    pub beta_inv: Field,
    /// Transported coefficient left over after the change of variables,
    /// in the base Sobolev norm.
    pub residual: f64,
    /// Pointwise defect of the two shifts composed against each other.
    pub inverse_consistency: f64,
    pub run: CharacteristicRun,
}

/// Finds the change of variables y = x + beta(phi, x) that straightens the
/// operator w.dphi + V dx to w.dphi, by solving the characteristic
/// equation for the inverse shift and inverting it pointwise per phi.
pub fn straighten(
    v_field: &Field,
    w: &DiophantineFrequency<f64>,
) -> Result<Straightening, TransportError> {
    let cfg = NMHConfig::for_transport(1, w.tau());
    let run = solve_characteristic(v_field, w, Method::Newton, &cfg)?;
    let beta_inv = run.breve.clone();

    let inv_slope = beta_inv.dx().grid_sup();
    if inv_slope >= 0.5 {
        return Err(TransportError::Diffeomorphism(inv_slope));
    }
    let beta = beta_inv.invert_x_diffeo();
    let slope = beta.dx().grid_sup();
    if slope >= 0.5 {
        return Err(TransportError::Diffeomorphism(slope));
    }

    let lattice = v_field.lattice();
    let one = Field::trig(lattice, &vec![0; lattice.nu()], 0, 1.0, Parity::Even);
    let transported = beta
        .omega_dphi(w.omega())
        .add(&v_field.mul(&one.add(&beta.dx())))
        .compose_x(&beta_inv);
    let residual = transported.sobolev_norm(lattice.s0());

    let inverse_consistency = beta_inv.add(&beta.compose_x(&beta_inv)).grid_sup();

    Ok(Straightening {
        beta,
        beta_inv,
        residual,
        inverse_consistency,
        run,
    })
}

/// Dense matrix of the substitution u(phi, x) -> u(phi, x + shift(phi, x))
/// on the shift's own lattice.
pub fn composition_operator(shift: &Field) -> BlockOperator {
    let lattice = shift.lattice();
    let dim = lattice.num_modes();
    let mut mat = CMat::zeros(dim, dim);
    let mut ell = [0i64; MAX_NU];
    for col in 0..dim {
        let j = lattice.mode_at(col, &mut ell);
        let image =
            Field::mode(lattice, &ell[..lattice.nu()], j, C64::new(1.0, 0.0)).compose_x(shift);
        for (row, c) in image.coeffs().iter().enumerate() {
            mat[(row, col)] = *c;
        }
    }
    BlockOperator::from_matrix(lattice, mat)
}

/// The straightened operator B^{-1} (w.dphi + V dx) B on the lattice of V,
/// assembled column by column through a lattice padded by `pad` modes in
/// every direction so that composition spillover does not pollute the box.
pub fn conjugated_transport(
    v_field: &Field,
    w: &DiophantineFrequency<f64>,
    s: &Straightening,
    pad: usize,
) -> Result<BlockOperator, TransportError> {
    let base = v_field.lattice();
    let wide = ModeLattice::new(base.nu(), base.l_max() + pad, base.j_max() + pad)?;
    let beta_w = s.beta.embed(&wide);
    let breve_w = s.beta_inv.embed(&wide);
    let v_w = v_field.embed(&wide);

    let dim = base.num_modes();
    let mut mat = CMat::zeros(dim, dim);
    let mut ell = [0i64; MAX_NU];
    for col in 0..dim {
        let j = base.mode_at(col, &mut ell);
        let e = Field::mode(&wide, &ell[..base.nu()], j, C64::new(1.0, 0.0));
        let bu = e.compose_x(&beta_w);
        let lu = bu.omega_dphi(w.omega()).add(&v_w.mul(&bu.dx()));
        let au = lu.compose_x(&breve_w);
        let mut r_ell = [0i64; MAX_NU];
        for row in 0..dim {
            let rj = base.mode_at(row, &mut r_ell);
            mat[(row, col)] = au.get(&r_ell[..base.nu()], rj);
        }
    }
    Ok(BlockOperator::from_matrix(base, mat))
}

/// Integrates dx/dt = V(w t, x) with a fourth-order Runge-Kutta stepper and
/// returns the largest distance from the straightened prediction
/// x(t) = c0 + beta_inv(w t, c0).
pub fn characteristic_deviation(
    v_field: &Field,
    w: &DiophantineFrequency<f64>,
    beta_inv: &Field,
    c0: f64,
    t_end: f64,
    dt: f64,
) -> f64 {
    let omega = w.omega();
    let phase = |t: f64| -> Vec<f64> { omega.iter().map(|wk| wk * t).collect() };
    let velocity = |t: f64, x: f64| -> f64 { v_field.eval_at(&phase(t), x).re };

    let mut x = c0 + beta_inv.eval_at(&phase(0.0), c0).re;
    let mut t = 0.0;
    let mut worst = 0.0f64;
    let steps = (t_end / dt).ceil() as usize;
    for _ in 0..steps {
        let k1 = velocity(t, x);
        let k2 = velocity(t + 0.5 * dt, x + 0.5 * dt * k1);
        let k3 = velocity(t + 0.5 * dt, x + 0.5 * dt * k2);
        let k4 = velocity(t + dt, x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
        let predicted = c0 + beta_inv.eval_at(&phase(t), c0).re;
        worst = worst.max((x - predicted).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine_coefficient(lattice: &ModeLattice, eps: f64) -> Field {
        Field::trig(lattice, &[1], 0, eps, Parity::Odd)
            .mul(&Field::trig(lattice, &[0], 1, 1.0, Parity::Odd))
    }

    #[test]
    fn zero_coefficient_is_already_straight() {
        let lattice = ModeLattice::new(1, 8, 8).unwrap();
        let w = DiophantineFrequency::default_for(1, 8).unwrap();
        let s = straighten(&Field::zeros(&lattice), &w).unwrap();
        assert_eq!(s.beta.l2_norm(), 0.0);
        assert_eq!(s.beta_inv.l2_norm(), 0.0);
        assert_eq!(s.residual, 0.0);
        assert_eq!(s.inverse_consistency, 0.0);
    }

    #[test]
    fn conjugation_reduces_to_the_frequency_alone() {
        let lattice = ModeLattice::new(1, 8, 8).unwrap();
        let w = DiophantineFrequency::default_for(1, 8).unwrap();
        let v_field = sine_coefficient(&lattice, 1e-3);
        let s = straighten(&v_field, &w).unwrap();
        assert!(s.residual <= 1e-9, "coefficient residual {:.3e}", s.residual);
        assert!(
            s.inverse_consistency <= 1e-12,
            "shift consistency {:.3e}",
            s.inverse_consistency
        );

        let conj = conjugated_transport(&v_field, &w, &s, 8).unwrap();
        let flat = BlockOperator::omega_dphi(&lattice, w.omega());
        let defect = conj.sub(&flat).op_norm();
        assert!(defect <= 1e-9, "conjugation defect {defect:.3e}");

        // the flattened operator keeps the original frequency on its diagonal
        let mut ell = [0i64; MAX_NU];
        let mut diag_defect = 0.0f64;
        for m in 0..lattice.num_modes() {
            let _j = lattice.mode_at(m, &mut ell);
            let expected = C64::new(0.0, w.dot(&ell[..1]));
            diag_defect = diag_defect.max((conj.matrix()[(m, m)] - expected).norm());
        }
        assert!(diag_defect <= 1e-9, "diagonal defect {diag_defect:.3e}");
    }

    #[test]
    fn substitution_matrix_matches_pointwise_composition() {
        let lattice = ModeLattice::new(1, 6, 6).unwrap();
        let w = DiophantineFrequency::default_for(1, 6).unwrap();
        let v_field = sine_coefficient(&lattice, 1e-3);
        let s = straighten(&v_field, &w).unwrap();
        let b = composition_operator(&s.beta);
        let probe = Field::trig(&lattice, &[2], 1, 0.7, Parity::Even);
        let via_matrix = b.apply(&probe);
        let direct = probe.compose_x(&s.beta);
        assert!(via_matrix.sub(&direct).l2_norm() <= 1e-12);
    }

    #[test]
    fn flow_follows_the_straightened_characteristics() {
        let lattice = ModeLattice::new(1, 16, 16).unwrap();
        let w = DiophantineFrequency::default_for(1, 16).unwrap();
        let v_field = sine_coefficient(&lattice, 1e-2);
        let s = straighten(&v_field, &w).unwrap();
        let deviation = characteristic_deviation(&v_field, &w, &s.beta_inv, 0.7, 100.0, 5e-3);
        assert!(deviation <= 1e-6, "flow deviation {deviation:.3e}");
    }
}
