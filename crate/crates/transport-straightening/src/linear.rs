use crate::{require_parity, Field, TransportError};
use spectral_core::{DiophantineFrequency, DivisorMode, Parity};

/// Floor under which a frequency combination counts as a resonance.
const DIVISOR_FLOOR: f64 = 1e-12;

/// q(phi, x) = V_x(phi, x + u(phi, x)), the coefficient of the linearized
/// transport equation at the point u.
pub fn advected_gradient(v_field: &Field, u: &Field) -> Field {
    v_field.dx().compose_x(u)
}

/// Scans the active modes of `u` for dangerously small divisors w.l and
/// reports the worst one.
fn check_divisors(u: &Field, w: &DiophantineFrequency<f64>) -> Result<(), TransportError> {
    let mut worst = f64::INFINITY;
    let mut worst_ell: Vec<i64> = Vec::new();
    let coeffs = u.coeffs();
    u.lattice().for_each_mode(|idx, ell, _j| {
        if ell.iter().all(|&l| l == 0) || coeffs[idx].norm_sqr() == 0.0 {
            return;
        }
        let d = w.dot(ell).abs();
        if d < worst {
            worst = d;
            worst_ell = ell.to_vec();
        }
    });
    if worst < DIVISOR_FLOOR {
        return Err(TransportError::SmallDivisor {
            ell: worst_ell,
            divisor: worst,
        });
    }
    Ok(())
}

/// Solves the linearized characteristic equation
///
/// ```text
/// w . dphi h - q h = f,      q = V_x(phi, x + u),
/// ```
///
/// for the unique solution with zero phi-average. Writing h = (w0 + g) e^v
/// with v = (w.dphi)^{-1} q decouples the equation: w0 inverts w.dphi on
/// e^{-v} f and the x-dependent constant g restores the zero average.
///
/// Requires f odd in phi and odd in x, u even in phi and odd in x, and a
/// coefficient V whose advected gradient q is odd in phi and even in x
/// (odd/odd V and x-independent V both qualify). The solution is then even
/// in phi and odd in x.
pub fn linearized_transport_solve(
    u: &Field,
    v_field: &Field,
    f: &Field,
    w: &DiophantineFrequency<f64>,
) -> Result<Field, TransportError> {
    f.same_lattice(u)?;
    f.same_lattice(v_field)?;
    if w.nu() != f.lattice().nu() {
        return Err(TransportError::InvalidInput(
            "frequency dimension does not match the lattice".into(),
        ));
    }
    require_parity(f, Parity::Odd, Parity::Odd, "forcing")?;
    require_parity(u, Parity::Even, Parity::Odd, "expansion point")?;

    let q = advected_gradient(v_field, u);
    require_parity(&q, Parity::Odd, Parity::Even, "advected gradient of V")?;
    check_divisors(&q, w)?;
    check_divisors(f, w)?;

    let v = w.invert(&q, DivisorMode::Strict)?;
    let ev = v.map_grid_real(f64::exp);
    let emv = v.map_grid_real(|t| (-t).exp());

    let w0 = w.invert(&emv.mul(f), DivisorMode::Strict)?;

    // g = -<w0 e^v>_phi / <e^v>_phi, a function of x alone
    let num = w0.mul(&ev).phi_average();
    let den = ev.phi_average();
    let den_grid = den.grid_values();
    let floor = den_grid.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    if !(floor > 1e-8) {
        return Err(TransportError::InvalidInput(
            "averaged exponential weight degenerates".into(),
        ));
    }
    let vals: Vec<_> = num
        .grid_values()
        .iter()
        .zip(&den_grid)
        .map(|(a, b)| -a / b)
        .collect();
    let mut g = Field::from_grid(f.lattice(), vals);
    g.set_real_flag(num.is_real_flagged() && den.is_real_flagged());

    let h = w0.add(&g).mul(&ev);
    let defect = h.parity_defect(Parity::Even, Parity::Odd);
    if defect > 1e-9 * (1.0 + h.l2_norm()) {
        return Err(TransportError::ParityViolation {
            what: "solution".into(),
            defect,
        });
    }
    Ok(h
        .parity_project(Some(Parity::Even), Some(Parity::Odd))
        .remove_phi_average())
}
