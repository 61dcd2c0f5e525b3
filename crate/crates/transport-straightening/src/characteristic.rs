use crate::linear::{advected_gradient, linearized_transport_solve};
use crate::nmh::{nmh_solve, NmhProblem};
use crate::{require_parity, Field, NMHConfig, TransportError};
use serde::{Deserialize, Serialize};
use spectral_core::{DiophantineFrequency, Parity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Newton,
    Nmh,
}

/// Outcome of a characteristic-equation solve.
#[derive(Debug, Clone)]
pub struct CharacteristicRun {
    /// The inverse shift: x = y + breve(phi, y) inverts y = x + beta(phi, x).
    pub breve: Field,
    /// Residual of F(u) = w.dphi u - V(phi, x+u) after each step, in the
    /// base Sobolev norm.
    pub residual_history: Vec<f64>,
    pub warnings: Vec<String>,
}

fn admissible(u: &Field) -> Field {
    u.parity_project(Some(Parity::Even), Some(Parity::Odd))
        .remove_phi_average()
}

fn transport_residual(u: &Field, v_field: &Field, w: &DiophantineFrequency<f64>) -> Field {
    u.omega_dphi(w.omega()).sub(&v_field.compose_x(u))
}

struct CharacteristicProblem<'a> {
    v_field: &'a Field,
    w: &'a DiophantineFrequency<f64>,
}

impl NmhProblem for CharacteristicProblem<'_> {
    fn phi(&self, u: &Field) -> Field {
        u.omega_dphi(self.w.omega()).sub(&self.v_field.compose_x(u))
    }

    fn dphi(&self, at: &Field, h: &Field) -> Field {
        let q = advected_gradient(self.v_field, at);
        h.omega_dphi(self.w.omega()).sub(&q.mul(h))
    }

    fn d2phi(&self, at: &Field, h: &Field, k: &Field) -> Field {
        let qx = self.v_field.dx().dx().compose_x(at);
        qx.mul(h).mul(k).scale(-1.0)
    }

    fn right_inverse(&self, at: &Field, g: &Field) -> Result<Field, TransportError> {
        linearized_transport_solve(at, self.v_field, g, self.w)
    }

    fn project(&self, u: Field) -> Field {
        admissible(&u)
    }
}

/// Solves the characteristic equation w.dphi u = V(phi, x + u) for the
/// inverse shift of the straightening diffeomorphism.
///
/// Newton iterates with the exact linearized inverse and converges
/// quadratically; the dyadic-smoothing engine reaches the same solution
/// through smoothed intermediate problems. Every iterate is kept even in
/// phi, odd in x, with zero phi-average at the coefficient level.
pub fn solve_characteristic(
    v_field: &Field,
    w: &DiophantineFrequency<f64>,
    method: Method,
    cfg: &NMHConfig,
) -> Result<CharacteristicRun, TransportError> {
    cfg.validate()?;
    require_parity(v_field, Parity::Odd, Parity::Odd, "transport coefficient")?;
    let lattice = v_field.lattice();
    if w.nu() != lattice.nu() {
        return Err(TransportError::InvalidInput(
            "frequency dimension does not match the lattice".into(),
        ));
    }
    let s0 = lattice.s0();
    let mut warnings = Vec::new();
    let data_size = v_field.sobolev_norm(cfg.data_exponent(s0)) / w.gamma();
    if data_size > cfg.delta {
        warnings.push(format!(
            "coefficient size {data_size:.3e} exceeds the smallness threshold {:.1e}",
            cfg.delta
        ));
    }

    match method {
        Method::Nmh => {
            let problem = CharacteristicProblem { v_field, w };
            let sol = nmh_solve(&problem, v_field, cfg)?;
            let mut warnings = warnings;
            warnings.extend(sol.warnings.iter().cloned());
            Ok(CharacteristicRun {
                breve: sol.u,
                residual_history: sol.stages.iter().map(|s| s.residual).collect(),
                warnings,
            })
        }
        Method::Newton => {
            let mut u = admissible(&Field::zeros(lattice));
            let mut history = Vec::new();
            let mut growth = 0usize;
            for _step in 0..cfg.max_stages {
                let r = transport_residual(&u, v_field, w);
                let res = r.sobolev_norm(s0);
                if let Some(&prev) = history.last() {
                    growth = if res > prev { growth + 1 } else { 0 };
                }
                history.push(res);
                if res <= cfg.tol {
                    return Ok(CharacteristicRun {
                        breve: u,
                        residual_history: history,
                        warnings,
                    });
                }
                if growth >= 3 {
                    return Err(TransportError::Divergence {
                        stage: history.len() - 1,
                        residual: res,
                    });
                }
                let h = linearized_transport_solve(&u, v_field, &r.scale(-1.0), w)?;
                u = admissible(&u.add(&h));
            }
            Err(TransportError::NonConvergence {
                stages: history.len(),
                residual: *history.last().unwrap_or(&f64::NAN),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::ModeLattice;

    fn sine_coefficient(lattice: &ModeLattice, eps: f64) -> Field {
        Field::trig(lattice, &[1], 0, eps, Parity::Odd)
            .mul(&Field::trig(lattice, &[0], 1, 1.0, Parity::Odd))
    }

    #[test]
    fn zero_coefficient_gives_the_zero_shift() {
        let lattice = ModeLattice::new(1, 8, 8).unwrap();
        let w = DiophantineFrequency::default_for(1, 8).unwrap();
        let cfg = NMHConfig::for_transport(1, w.tau());
        let run =
            solve_characteristic(&Field::zeros(&lattice), &w, Method::Newton, &cfg).unwrap();
        assert_eq!(run.breve.l2_norm(), 0.0);
        assert_eq!(run.residual_history, vec![0.0]);
        assert!(run.warnings.is_empty());
    }

    #[test]
    fn sine_coefficient_converges_within_five_steps() {
        let lattice = ModeLattice::new(1, 16, 16).unwrap();
        let w = DiophantineFrequency::default_for(1, 16).unwrap();
        let cfg = NMHConfig::for_transport(1, w.tau());
        let v_field = sine_coefficient(&lattice, 1e-3);
        let run = solve_characteristic(&v_field, &w, Method::Newton, &cfg).unwrap();
        let last = *run.residual_history.last().unwrap();
        assert!(last <= 1e-12, "final residual {last:.3e}");
        assert!(
            run.residual_history.len() <= 5,
            "took {} steps",
            run.residual_history.len()
        );
        assert_eq!(run.breve.phi_average_mass(), 0.0);
        assert_eq!(run.breve.parity_defect(Parity::Even, Parity::Odd), 0.0);
    }

    #[test]
    fn shift_size_is_linear_in_the_coefficient() {
        let lattice = ModeLattice::new(1, 16, 16).unwrap();
        let w = DiophantineFrequency::default_for(1, 16).unwrap();
        let cfg = NMHConfig::for_transport(1, w.tau());
        let s0 = lattice.s0();
        let mut ratios = Vec::new();
        for eps in [1e-4, 1e-3, 1e-2] {
            let v_field = sine_coefficient(&lattice, eps);
            let run = solve_characteristic(&v_field, &w, Method::Newton, &cfg).unwrap();
            ratios.push(run.breve.sobolev_norm(s0) / v_field.sobolev_norm(s0));
        }
        for pair in ratios.windows(2) {
            assert!((pair[1] / pair[0] - 1.0).abs() < 0.02, "ratios {ratios:?}");
        }
        let inv_gamma = 1.0 / w.gamma();
        assert!(ratios[0] < 2.0 * inv_gamma && ratios[0] > 0.05 * inv_gamma);
    }

    #[test]
    fn oversized_coefficients_warn_or_diverge() {
        let lattice = ModeLattice::new(1, 8, 8).unwrap();
        let w = DiophantineFrequency::default_for(1, 8).unwrap();
        let cfg = NMHConfig::for_transport(1, w.tau());
        let v_field = sine_coefficient(&lattice, 2.0);
        match solve_characteristic(&v_field, &w, Method::Newton, &cfg) {
            Ok(run) => assert!(!run.warnings.is_empty()),
            Err(
                TransportError::Divergence { .. }
                | TransportError::NonConvergence { .. }
                | TransportError::InvalidInput(_),
            ) => {}
            Err(other) => panic!("unexpected failure mode {other}"),
        }
    }
}
