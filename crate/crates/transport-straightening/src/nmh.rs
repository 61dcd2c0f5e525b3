use crate::{Field, NMHConfig, TransportError};
use serde::{Deserialize, Serialize};

/// A nonlinear problem Phi(u) = Phi(0) + g presented to the dyadic solver.
///
/// `right_inverse` must invert the linearization at the given point on the
/// truncation; `project` restores any linear constraints (parity, averages)
/// and defaults to the identity.
pub trait NmhProblem {
    fn phi(&self, u: &Field) -> Field;
    /// Directional derivative Phi'(at)[h].
    fn dphi(&self, at: &Field, h: &Field) -> Field;
    /// Second derivative Phi''(at)[h, k].
    fn d2phi(&self, at: &Field, h: &Field, k: &Field) -> Field;
    /// Right inverse of Phi'(at).
    fn right_inverse(&self, at: &Field, g: &Field) -> Result<Field, TransportError>;
    fn project(&self, u: Field) -> Field {
        u
    }
}

/// Per-stage record of the dyadic iteration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NmhStage {
    pub stage: usize,
    /// Frequency cutoff 2^(n+1) of the data fed at this stage.
    pub cutoff: usize,
    /// Increment size in the target norm.
    pub increment_norm: f64,
    /// Residual of Phi(u) - Phi(0) - g after the stage, base Sobolev norm.
    pub residual: f64,
    /// Measured Taylor error of the step.
    pub taylor_error: f64,
    /// Curvature prediction |Phi''(v)[h,h]|/2 for the same quantity.
    pub taylor_prediction: f64,
    /// Smoothing sharpness: norm growth of the smoothed iterate against
    /// the dyadic bound (must stay at most 1 for sharp cutoffs).
    pub smoothing_ratio: f64,
}

/// Solver outcome with the norms needed for a tame-bound report.
#[derive(Debug, Clone)]
pub struct NmhSolution {
    pub u: Field,
    pub residual: f64,
    pub stages: Vec<NmhStage>,
    /// Shell constant A: l2 mass of the dyadic blocks of g against its
    /// data norm; exactly 1 for sharp cutoffs.
    pub shell_constant: f64,
    /// Solution size in the target norm (exponent 2 s0 + alpha).
    pub target_norm: f64,
    /// Data size in the data norm (exponent 2 s0 + beta).
    pub data_norm: f64,
    /// target_norm / ((1 + A) data_norm); finite when the tame bound holds.
    pub fitted_constant: f64,
    pub warnings: Vec<String>,
}

fn max_bracket(lattice: &spectral_core::ModeLattice) -> f64 {
    let mut best = 1.0f64;
    lattice.for_each_mode(|_, ell, j| {
        best = best.max(spectral_core::ModeLattice::weight(ell, j));
    });
    best
}

/// Solves Phi(u) = Phi(0) + g by dyadic continuation: stage n feeds the
/// data up to frequency 2^(n+1), solves the linearization at the smoothed
/// iterate S_n u, and re-injects the committed error at later stages. On a
/// finite truncation the cutoffs saturate and the tail of the iteration is
/// a plain Newton correction.
pub fn nmh_solve(
    problem: &impl NmhProblem,
    g: &Field,
    cfg: &NMHConfig,
) -> Result<NmhSolution, TransportError> {
    cfg.validate()?;
    let lattice = g.lattice().clone();
    let s0 = lattice.s0();
    let mut warnings = Vec::new();

    let data_norm = g.sobolev_norm(cfg.data_exponent(s0));
    if data_norm > cfg.delta {
        warnings.push(format!(
            "data norm {data_norm:.3e} exceeds the smallness threshold {:.1e}",
            cfg.delta
        ));
    }

    // dyadic shells of the data
    let top = max_bracket(&lattice);
    let mut shell_sq = 0.0;
    let mut j = 0u32;
    loop {
        let block = g.dyadic_block(j);
        shell_sq += block.sobolev_norm(cfg.data_exponent(s0)).powi(2);
        if (1u64 << j) as f64 >= top {
            break;
        }
        j += 1;
    }
    let shell_constant = if data_norm > 0.0 {
        shell_sq.sqrt() / data_norm
    } else {
        1.0
    };

    let zero = problem.project(Field::zeros(&lattice));
    let phi0 = problem.phi(&zero);
    let mut u = zero;
    let mut phi_u = phi0.clone();
    let mut err_acc = Field::zeros(&lattice);
    let mut prev_data = Field::zeros(&lattice);
    let mut stages: Vec<NmhStage> = Vec::new();
    let mut residual = phi_u.sub(&phi0).sub(g).sobolev_norm(s0);
    let mut growth = 0usize;
    let mut warned_size = false;

    if residual <= cfg.tol {
        let target_norm = u.sobolev_norm(cfg.target_exponent(s0));
        return Ok(NmhSolution {
            u,
            residual,
            stages,
            shell_constant,
            target_norm,
            data_norm,
            fitted_constant: target_norm / ((1.0 + shell_constant) * data_norm.max(f64::MIN_POSITIVE)),
            warnings,
        });
    }

    for n in 0..cfg.max_stages {
        let smoothed = if n == 0 {
            Field::zeros(&lattice)
        } else {
            u.dyadic_smoothing(n as u32)
        };
        if n > 0 {
            let lhs = smoothed.sobolev_norm(2.0 * s0 + 1.0);
            let rhs = 2f64.powi(n as i32) * smoothed.sobolev_norm(2.0 * s0);
            if lhs > 1.000001 * rhs && lhs > 1e-280 {
                return Err(TransportError::AxiomViolation {
                    stage: n,
                    ratio: lhs / rhs,
                });
            }
        }
        let iterate_size = smoothed.sobolev_norm(2.0 * s0 + cfg.a1);
        if iterate_size > cfg.delta1 && !warned_size {
            warned_size = true;
            warnings.push(format!(
                "smoothed iterate size {iterate_size:.3e} exceeds the threshold {:.1e} at stage {n}",
                cfg.delta1
            ));
        }

        let current = g.sub(&err_acc).dyadic_smoothing(n as u32 + 1);
        let y = current.sub(&prev_data);
        let h = problem.project(problem.right_inverse(&smoothed, &y)?);
        let u_next = problem.project(u.add(&h));
        let phi_next = problem.phi(&u_next);

        let lin = problem.dphi(&smoothed, &h);
        let taylor = phi_next.sub(&phi_u).sub(&lin);
        let prediction = problem.d2phi(&smoothed, &h, &h).scale(0.5);
        // committed error: everything the fed data did not account for
        let e = phi_next.sub(&phi_u).sub(&y);
        err_acc = err_acc.add(&e);
        prev_data = current;

        let smoothing_ratio = {
            let base = u_next.dyadic_smoothing(n as u32 + 1);
            let denom = 2f64.powi(n as i32 + 1) * base.sobolev_norm(2.0 * s0);
            if denom > 0.0 {
                base.sobolev_norm(2.0 * s0 + 1.0) / denom
            } else {
                0.0
            }
        };

        u = u_next;
        phi_u = phi_next;
        residual = phi_u.sub(&phi0).sub(g).sobolev_norm(s0);
        let prev_res = stages.last().map(|s| s.residual);
        stages.push(NmhStage {
            stage: n,
            cutoff: 1usize << (n + 1).min(62),
            increment_norm: h.sobolev_norm(cfg.target_exponent(s0)),
            residual,
            taylor_error: taylor.sobolev_norm(s0),
            taylor_prediction: prediction.sobolev_norm(s0),
            smoothing_ratio,
        });
        if residual <= cfg.tol {
            break;
        }
        if let Some(prev) = prev_res {
            growth = if residual > prev { growth + 1 } else { 0 };
            if growth >= 3 {
                return Err(TransportError::Divergence {
                    stage: n,
                    residual,
                });
            }
        }
    }

    if residual > cfg.tol {
        return Err(TransportError::NonConvergence {
            stages: stages.len(),
            residual,
        });
    }
    let target_norm = u.sobolev_norm(cfg.target_exponent(s0));
    let fitted_constant =
        target_norm / ((1.0 + shell_constant) * data_norm.max(f64::MIN_POSITIVE));
    Ok(NmhSolution {
        u,
        residual,
        stages,
        shell_constant,
        target_norm,
        data_norm,
        fitted_constant,
        warnings,
    })
}
