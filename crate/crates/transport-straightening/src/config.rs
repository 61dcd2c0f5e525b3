use crate::TransportError;
use serde::{Deserialize, Serialize};

/// Index bookkeeping and stopping rules for the Nash-Moser-Hormander engine.
///
/// The six smoothing indices live on the scale of weighted norms used by the
/// solver: data is measured at exponent `beta`, the solution at `alpha`, and
/// the remaining four bracket the tame estimates of the linearized inverse.
/// They must satisfy
///
/// ```text
/// 0 <= a0 <= mu <= a1,   a1 + beta/2 < alpha < a1 + beta,   2 alpha < a1 + a2
/// ```
///
/// which is exactly the room the dyadic scheme needs to absorb quadratic
/// errors. `loss` records the derivative loss of one exact linearized solve;
/// the transport defaults derive every index from it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NMHConfig {
    pub a0: f64,
    pub mu: f64,
    pub a1: f64,
    pub a2: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Derivative loss of the linearized inverse.
    pub loss: f64,
    /// Base of the smoothing cutoffs 2^n; only 2 is supported.
    pub dyadic_base: u32,
    pub max_stages: usize,
    /// Size threshold on smoothed iterates (warn-only).
    pub delta1: f64,
    /// Smallness threshold on gamma^{-1} times the data norm (warn-only).
    pub delta: f64,
    /// Residual target in the base Sobolev norm.
    pub tol: f64,
}

impl NMHConfig {
    pub fn new(
        a0: f64,
        mu: f64,
        a1: f64,
        a2: f64,
        alpha: f64,
        beta: f64,
        loss: f64,
    ) -> Result<Self, TransportError> {
        let cfg = Self {
            a0,
            mu,
            a1,
            a2,
            alpha,
            beta,
            loss,
            dyadic_base: 2,
            max_stages: 40,
            delta1: 0.5,
            delta: 0.5,
            tol: 1e-12,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Indices for the characteristic equation of a transport operator with
    /// k0 parameter derivatives tracked and Diophantine exponent tau.
    pub fn for_transport(k0: usize, tau: f64) -> Self {
        let k = k0 as f64;
        let loss = 3.0 * k + 2.0 * tau * (k + 1.0) + 2.0;
        Self::new(
            0.0,
            1.0,
            loss,
            5.0 * loss + 3.0,
            3.0 * loss + 1.0,
            4.0 * loss + 1.0,
            loss,
        )
        .expect("transport indices satisfy the bracketing inequalities")
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_stages(mut self, max_stages: usize) -> Self {
        self.max_stages = max_stages;
        self
    }

    pub fn with_thresholds(mut self, delta1: f64, delta: f64) -> Self {
        self.delta1 = delta1;
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<(), TransportError> {
        let bad = |msg: &str| Err(TransportError::InvalidInput(msg.into()));
        if !(self.a0 >= 0.0 && self.a0 <= self.mu && self.mu <= self.a1) {
            return bad("need 0 <= a0 <= mu <= a1");
        }
        if !(self.a1 + self.beta / 2.0 < self.alpha && self.alpha < self.a1 + self.beta) {
            return bad("need a1 + beta/2 < alpha < a1 + beta");
        }
        if !(2.0 * self.alpha < self.a1 + self.a2) {
            return bad("need 2 alpha < a1 + a2");
        }
        if self.loss < 0.0 || !self.loss.is_finite() {
            return bad("derivative loss must be finite and nonnegative");
        }
        if self.dyadic_base != 2 {
            return bad("only dyadic base 2 is supported");
        }
        if self.max_stages == 0 {
            return bad("need at least one stage");
        }
        if !(self.tol > 0.0) {
            return bad("tolerance must be positive");
        }
        Ok(())
    }

    /// Exponent of the weighted norm measuring the solution, on a lattice
    /// with base regularity s0.
    pub fn target_exponent(&self, s0: f64) -> f64 {
        2.0 * s0 + self.alpha
    }

    /// Exponent of the weighted norm measuring the data.
    pub fn data_exponent(&self, s0: f64) -> f64 {
        2.0 * s0 + self.beta
    }
}
