use crate::cutoff::regularized_reciprocal;
use crate::field::FourierField;
use crate::lattice::MAX_NU;
use crate::{Scalar, SpectralError};
use num_complex::Complex;

/// How small divisors are handled when inverting w . dphi.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisorMode {
    /// Divide by i w.l outright; reject nonzero phi-average input.
    Strict,
    /// Multiply by the smooth cutoff chi(w.l / (gamma <l>^-tau)) first, so
    /// divisors below the Diophantine threshold are damped to zero.
    Extended,
}

/// Frequency vector with certified lower bounds |w.l| >= gamma <l>^-tau
/// over a finite l-box.
#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineFrequency<T: Scalar> {
    omega: Vec<T>,
    gamma: T,
    tau: T,
    checked_box: usize,
}

impl<T: Scalar> DiophantineFrequency<T> {
    /// Validates the divisor bound for all 0 < |l|_1 <= check_box.
    pub fn new(omega: Vec<T>, gamma: T, tau: T, check_box: usize) -> Result<Self, SpectralError> {
        if omega.is_empty() || omega.len() > MAX_NU {
            return Err(SpectralError::InvalidParameter(format!(
                "frequency dimension {} out of range",
                omega.len()
            )));
        }
        if gamma <= T::zero() || tau < T::one() {
            return Err(SpectralError::InvalidParameter(
                "need gamma > 0 and tau >= 1".into(),
            ));
        }
        let w = Self {
            omega,
            gamma,
            tau,
            checked_box: check_box,
        };
        let mut worst: Option<(Vec<i64>, T, T)> = None;
        w.scan_box(check_box, |ell, value, bound| {
            if value.abs() < bound && worst.as_ref().map_or(true, |(_, v, _)| value.abs() < *v) {
                worst = Some((ell.to_vec(), value.abs(), bound));
            }
        });
        if let Some((ell, value, bound)) = worst {
            return Err(SpectralError::DiophantineViolation {
                ell,
                value: value.f64(),
                bound: bound.f64(),
            });
        }
        Ok(w)
    }

    /// Chooses gamma = min |w.l| <l>^tau over the box, then constructs.
    pub fn fitted(omega: Vec<T>, tau: T, check_box: usize) -> Result<Self, SpectralError> {
        let probe = Self {
            omega: omega.clone(),
            gamma: T::one(),
            tau,
            checked_box: check_box,
        };
        let mut best = T::infinity();
        probe.scan_box(check_box, |_ell, value, bound_at_gamma1| {
            // bound_at_gamma1 = <l>^-tau, so value/bound = |w.l| <l>^tau
            let ratio = value.abs() / bound_at_gamma1;
            if ratio < best {
                best = ratio;
            }
        });
        if !best.is_finite() || best <= T::zero() {
            return Err(SpectralError::InvalidParameter(
                "frequency is resonant on the checked box".into(),
            ));
        }
        Self::new(omega, best, tau, check_box)
    }

    /// Golden-mean based default for the given number of angles
    /// (1.618..., then (1, 1.618...), then further golden powers), with
    /// gamma fitted over the box 2*l_max.
    pub fn default_for(nu: usize, l_max: usize) -> Result<Self, SpectralError> {
        let golden = (T::one() + T::fr(5.0).sqrt()) / T::fr(2.0);
        let omega: Vec<T> = match nu {
            1 => vec![golden],
            _ => (0..nu).map(|k| golden.powi(k as i32)).collect(),
        };
        Self::fitted(omega, T::one(), 2 * l_max)
    }

    pub fn omega(&self) -> &[T] {
        &self.omega
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn nu(&self) -> usize {
        self.omega.len()
    }

    pub fn checked_box(&self) -> usize {
        self.checked_box
    }

    /// Same frequency with a replaced (gamma, tau) certificate.
    pub fn with_constants(&self, gamma: T, tau: T, check_box: usize) -> Result<Self, SpectralError> {
        Self::new(self.omega.clone(), gamma, tau, check_box)
    }

    pub fn dot(&self, ell: &[i64]) -> T {
        let mut acc = T::zero();
        for (w, &l) in self.omega.iter().zip(ell) {
            acc += *w * T::fr(l as f64);
        }
        acc
    }

    /// <l> = max(1, |l|_1).
    pub fn bracket(ell: &[i64]) -> T {
        let l1: i64 = ell.iter().map(|v| v.abs()).sum();
        T::fr(l1.max(1) as f64)
    }

    /// The certified lower bound gamma <l>^-tau.
    pub fn divisor_bound(&self, ell: &[i64]) -> T {
        self.gamma * Self::bracket(ell).powf(-self.tau)
    }

    fn scan_box(&self, box_radius: usize, mut f: impl FnMut(&[i64], T, T)) {
        let nu = self.omega.len();
        let r = box_radius as i64;
        let mut ell = vec![0i64; nu];
        let mut idx = vec![0i64; nu];
        loop {
            for d in 0..nu {
                ell[d] = idx[d] - r;
            }
            let l1: i64 = ell.iter().map(|v| v.abs()).sum();
            if l1 != 0 && l1 <= r {
                f(&ell, self.dot(&ell), self.divisor_bound(&ell));
            }
            let mut d = nu;
            loop {
                if d == 0 {
                    return;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] <= 2 * r {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    /// w . dphi: multiplies each coefficient by i w.l.
    pub fn forward(&self, u: &FourierField<T>) -> FourierField<T> {
        u.omega_dphi(&self.omega)
    }

    /// Inverse of w . dphi on zero-average functions.
    ///
    /// Strict mode errors if the phi-average of u is nonzero (beyond
    /// roundoff relative to the input size); extended mode damps small
    /// divisors through the cutoff and silently annihilates l = 0.
    pub fn invert(
        &self,
        u: &FourierField<T>,
        mode: DivisorMode,
    ) -> Result<FourierField<T>, SpectralError> {
        if mode == DivisorMode::Strict {
            let mass = u.phi_average_mass();
            let tol = T::fr(1e-12) * u.l2_norm().max(T::one());
            if mass > tol {
                return Err(SpectralError::NonZeroPhiAverage { mass: mass.f64() });
            }
        }
        let mut out = u.clone();
        let real_in = u.is_real_flagged();
        let coeffs = out.coeffs_mut();
        u.lattice().for_each_mode(|idx, ell, _j| {
            if ell.iter().all(|&l| l == 0) {
                coeffs[idx] = Complex::default();
                return;
            }
            let d = self.dot(ell);
            let factor = match mode {
                DivisorMode::Strict => d.recip(),
                DivisorMode::Extended => regularized_reciprocal(d, self.divisor_bound(ell)),
            };
            // division by i d: multiply by -i/d
            coeffs[idx] = coeffs[idx] * Complex::new(T::zero(), -factor);
        });
        out.set_real_flag(real_in);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ModeLattice;

    #[test]
    fn golden_mean_passes_large_box() {
        let w = DiophantineFrequency::<f64>::default_for(1, 64).unwrap();
        assert!((w.omega()[0] - 1.618033988749895).abs() < 1e-12);
        assert!(w.gamma() > 0.0);
    }

    #[test]
    fn fitted_gamma_is_sharp_on_box() {
        let w = DiophantineFrequency::<f64>::fitted(vec![1.0, 1.618033988749895], 1.0, 20).unwrap();
        // one l in the box must achieve the bound with equality
        let mut min_ratio = f64::INFINITY;
        for l1 in -20i64..=20 {
            for l2 in -20i64..=20 {
                if l1 == 0 && l2 == 0 || l1.abs() + l2.abs() > 20 {
                    continue;
                }
                let v = (l1 as f64 + 1.618033988749895 * l2 as f64).abs();
                let r = v * (l1.abs() + l2.abs()) as f64;
                min_ratio = min_ratio.min(r);
            }
        }
        assert!((min_ratio - w.gamma()).abs() < 1e-12 * w.gamma());
    }

    #[test]
    fn resonant_vector_is_rejected() {
        let err = DiophantineFrequency::<f64>::new(vec![1.0, 0.5], 0.1, 2.0, 10);
        assert!(err.is_err());
    }

    #[test]
    fn strict_inverse_of_cosine() {
        let lattice = ModeLattice::new(1, 4, 2).unwrap();
        let w = DiophantineFrequency::<f64>::fitted(vec![1.3], 1.0, 8).unwrap();
        let u = FourierField::trig(&lattice, &[1], 0, 1.0, crate::field::Parity::Even);
        let v = w.invert(&u, DivisorMode::Strict).unwrap();
        // (w.dphi)^-1 cos(phi) = sin(phi)/w1
        let expect = FourierField::trig(&lattice, &[1], 0, 1.0 / 1.3, crate::field::Parity::Odd);
        assert!(v.sub(&expect).l2_norm() < 1e-15);
    }
}
