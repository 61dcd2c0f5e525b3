//! Scan parameters and the asymptotic shape of reduced spectra.

use crate::{freq, DispersionError};

/// Depth window, tangential sites and the small-divisor constants shared
/// by transversality scans, membership checks and measure estimates.
#[derive(Clone, Debug)]
pub struct DispersionContext {
    h_range: (f64, f64),
    s_plus: Vec<usize>,
    gamma: f64,
    tau: f64,
    d: f64,
    k_star: usize,
}

impl DispersionContext {
    pub fn new(
        h_range: (f64, f64),
        s_plus: Vec<usize>,
        gamma: f64,
        tau: f64,
        d: f64,
        k_star: usize,
    ) -> Result<Self, DispersionError> {
        let (h1, h2) = h_range;
        if !(h1.is_finite() && h2.is_finite() && 0.0 < h1 && h1 < h2) {
            return Err(DispersionError::InvalidContext(format!(
                "depth window [{h1}, {h2}] must satisfy 0 < h1 < h2"
            )));
        }
        if s_plus.is_empty() || s_plus.contains(&0) {
            return Err(DispersionError::InvalidContext(
                "tangential sites must be a nonempty set of positive integers".into(),
            ));
        }
        let mut sites = s_plus;
        sites.sort_unstable();
        if sites.windows(2).any(|w| w[0] == w[1]) {
            return Err(DispersionError::InvalidContext(
                "tangential sites must be distinct".into(),
            ));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(DispersionError::InvalidContext(format!("gamma = {gamma} outside (0, 1]")));
        }
        if tau < 1.0 {
            return Err(DispersionError::InvalidContext(format!("tau = {tau} below 1")));
        }
        if d < 0.25 {
            return Err(DispersionError::InvalidContext(format!("d = {d} below 1/4")));
        }
        if k_star > 4 {
            return Err(DispersionError::InvalidContext(
                "derivative probe depth capped at 4".into(),
            ));
        }
        Ok(Self { h_range, s_plus: sites, gamma, tau, d, k_star })
    }

    pub fn h_range(&self) -> (f64, f64) {
        self.h_range
    }

    pub fn s_plus(&self) -> &[usize] {
        &self.s_plus
    }

    pub fn nu(&self) -> usize {
        self.s_plus.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn k_star(&self) -> usize {
        self.k_star
    }

    /// Same window and sites, different divisor constant.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self, DispersionError> {
        Self::new(self.h_range, self.s_plus.clone(), gamma, self.tau, self.d, self.k_star)
    }

    /// Tangential frequency vector at depth h.
    pub fn omega_vec(&self, h: f64) -> Vec<f64> {
        freq::omega_vec(&self.s_plus, h)
    }

    /// Normal sites 1..=j_max with the tangential ones removed.
    pub fn normal_sites(&self, j_max: usize) -> Vec<usize> {
        (1..=j_max).filter(|j| !self.s_plus.contains(j)).collect()
    }

    /// Admissibility constant of the index restrictions,
    /// 10 max(1, sup |omega|) / sqrt(tanh h1); the sup sits at h2 since
    /// every frequency increases with depth.
    pub fn index_constant(&self) -> f64 {
        let sup = self.omega_vec(self.h_range.1).iter().map(|v| v * v).sum::<f64>().sqrt();
        10.0 * sup.max(1.0) / self.h_range.0.tanh().sqrt()
    }
}

/// Asymptotic form of a reduced spectrum: a common factor m_half in
/// front of sqrt(j tanh(h j)) plus a symmetric real correction
/// r_j = r_{-j}.
#[derive(Clone, Debug)]
pub struct FloquetSpectrum {
    m_half: f64,
    r: Vec<f64>,
}

impl FloquetSpectrum {
    /// r[n] is the correction at modes +-(n+1); entries beyond the
    /// stored range count as zero.
    pub fn new(m_half: f64, r: Vec<f64>) -> Self {
        assert!(m_half.is_finite() && r.iter().all(|v| v.is_finite()));
        Self { m_half, r }
    }

    pub fn flat(m_half: f64) -> Self {
        Self::new(m_half, Vec::new())
    }

    pub fn m_half(&self) -> f64 {
        self.m_half
    }

    pub fn r(&self, j: i64) -> f64 {
        assert!(j != 0, "corrections live on nonzero modes");
        self.r.get(j.unsigned_abs() as usize - 1).copied().unwrap_or(0.0)
    }

    /// m_half sqrt(|j| tanh(h |j|)) + r_j.
    pub fn mu(&self, j: i64, h: f64) -> f64 {
        self.m_half * freq::omega(j.unsigned_abs() as usize, h) + self.r(j)
    }

    /// sup over stored modes of sqrt(j) |r_j|.
    pub fn weighted_r_sup(&self) -> f64 {
        self.r
            .iter()
            .enumerate()
            .map(|(n, v)| ((n + 1) as f64).sqrt() * v.abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> DispersionContext {
        DispersionContext::new((1.0, 2.0), vec![1], 1e-2, 1.5, 0.25, 2).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        let bad = [
            DispersionContext::new((2.0, 1.0), vec![1], 0.1, 1.0, 0.5, 1),
            DispersionContext::new((0.0, 1.0), vec![1], 0.1, 1.0, 0.5, 1),
            DispersionContext::new((1.0, 2.0), vec![], 0.1, 1.0, 0.5, 1),
            DispersionContext::new((1.0, 2.0), vec![0, 2], 0.1, 1.0, 0.5, 1),
            DispersionContext::new((1.0, 2.0), vec![2, 2], 0.1, 1.0, 0.5, 1),
            DispersionContext::new((1.0, 2.0), vec![1], 0.0, 1.0, 0.5, 1),
            DispersionContext::new((1.0, 2.0), vec![1], 1.5, 1.0, 0.5, 1),
            DispersionContext::new((1.0, 2.0), vec![1], 0.1, 0.9, 0.5, 1),
            DispersionContext::new((1.0, 2.0), vec![1], 0.1, 1.0, 0.2, 1),
            DispersionContext::new((1.0, 2.0), vec![1], 0.1, 1.0, 0.5, 9),
        ];
        for b in bad {
            assert!(matches!(b, Err(DispersionError::InvalidContext(_))));
        }
    }

    #[test]
    fn sites_are_sorted_and_normals_exclude_them() {
        let c = DispersionContext::new((0.5, 1.5), vec![5, 2], 0.1, 1.0, 0.5, 1).unwrap();
        assert_eq!(c.s_plus(), &[2, 5]);
        assert_eq!(c.nu(), 2);
        assert_eq!(c.normal_sites(7), vec![1, 3, 4, 6, 7]);
    }

    #[test]
    fn index_constant_uses_the_right_endpoint() {
        let c = ctx();
        let expect = 10.0 * 1.0f64.max(crate::freq::omega(1, 2.0)) / 1.0f64.tanh().sqrt();
        assert!((c.index_constant() - expect).abs() < 1e-14);
    }

    #[test]
    fn spectrum_is_symmetric_and_reports_weighted_sup() {
        let s = FloquetSpectrum::new(1.0, vec![0.1, -0.05, 0.01]);
        for j in 1..=5i64 {
            assert_eq!(s.mu(j, 1.3), s.mu(-j, 1.3));
        }
        assert_eq!(s.r(4), 0.0);
        assert!((s.weighted_r_sup() - 0.1f64.max(2f64.sqrt() * 0.05)).abs() < 1e-15);
        assert_eq!(s.mu(2, 1.0), crate::freq::omega(2, 1.0) - 0.05);
    }
}
