//! Grid measure of the resonant depth set.

use crate::context::{DispersionContext, FloquetSpectrum};
use crate::{ell_box, DispersionError};
use spectral_core::DiophantineFrequency;

/// Measure of the depth subset on which at least one small-divisor
/// condition fails, with the unperturbed tangential frequencies.
pub fn resonant_measure(
    ctx: &DispersionContext,
    spec_of_h: impl Fn(f64) -> FloquetSpectrum,
    samples: usize,
    ell_max: usize,
    j_max: usize,
) -> f64 {
    resonant_measure_with_frequency(ctx, spec_of_h, |h| ctx.omega_vec(h), samples, ell_max, j_max)
}

/// Same scan with a caller-supplied frequency curve, e.g. a synthetic
/// perturbation of the tangential frequencies.
///
/// Midpoint grid over the window; a sample counts as resonant when any
/// condition family is violated.  The enumeration keeps only index
/// tuples that can support a nonempty resonant set: j^{1/2} <= C <ell>
/// for the first family, j^{1/2} + j'^{1/2} <= C <ell> for the sums,
/// |j^{1/2} - j'^{1/2}| <= C <ell> and ell != 0 for the differences.
pub fn resonant_measure_with_frequency(
    ctx: &DispersionContext,
    spec_of_h: impl Fn(f64) -> FloquetSpectrum,
    omega_of_h: impl Fn(f64) -> Vec<f64>,
    samples: usize,
    ell_max: usize,
    j_max: usize,
) -> f64 {
    assert!(samples >= 100, "need at least 100 depth samples");
    let (h1, h2) = ctx.h_range();
    let width = h2 - h1;
    let gamma = ctx.gamma();
    let tau = ctx.tau();
    let d = ctx.d();
    let c_index = ctx.index_constant();
    let normals = ctx.normal_sites(j_max);
    let roots: Vec<f64> = normals.iter().map(|&j| (j as f64).sqrt()).collect();
    let ells = ell_box(ctx.nu(), ell_max);

    let mut hits = 0usize;
    for s in 0..samples {
        let h = h1 + width * (s as f64 + 0.5) / samples as f64;
        let omega = omega_of_h(h);
        assert_eq!(omega.len(), ctx.nu());
        let spec = spec_of_h(h);
        let mus: Vec<f64> = normals.iter().map(|&j| spec.mu(j as i64, h)).collect();
        if resonant(&omega, &mus, &roots, &ells, gamma, tau, d, c_index) {
            hits += 1;
        }
    }
    width * hits as f64 / samples as f64
}

#[allow(clippy::too_many_arguments)]
fn resonant(
    omega: &[f64],
    mus: &[f64],
    roots: &[f64],
    ells: &[Vec<i64>],
    gamma: f64,
    tau: f64,
    d: f64,
    c_index: f64,
) -> bool {
    for ell in ells {
        let nonzero = ell.iter().any(|&v| v != 0);
        let br = DiophantineFrequency::<f64>::bracket(ell);
        let base = gamma * br.powf(-tau);
        let dot: f64 = omega.iter().zip(ell).map(|(w, &l)| w * l as f64).sum();
        if nonzero && dot.abs() < 8.0 * base {
            return true;
        }
        let cap = c_index * br;
        for (a, (&mu_j, &sj)) in mus.iter().zip(roots).enumerate() {
            if sj <= cap && (dot + mu_j).abs() < 4.0 * base * sj {
                return true;
            }
            for (&mu_p, &sp) in mus[a..].iter().zip(&roots[a..]) {
                if sj + sp <= cap && (dot + mu_j + mu_p).abs() < 4.0 * base * (sj + sp) {
                    return true;
                }
            }
            if nonzero {
                for (&mu_p, &sp) in mus[a + 1..].iter().zip(&roots[a + 1..]) {
                    if (sj - sp).abs() <= cap
                        && (dot + mu_j - mu_p).abs() < 4.0 * base * (sj * sp).powf(-2.0 * d)
                    {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Least-squares power law m = c gamma^p through the positive entries;
/// returns (c, p, r2) of the log-log fit.
pub fn power_law_fit(
    gammas: &[f64],
    measures: &[f64],
) -> Result<(f64, f64, f64), DispersionError> {
    if gammas.len() != measures.len() {
        return Err(DispersionError::InvalidParameter(
            "one measure per gamma required".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = gammas
        .iter()
        .zip(measures)
        .filter(|(&g, &m)| g > 0.0 && m > 0.0)
        .map(|(&g, &m)| (g.ln(), m.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(DispersionError::InvalidParameter(
            "need at least two positive measures".into(),
        ));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(DispersionError::InvalidParameter(
            "gammas must not coincide".into(),
        ));
    }
    let p = (n * sxy - sx * sy) / denom;
    let intercept = (sy - p * sx) / n;
    let mean = sy / n;
    let ss_tot: f64 = pts.iter().map(|q| (q.1 - mean).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|q| (q.1 - intercept - p * q.0).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((intercept.exp(), p, r2))
}
