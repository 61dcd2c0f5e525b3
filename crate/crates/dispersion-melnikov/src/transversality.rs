//! Lower bounds on depth derivatives of frequency combinations.
//!
//! For every admissible index tuple the scan tabulates
//! omega(h) . ell, optionally plus or minus one or two normal
//! frequencies, on a uniform depth grid, takes centered
//! finite-difference derivatives up to the probe depth, and records the
//! smallest observed value of max_k |d^k/dh^k| / <ell>.

use crate::context::DispersionContext;
use crate::{ell_box, freq, DispersionError};
use nalgebra::{DMatrix, DVector};
use spectral_core::DiophantineFrequency;

pub struct ScanOptions {
    /// Grid spacing as a fraction of the window length; the spacing is
    /// also the finite-difference step.
    pub step_fraction: f64,
    /// Overrides the admissibility constant of the index restrictions.
    pub index_constant: Option<f64>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { step_fraction: 1e-3, index_constant: None }
    }
}

/// Central stencil over offsets -k..=k reproducing the k-th derivative;
/// exact on polynomials of degree 2k.
fn stencil_weights(k: usize) -> Vec<f64> {
    let n = 2 * k + 1;
    let vand = DMatrix::from_fn(n, n, |m, i| (i as f64 - k as f64).powi(m as i32));
    let mut rhs = DVector::zeros(n);
    rhs[k] = (1..=k).product::<usize>() as f64;
    let w = vand.lu().solve(&rhs).expect("moment system is nonsingular");
    w.iter().copied().collect()
}

/// Leading error order of the stencil; the symmetric layout gains one
/// order when k is even.
fn leading_order(k: usize) -> i32 {
    if k % 2 == 0 {
        k as i32 + 2
    } else {
        k as i32 + 1
    }
}

/// Derivatives at grid index g0 by the step-delta stencil paired with
/// the doubled-step stencil through Richardson; updates the running
/// minima of max_{k <= kk} |d^k| / bracket for every probe depth kk.
fn scan_combination(
    c: &[f64],
    bracket: f64,
    pad: usize,
    n_interior: usize,
    delta: f64,
    weights: &[Vec<f64>],
    minima: &mut [f64],
) {
    for g0 in pad..=pad + n_interior {
        let mut running = c[g0].abs();
        minima[0] = minima[0].min(running / bracket);
        for (k, w) in weights.iter().enumerate().map(|(i, w)| (i + 1, w)) {
            let mut d1 = 0.0;
            let mut d2 = 0.0;
            for (idx, &wi) in w.iter().enumerate() {
                let off = idx as i64 - k as i64;
                d1 += wi * c[(g0 as i64 + off) as usize];
                d2 += wi * c[(g0 as i64 + 2 * off) as usize];
            }
            let dk = delta.powi(k as i32);
            d1 /= dk;
            d2 /= dk * 2f64.powi(k as i32);
            let p = 2f64.powi(leading_order(k));
            let r = (p * d1 - d2) / (p - 1.0);
            running = running.max(r.abs());
            minima[k] = minima[k].min(running / bracket);
        }
    }
}

pub fn transversality_scan(
    ctx: &DispersionContext,
    ell_max: usize,
    j_max: usize,
) -> Result<(f64, usize), DispersionError> {
    transversality_scan_with(ctx, ell_max, j_max, &ScanOptions::default())
}

/// Returns the smallest observed max_k |d^k/dh^k (combination)| / <ell>
/// over the window and all admissible tuples, together with the
/// smallest probe depth already attaining that bound.
pub fn transversality_scan_with(
    ctx: &DispersionContext,
    ell_max: usize,
    j_max: usize,
    opt: &ScanOptions,
) -> Result<(f64, usize), DispersionError> {
    if !(opt.step_fraction > 0.0 && opt.step_fraction <= 0.1) {
        return Err(DispersionError::InvalidParameter(
            "step fraction outside (0, 0.1]".into(),
        ));
    }
    let (h1, h2) = ctx.h_range();
    let delta = opt.step_fraction * (h2 - h1);
    let n_interior = ((h2 - h1) / delta).round() as usize;
    let k_star = ctx.k_star();
    let pad = 2 * k_star;
    if h1 - pad as f64 * delta <= 0.0 {
        return Err(DispersionError::InvalidContext(
            "depth window too close to zero for the stencil pad".into(),
        ));
    }
    let n_ext = n_interior + 2 * pad + 1;
    let grid: Vec<f64> =
        (0..n_ext).map(|g| h1 + (g as i64 - pad as i64) as f64 * delta).collect();

    let c_index = opt.index_constant.unwrap_or_else(|| ctx.index_constant());
    let normals = ctx.normal_sites(j_max);
    let tangential: Vec<Vec<f64>> = ctx
        .s_plus()
        .iter()
        .map(|&j| grid.iter().map(|&h| freq::omega(j, h)).collect())
        .collect();
    let normal_table: Vec<Vec<f64>> = normals
        .iter()
        .map(|&j| grid.iter().map(|&h| freq::omega(j, h)).collect())
        .collect();
    let weights: Vec<Vec<f64>> = (1..=k_star).map(stencil_weights).collect();

    let mut minima = vec![f64::INFINITY; k_star + 1];
    let mut tuples = 0usize;
    let mut combo = vec![0.0; n_ext];

    for ell in ell_box(ctx.nu(), ell_max) {
        let bracket = DiophantineFrequency::<f64>::bracket(&ell);
        let nonzero = ell.iter().any(|&v| v != 0);
        let mut dot = vec![0.0; n_ext];
        for (table, &l) in tangential.iter().zip(ell.iter()) {
            if l != 0 {
                for (acc, &v) in dot.iter_mut().zip(table) {
                    *acc += l as f64 * v;
                }
            }
        }
        if nonzero {
            tuples += 1;
            scan_combination(&dot, bracket, pad, n_interior, delta, &weights, &mut minima);
        }
        for (a, &j) in normals.iter().enumerate() {
            let sj = (j as f64).sqrt();
            if sj <= c_index * bracket {
                tuples += 1;
                for (acc, (&d, &v)) in combo.iter_mut().zip(dot.iter().zip(&normal_table[a])) {
                    *acc = d + v;
                }
                scan_combination(&combo, bracket, pad, n_interior, delta, &weights, &mut minima);
            }
            for (b, &jp) in normals.iter().enumerate().skip(a) {
                let sp = (jp as f64).sqrt();
                if sj + sp <= c_index * bracket {
                    tuples += 1;
                    for (acc, (&d, (&v, &vp))) in combo
                        .iter_mut()
                        .zip(dot.iter().zip(normal_table[a].iter().zip(&normal_table[b])))
                    {
                        *acc = d + v + vp;
                    }
                    scan_combination(&combo, bracket, pad, n_interior, delta, &weights, &mut minima);
                }
                if b > a && nonzero && (sj - sp).abs() <= c_index * bracket {
                    tuples += 1;
                    for (acc, (&d, (&v, &vp))) in combo
                        .iter_mut()
                        .zip(dot.iter().zip(normal_table[a].iter().zip(&normal_table[b])))
                    {
                        *acc = d + v - vp;
                    }
                    scan_combination(&combo, bracket, pad, n_interior, delta, &weights, &mut minima);
                }
            }
        }
    }
    if tuples == 0 {
        return Err(DispersionError::EmptyIndexSet);
    }
    let rho0 = minima[k_star];
    let k_observed = minima
        .iter()
        .position(|&m| m >= rho0 * (1.0 - 1e-9))
        .unwrap_or(k_star);
    Ok((rho0, k_observed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_weights_match_classical_tables() {
        let w1 = stencil_weights(1);
        for (got, want) in w1.iter().zip([-0.5, 0.0, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        let w2 = stencil_weights(2);
        let classical = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for (got, want) in w2.iter().zip(classical) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn stencils_differentiate_a_cubic_exactly() {
        // f(h) = h^3 on a grid of spacing 0.1 around 2.0
        let delta = 0.1;
        let c: Vec<f64> = (-6..=6).map(|g| (2.0 + g as f64 * delta).powi(3)).collect();
        let weights: Vec<Vec<f64>> = (1..=3).map(stencil_weights).collect();
        let mut minima = vec![f64::INFINITY; 4];
        scan_combination(&c, 1.0, 6, 0, delta, &weights, &mut minima);
        // max over k of |f|, |f'|, |f''|, |f'''| at h = 2 is f = 8, f' = 12, f'' = 12
        assert!((minima[3] - 12.0).abs() < 1e-9);
    }

    #[test]
    fn single_site_slice_needs_no_derivatives() {
        let ctx = DispersionContext::new((1.0, 2.0), vec![1], 1e-2, 1.0, 0.25, 2).unwrap();
        let (rho0, k_obs) = transversality_scan(&ctx, 1, 1).unwrap();
        assert!((rho0 - 1f64.tanh().sqrt()).abs() < 1e-12);
        assert_eq!(k_obs, 0);
    }

    #[test]
    fn empty_index_set_is_an_error() {
        let ctx = DispersionContext::new((1.0, 2.0), vec![1], 1e-2, 1.0, 0.25, 2).unwrap();
        assert!(matches!(
            transversality_scan(&ctx, 0, 1),
            Err(DispersionError::EmptyIndexSet)
        ));
    }
}
