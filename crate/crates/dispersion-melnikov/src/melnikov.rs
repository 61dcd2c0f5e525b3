//! Membership in the four families of small-divisor conditions.

use crate::context::{DispersionContext, FloquetSpectrum};
use crate::ell_box;
use serde::Serialize;
use spectral_core::DiophantineFrequency;
use std::fmt;

/// Index tuple at which a condition family is tightest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MelnikovIndex {
    Zeroth { ell: Vec<i64> },
    First { ell: Vec<i64>, j: usize },
    SecondSum { ell: Vec<i64>, j: usize, jp: usize },
    SecondDiff { ell: Vec<i64>, j: usize, jp: usize },
}

fn write_ell(f: &mut fmt::Formatter<'_>, ell: &[i64]) -> fmt::Result {
    write!(f, "[")?;
    for (i, l) in ell.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        write!(f, "{l}")?;
    }
    write!(f, "]")
}

impl fmt::Display for MelnikovIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zeroth { ell } => {
                write!(f, "0")?;
                write_ell(f, ell)
            }
            Self::First { ell, j } => {
                write!(f, "I")?;
                write_ell(f, ell)?;
                write!(f, " j={j}")
            }
            Self::SecondSum { ell, j, jp } => {
                write!(f, "II+")?;
                write_ell(f, ell)?;
                write!(f, " j={j} j'={jp}")
            }
            Self::SecondDiff { ell, j, jp } => {
                write!(f, "II-")?;
                write_ell(f, ell)?;
                write!(f, " j={j} j'={jp}")
            }
        }
    }
}

/// Checks, over the box |ell|_inf <= ell_max and normal sites up to
/// j_max, the conditions
///   |w.ell|               >= 8 gamma <ell>^-tau            (ell != 0),
///   |w.ell + mu_j|        >= 4 gamma j^{1/2} <ell>^-tau,
///   |w.ell + mu_j + mu_j'| >= 4 gamma (j^{1/2} + j'^{1/2}) <ell>^-tau,
///   |w.ell + mu_j - mu_j'| >= 4 gamma j^-d j'^-d <ell>^-tau
/// with (ell, j, j') != (0, j, j) in the last family.  Returns the
/// overall pass flag, the smallest margin lhs/rhs, and where it occurs.
pub fn melnikov_member(
    w: &DiophantineFrequency<f64>,
    h: f64,
    spec: &FloquetSpectrum,
    ctx: &DispersionContext,
    ell_max: usize,
    j_max: usize,
) -> (bool, f64, MelnikovIndex) {
    assert_eq!(w.nu(), ctx.nu(), "frequency dimension must match the context");
    let gamma = ctx.gamma();
    let tau = ctx.tau();
    let d = ctx.d();
    let normals = ctx.normal_sites(j_max);
    let mut worst_margin = f64::INFINITY;
    let mut worst_index = MelnikovIndex::Zeroth { ell: vec![0; ctx.nu()] };

    for ell in ell_box(ctx.nu(), ell_max) {
        let nonzero = ell.iter().any(|&v| v != 0);
        let base = gamma * DiophantineFrequency::<f64>::bracket(&ell).powf(-tau);
        let dot = w.dot(&ell);
        if nonzero {
            let margin = dot.abs() / (8.0 * base);
            if margin < worst_margin {
                worst_margin = margin;
                worst_index = MelnikovIndex::Zeroth { ell: ell.clone() };
            }
        }
        for &j in &normals {
            let sj = (j as f64).sqrt();
            let mu_j = spec.mu(j as i64, h);
            let margin = (dot + mu_j).abs() / (4.0 * base * sj);
            if margin < worst_margin {
                worst_margin = margin;
                worst_index = MelnikovIndex::First { ell: ell.clone(), j };
            }
            for &jp in &normals {
                let sp = (jp as f64).sqrt();
                let mu_p = spec.mu(jp as i64, h);
                if jp >= j {
                    let margin = (dot + mu_j + mu_p).abs() / (4.0 * base * (sj + sp));
                    if margin < worst_margin {
                        worst_margin = margin;
                        worst_index = MelnikovIndex::SecondSum { ell: ell.clone(), j, jp };
                    }
                }
                if nonzero || j != jp {
                    let rhs = 4.0 * base * (j as f64).powf(-d) * (jp as f64).powf(-d);
                    let margin = (dot + mu_j - mu_p).abs() / rhs;
                    if margin < worst_margin {
                        worst_margin = margin;
                        worst_index = MelnikovIndex::SecondDiff { ell: ell.clone(), j, jp };
                    }
                }
            }
        }
    }
    (worst_margin >= 1.0, worst_margin, worst_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn frequency(omega: Vec<f64>, gamma: f64, tau: f64) -> DiophantineFrequency<f64> {
        DiophantineFrequency::new(omega, gamma, tau, 0).unwrap()
    }

    // At depth 60 every tanh factor saturates, so the flat spectrum has
    // mu_j = sqrt(j) to machine accuracy.
    #[test]
    fn engineered_deep_water_case_passes() {
        let ctx = DispersionContext::new((50.0, 70.0), vec![1], 1e-4, 1.0, 0.25, 1).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let w = frequency(vec![golden], ctx.gamma(), ctx.tau());
        let spec = FloquetSpectrum::flat(1.0);
        assert_eq!(spec.mu(9, 60.0), 3.0);
        let (pass, margin, idx) = melnikov_member(&w, 60.0, &spec, &ctx, 3, 12);
        assert!(pass, "margin {margin} at {idx}");
        assert!(margin >= 1.0);
    }

    // Hand enumeration over the same box must reproduce the scan.
    #[test]
    fn worst_margin_matches_direct_enumeration() {
        let ctx = DispersionContext::new((0.8, 1.8), vec![1], 5e-2, 1.2, 0.3, 1).unwrap();
        let w = frequency(vec![1.37], ctx.gamma(), ctx.tau());
        let spec = FloquetSpectrum::new(1.01, vec![0.0, 0.02, -0.01]);
        let h = 1.1;
        let (_, margin, _) = melnikov_member(&w, h, &spec, &ctx, 1, 3);

        let mut best = f64::INFINITY;
        let mu = |j: i64| spec.mu(j, h);
        for l in -1i64..=1 {
            let dot = 1.37 * l as f64;
            let br = (l.abs() as f64).max(1.0);
            let base = 5e-2 * br.powf(-1.2);
            if l != 0 {
                best = best.min(dot.abs() / (8.0 * base));
            }
            for j in [2i64, 3] {
                best = best.min((dot + mu(j)).abs() / (4.0 * base * (j as f64).sqrt()));
                for jp in [2i64, 3] {
                    if jp >= j {
                        let weight = (j as f64).sqrt() + (jp as f64).sqrt();
                        best = best.min((dot + mu(j) + mu(jp)).abs() / (4.0 * base * weight));
                    }
                    if l != 0 || j != jp {
                        let rhs = 4.0 * base * (j as f64 * jp as f64).powf(-0.3);
                        best = best.min((dot + mu(j) - mu(jp)).abs() / rhs);
                    }
                }
            }
        }
        assert_relative_eq!(margin, best, max_relative = 1e-14);
    }

    // Margins scale exactly like 1/gamma, so membership is monotone as
    // gamma decreases and the worst index never moves.
    proptest! {
        #[test]
        fn margin_scales_inversely_with_gamma(
            scale in 0.05f64..0.95,
            h in 0.9f64..1.9,
        ) {
            let ctx = DispersionContext::new((0.8, 2.0), vec![1], 2e-2, 1.0, 0.25, 1).unwrap();
            let w = frequency(vec![1.3], ctx.gamma(), ctx.tau());
            let spec = FloquetSpectrum::flat(1.0);
            let (_, m0, i0) = melnikov_member(&w, h, &spec, &ctx, 2, 8);
            let tight = ctx.with_gamma(ctx.gamma() * scale).unwrap();
            let (_, m1, i1) = melnikov_member(&w, h, &spec, &tight, 2, 8);
            prop_assert_eq!(i0, i1);
            prop_assert!((m1 * scale - m0).abs() <= 1e-12 * m0.abs());
        }
    }
}
