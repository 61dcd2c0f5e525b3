//! Scan artifacts: CSV membership sweeps and the JSON summary shape.

use crate::context::{DispersionContext, FloquetSpectrum};
use crate::melnikov::melnikov_member;
use serde::Serialize;
use spectral_core::DiophantineFrequency;
use std::io::{self, Write};

/// Summary block shared by the command-line tools.
#[derive(Clone, Debug, Serialize)]
pub struct ScanSummary {
    pub rho0: f64,
    pub k_star: usize,
    pub measure: f64,
    pub gamma: f64,
}

/// One `h,worst_margin,worst_index` line per depth sample, midpoint
/// grid over the window, unperturbed tangential frequencies.
pub fn membership_scan_csv<W: Write>(
    out: &mut W,
    ctx: &DispersionContext,
    spec_of_h: impl Fn(f64) -> FloquetSpectrum,
    samples: usize,
    ell_max: usize,
    j_max: usize,
) -> io::Result<()> {
    writeln!(out, "h,worst_margin,worst_index")?;
    let (h1, h2) = ctx.h_range();
    for s in 0..samples {
        let h = h1 + (h2 - h1) * (s as f64 + 0.5) / samples as f64;
        let w = DiophantineFrequency::new(ctx.omega_vec(h), ctx.gamma(), ctx.tau(), 0)
            .expect("context constants are validated");
        let (_, margin, idx) = melnikov_member(&w, h, &spec_of_h(h), ctx, ell_max, j_max);
        writeln!(out, "{h:.12e},{margin:.12e},{idx}")?;
    }
    Ok(())
}
