use crate::block::BlockOperator;
use crate::dense::C64;
use crate::PsdoError;
use num_complex::Complex;
use spectral_core::transform::fft_nd;
use spectral_core::{chi, Field, ModeLattice, MAX_NU};
use std::sync::Arc;

type Gen = Arc<dyn Fn(&[f64], f64, f64) -> C64 + Send + Sync>;

/// Standard Fourier multipliers: the smooth cutoff chi tapers every symbol
/// to zero near xi = 0, so values at the integer frequencies are exact
/// (chi(j) = 1 for |j| >= 1, chi(0) = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MultiplierKind {
    /// chi(xi) |xi|^m
    AbsDPow(f64),
    /// pi0 + chi(xi) |xi|^m
    AngleDPow(f64),
    /// tanh(h |xi| chi-regularized) = 1 + r_h(xi)
    TanhHD,
    /// (1 + r_h)^r
    TanhHDPow(f64),
    /// 1 - chi(xi): projection onto the x-average at integer frequencies
    Pi0,
    /// -i sign(xi) chi(xi)
    Hilbert,
}

fn multiplier_value(kind: MultiplierKind, h: f64, xi: f64) -> C64 {
    let c = chi(xi);
    match kind {
        MultiplierKind::AbsDPow(m) => {
            if c == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                C64::new(c * xi.abs().powf(m), 0.0)
            }
        }
        MultiplierKind::AngleDPow(m) => {
            let lead = if c == 0.0 { 0.0 } else { c * xi.abs().powf(m) };
            C64::new(1.0 - c + lead, 0.0)
        }
        MultiplierKind::TanhHD => C64::new(1.0 + r_h(h, xi), 0.0),
        MultiplierKind::TanhHDPow(r) => C64::new((1.0 + r_h(h, xi)).powf(r), 0.0),
        MultiplierKind::Pi0 => C64::new(1.0 - c, 0.0),
        MultiplierKind::Hilbert => C64::new(0.0, -xi.signum() * c),
    }
}

/// r_h(xi) = -2 / (1 + e^{2 h |xi| chi(xi)}); tanh(h|D|) = Id + Op(r_h).
pub fn r_h(h: f64, xi: f64) -> f64 {
    -2.0 / (1.0 + (2.0 * h * xi.abs() * chi(xi)).exp())
}

fn multiplier_order(kind: MultiplierKind) -> f64 {
    match kind {
        MultiplierKind::AbsDPow(m) => m,
        MultiplierKind::AngleDPow(m) => m.max(0.0),
        _ => 0.0,
    }
}

/// Symbol a(phi, x, xi) sampled on the collocation grid at the integer
/// frequencies xi = j of the lattice.  Symbols built from closed forms
/// carry their generator along, which lets padded quantization resample
/// them exactly.
#[derive(Clone)]
pub struct Symbol {
    lattice: ModeLattice,
    order: f64,
    /// values[g * (2J+1) + (j + J)]
    values: Vec<C64>,
    gen: Option<Gen>,
}

impl std::fmt::Debug for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Symbol")
            .field("lattice", &self.lattice.describe())
            .field("order", &self.order)
            .field("has_gen", &self.gen.is_some())
            .finish()
    }
}

impl Symbol {

    pub fn from_fn(
        lattice: &ModeLattice,
        order: f64,
        f: impl Fn(&[f64], f64, f64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        let gen: Gen = Arc::new(f);
        Self::from_gen(lattice, order, gen)
    }

    fn from_gen(lattice: &ModeLattice, order: f64, gen: Gen) -> Self {
        let slots = lattice.x_modes();
        let ngrid = lattice.num_grid();
        let mut values = vec![C64::new(0.0, 0.0); ngrid * slots];
        let nu = lattice.nu();
        let np = lattice.phi_grid();
        let nx = lattice.x_grid();
        let tau = 2.0 * std::f64::consts::PI;
        let mut phi = [0.0f64; MAX_NU];
        let nphi_rows = ngrid / nx;
        for g in 0..nphi_rows {
            let mut rem = g;
            for d in (0..nu).rev() {
                phi[d] = tau * (rem % np) as f64 / np as f64;
                rem /= np;
            }
            for q in 0..nx {
                let x = tau * q as f64 / nx as f64;
                let base = (g * nx + q) * slots;
                for s in 0..slots {
                    let xi = s as i64 - lattice.j_max() as i64;
                    values[base + s] = gen(&phi[..nu], x, xi as f64);
                }
            }
        }
        Self {
            lattice: lattice.clone(),
            order,
            values,
            gen: Some(gen),
        }
    }

    pub fn multiplier(lattice: &ModeLattice, kind: MultiplierKind, h: f64) -> Self {
        if matches!(kind, MultiplierKind::TanhHD | MultiplierKind::TanhHDPow(_)) {
            assert!(h > 0.0, "depth must be positive");
        }
        Self::from_fn(lattice, multiplier_order(kind), move |_phi, _x, xi| {
            multiplier_value(kind, h, xi)
        })
    }

    /// Multiplication operator symbol a(phi, x, xi) = f(phi, x).  No
    /// generator is stored: resampling through the coefficient box is
    /// already exact for multiplication symbols.
    pub fn from_field(f: &Field) -> Self {
        let lat = f.lattice();
        let slots = lat.x_modes();
        let grid = f.grid_values();
        let mut values = vec![C64::new(0.0, 0.0); grid.len() * slots];
        for (g, v) in grid.iter().enumerate() {
            for s in 0..slots {
                values[g * slots + s] = *v;
            }
        }
        Self {
            lattice: lat.clone(),
            order: 0.0,
            values,
            gen: None,
        }
    }

    pub fn from_values(lattice: &ModeLattice, order: f64, values: Vec<C64>) -> Self {
        assert_eq!(
            values.len(),
            lattice.num_grid() * lattice.x_modes(),
            "value count must be grid x slots"
        );
        Self {
            lattice: lattice.clone(),
            order,
            values,
            gen: None,
        }
    }

    pub fn lattice(&self) -> &ModeLattice {
        &self.lattice
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn with_order(mut self, order: f64) -> Self {
        self.order = order;
        self
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// The slice a(., ., j) as grid values.
    pub fn slice(&self, j: i64) -> Vec<C64> {
        let slots = self.lattice.x_modes();
        let s = (j + self.lattice.j_max() as i64) as usize;
        assert!(s < slots, "frequency outside lattice");
        self.values.iter().skip(s).step_by(slots).copied().collect()
    }

    fn slice_clamped(&self, j: i64) -> Vec<C64> {
        let jm = self.lattice.j_max() as i64;
        self.slice(j.clamp(-jm, jm))
    }

    /// sup_j sup_grid |a(., ., j)| <j>^{-m}: finiteness diagnostic for
    /// membership in the declared order class.
    pub fn decay_diagnostic(&self) -> f64 {
        let jm = self.lattice.j_max() as i64;
        let mut worst = 0.0f64;
        for j in -jm..=jm {
            let w = (j.abs().max(1) as f64).powf(-self.order);
            let sup = self
                .slice(j)
                .iter()
                .fold(0.0f64, |acc, v| acc.max(v.norm()));
            worst = worst.max(sup * w);
        }
        worst
    }

    // ---- pointwise algebra ----------------------------------------------

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.lattice, rhs.lattice);
        let values = self
            .values
            .iter()
            .zip(&rhs.values)
            .map(|(a, b)| a + b)
            .collect();
        let gen = match (&self.gen, &rhs.gen) {
            (Some(f), Some(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Some(Arc::new(move |p: &[f64], x: f64, xi: f64| f(p, x, xi) + g(p, x, xi)) as Gen)
            }
            _ => None,
        };
        Self {
            lattice: self.lattice.clone(),
            order: self.order.max(rhs.order),
            values,
            gen,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.lattice, rhs.lattice);
        let values = self
            .values
            .iter()
            .zip(&rhs.values)
            .map(|(a, b)| a * b)
            .collect();
        let gen = match (&self.gen, &rhs.gen) {
            (Some(f), Some(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Some(Arc::new(move |p: &[f64], x: f64, xi: f64| f(p, x, xi) * g(p, x, xi)) as Gen)
            }
            _ => None,
        };
        Self {
            lattice: self.lattice.clone(),
            order: self.order + rhs.order,
            values,
            gen,
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        let values = self.values.iter().map(|v| v * k).collect();
        let gen = self.gen.as_ref().map(|f| {
            let f = f.clone();
            Arc::new(move |p: &[f64], x: f64, xi: f64| f(p, x, xi) * k) as Gen
        });
        Self {
            lattice: self.lattice.clone(),
            order: self.order,
            values,
            gen,
        }
    }

    // ---- derivatives -----------------------------------------------------

    /// d/dx per slice, spectrally on the collocation grid.
    pub fn x_derivative(&self) -> Self {
        let slots = self.lattice.x_modes();
        let dims = self.lattice.grid_dims();
        let ngrid: usize = dims.iter().product();
        let nx = *dims.last().unwrap();
        let mut out = self.clone();
        out.gen = None;
        for s in 0..slots {
            let mut buf: Vec<C64> = self.values.iter().skip(s).step_by(slots).copied().collect();
            fft_nd(&mut buf, &dims, false);
            let scale = 1.0 / ngrid as f64;
            for (g, v) in buf.iter_mut().enumerate() {
                let bin = g % nx;
                let freq = if bin <= nx / 2 {
                    bin as i64
                } else {
                    bin as i64 - nx as i64
                };
                *v *= C64::new(0.0, freq as f64) * scale;
            }
            fft_nd(&mut buf, &dims, true);
            for (g, v) in buf.into_iter().enumerate() {
                out.values[g * slots + s] = v;
            }
        }
        out
    }

    /// d/dxi by centered differences on the integer grid, one-sided at the
    /// band edges.
    pub fn xi_derivative(&self) -> Self {
        let slots = self.lattice.x_modes();
        let ngrid = self.values.len() / slots;
        let mut out = self.clone();
        out.gen = None;
        out.order = self.order - 1.0;
        for g in 0..ngrid {
            let base = g * slots;
            let a = &self.values[base..base + slots];
            let d = &mut out.values[base..base + slots];
            for s in 0..slots {
                d[s] = if s == 0 {
                    (a[2] - a[1] * 4.0 + a[0] * 3.0) * (-0.5)
                } else if s == slots - 1 {
                    (a[s - 2] - a[s - 1] * 4.0 + a[s] * 3.0) * 0.5
                } else {
                    (a[s + 1] - a[s - 1]) * 0.5
                };
            }
        }
        out
    }

    pub fn xi_derivative_k(&self, k: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.xi_derivative();
        }
        out
    }

    // ---- quantization ----------------------------------------------------

    /// Analyze each slice, then place A_{(l,j),(l',j')} = slice_{j'} at
    /// frequency (l - l', j - j').
    pub fn quantize(&self) -> BlockOperator {
        let lat = &self.lattice;
        let slots = lat.x_modes();
        let n = lat.num_modes();
        let mut op = BlockOperator::zeros(lat);
        let mut row_ell = [0i64; MAX_NU];
        let mut col_ell = [0i64; MAX_NU];
        let nu = lat.nu();
        for s in 0..slots {
            let jp = s as i64 - lat.j_max() as i64;
            let hat = Field::from_grid(lat, self.slice(jp));
            let mut col = s;
            while col < n {
                let cj = lat.mode_at(col, &mut col_ell);
                debug_assert_eq!(cj, jp);
                for row in 0..n {
                    let rj = lat.mode_at(row, &mut row_ell);
                    let mut diff = [0i64; MAX_NU];
                    for d in 0..nu {
                        diff[d] = row_ell[d] - col_ell[d];
                    }
                    let c = hat.get(&diff[..nu], rj - cj);
                    if c != Complex::new(0.0, 0.0) {
                        op.matrix_mut()[(row, col)] = c;
                    }
                }
                col += slots;
            }
        }
        op
    }

    /// Resample onto another lattice: exact through the generator when one
    /// is present, otherwise trigonometric resampling in (phi, x) with
    /// nearest-slot extension in xi.
    pub fn resample(&self, target: &ModeLattice) -> Self {
        if let Some(gen) = &self.gen {
            return Self::from_gen(target, self.order, gen.clone());
        }
        let slots_t = target.x_modes();
        let ngrid_t = target.num_grid();
        let mut values = vec![C64::new(0.0, 0.0); ngrid_t * slots_t];
        for s in 0..slots_t {
            let jt = s as i64 - target.j_max() as i64;
            let src = Field::from_grid(&self.lattice, self.slice_clamped(jt));
            let grid = src.embed(target).grid_values();
            for (g, v) in grid.into_iter().enumerate() {
                values[g * slots_t + s] = v;
            }
        }
        Self {
            lattice: target.clone(),
            order: self.order,
            values,
            gen: None,
        }
    }

    /// Operator product Op(a) Op(b) computed on an internally padded
    /// lattice and restricted back, so band-limited factors compose
    /// without truncation edge effects.
    pub fn compose_operators(a: &Self, b: &Self, pad: usize) -> BlockOperator {
        assert_eq!(a.lattice, b.lattice);
        let lat = &a.lattice;
        if pad == 0 {
            return a.quantize().compose(&b.quantize());
        }
        let padded =
            ModeLattice::new(lat.nu(), lat.l_max() + pad, lat.j_max() + pad).expect("padded lattice");
        let ap = a.resample(&padded).quantize();
        let bp = b.resample(&padded).quantize();
        ap.compose(&bp).restrict_to(lat)
    }

    /// Truncated composition symbol sum_{beta < n_terms} (1/(i^beta beta!))
    /// d_xi^beta a . d_x^beta b, plus the exact remainder operator
    /// R = Op(a) Op(b) - Op(sigma) on the nominal lattice.
    pub fn compose(a: &Self, b: &Self, n_terms: usize, pad: usize) -> Result<(Self, BlockOperator), PsdoError> {
        if n_terms == 0 {
            return Err(PsdoError::InvalidParameter("need at least one term".into()));
        }
        if n_terms > 4 {
            return Err(PsdoError::InvalidParameter(format!(
                "xi-stencil supports up to 4 expansion terms, requested {n_terms}"
            )));
        }
        let mut sigma: Option<Symbol> = None;
        let mut a_xi = a.clone();
        let mut b_x = b.clone();
        let mut factorial = 1.0f64;
        for beta in 0..n_terms {
            if beta > 0 {
                a_xi = a_xi.xi_derivative();
                b_x = b_x.x_derivative();
                factorial *= beta as f64;
            }
            // 1/(i^beta beta!) = (-i)^beta / beta!
            let coef = C64::new(0.0, -1.0).powi(beta as i32) / factorial;
            let term = a_xi.mul(&b_x).scale(coef);
            sigma = Some(match sigma {
                None => term,
                Some(s) => s.add(&term),
            });
        }
        let mut sigma = sigma.unwrap();
        sigma.order = a.order + b.order;
        let product = Self::compose_operators(a, b, pad);
        let remainder = product.sub(&sigma.quantize());
        Ok((sigma, remainder))
    }

    /// {a, b} = d_xi a . d_x b - d_x a . d_xi b.
    pub fn poisson_bracket(a: &Self, b: &Self) -> Self {
        assert_eq!(a.lattice, b.lattice);
        let mut out = a
            .xi_derivative()
            .mul(&b.x_derivative())
            .add(&a.x_derivative().mul(&b.xi_derivative()).scale(C64::new(-1.0, 0.0)));
        out.order = a.order + b.order - 1.0;
        out
    }

    /// max_{0<=beta<=alpha} sup_j || d_xi^beta a(.,.,j) ||_s <j>^{beta - m}.
    pub fn psdo_norm(&self, m: f64, s: f64, alpha: usize) -> f64 {
        assert!(alpha <= 3, "xi-stencil supports alpha <= 3");
        let jm = self.lattice.j_max() as i64;
        let mut worst = 0.0f64;
        let mut d = self.clone();
        for beta in 0..=alpha {
            if beta > 0 {
                d = d.xi_derivative();
            }
            for j in -jm..=jm {
                let slice_norm = Field::from_grid(&self.lattice, d.slice(j)).sobolev_norm(s);
                let w = (j.abs().max(1) as f64).powf(beta as f64 - m);
                worst = worst.max(slice_norm * w);
            }
        }
        worst
    }

    /// Kernel of the x-averaged symbol: K(phi_g, z_q) = (1/2pi) sum_j
    /// abar(phi_g, j) e^{i j z_q} on the collocation grid.
    pub fn kernel_x_average(&self) -> Vec<Vec<C64>> {
        let slots = self.lattice.x_modes();
        let nx = self.lattice.x_grid();
        let nrows = self.lattice.num_grid() / nx;
        let jm = self.lattice.j_max() as i64;
        let tau = 2.0 * std::f64::consts::PI;
        let mut out = Vec::with_capacity(nrows);
        for g in 0..nrows {
            let mut avg = vec![C64::new(0.0, 0.0); slots];
            for q in 0..nx {
                let base = (g * nx + q) * slots;
                for s in 0..slots {
                    avg[s] += self.values[base + s];
                }
            }
            for v in avg.iter_mut() {
                *v /= nx as f64;
            }
            let mut row = Vec::with_capacity(nx);
            for q in 0..nx {
                let z = tau * q as f64 / nx as f64;
                let mut acc = C64::new(0.0, 0.0);
                for (s, &g_val) in avg.iter().enumerate() {
                    let j = s as i64 - jm;
                    acc += g_val * Complex::cis(j as f64 * z);
                }
                row.push(acc / tau);
            }
            out.push(row);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::Parity;

    #[test]
    fn constant_symbol_quantizes_to_identity() {
        let lat = ModeLattice::new(1, 2, 3).unwrap();
        let one = Symbol::from_fn(&lat, 0.0, |_, _, _| C64::new(1.0, 0.0));
        let op = one.quantize();
        let id = BlockOperator::identity(&lat);
        assert!(op.sub(&id).max_entry() < 1e-14);
    }

    #[test]
    fn hilbert_multiplier_signs() {
        let lat = ModeLattice::new(1, 2, 4).unwrap();
        let h = Symbol::multiplier(&lat, MultiplierKind::Hilbert, 1.0);
        let op = h.quantize();
        let u = Field::mode(&lat, &[0], 3, C64::new(1.0, 0.0));
        let v = op.apply(&u);
        assert!((v.get(&[0], 3) - C64::new(0.0, -1.0)).norm() < 1e-14);
        let c = Field::mode(&lat, &[0], 0, C64::new(1.0, 0.0));
        assert!(op.apply(&c).l2_norm() < 1e-14);
    }

    #[test]
    fn shift_symbol_matrix() {
        let lat = ModeLattice::new(1, 1, 3).unwrap();
        let e = Symbol::from_fn(&lat, 0.0, |_, x, _| Complex::cis(x));
        let op = e.quantize();
        let u = Field::mode(&lat, &[0], 1, C64::new(1.0, 0.0));
        let v = op.apply(&u);
        assert!((v.get(&[0], 2) - C64::new(1.0, 0.0)).norm() < 1e-13);
        assert!((v.l2_norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn pinned_tanh_remainder_value() {
        assert!((r_h(1.0, 1.0) - (-0.2384058440442351)).abs() < 1e-15);
    }

    #[test]
    fn multiplication_composition_has_zero_remainder() {
        let lat = ModeLattice::new(1, 3, 6).unwrap();
        let a = Symbol::from_field(&Field::trig(&lat, &[1], 1, 0.3, Parity::Even));
        let b = Symbol::multiplier(&lat, MultiplierKind::AbsDPow(0.5), 1.0);
        let (sigma, remainder) = Symbol::compose(&a, &b, 1, 2).unwrap();
        assert!(remainder.max_entry() < 1e-13, "edge defect {:e}", remainder.max_entry());
        let direct = a.mul(&b);
        let diff: f64 = sigma
            .values()
            .iter()
            .zip(direct.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn commutator_of_derivative_and_shift() {
        // [d/dx, e^{ix}] = i e^{ix}, with d/dx = Op(i xi)
        let lat = ModeLattice::new(1, 1, 5).unwrap();
        let dx = Symbol::from_fn(&lat, 1.0, |_, _, xi| C64::new(0.0, xi));
        let e = Symbol::from_fn(&lat, 0.0, |_, x, _| Complex::cis(x));
        let ab = Symbol::compose_operators(&dx, &e, 2);
        let ba = Symbol::compose_operators(&e, &dx, 2);
        let comm = ab.sub(&ba);
        let shifted = e.quantize().scale(C64::new(0.0, 1.0));
        assert!(comm.sub(&shifted).max_entry() < 1e-12);
    }

    #[test]
    fn poisson_bracket_of_xi_with_x_function() {
        let lat = ModeLattice::new(1, 2, 6).unwrap();
        let xi = Symbol::from_fn(&lat, 1.0, |_, _, xi| C64::new(xi, 0.0));
        let ax = Symbol::from_field(&Field::trig(&lat, &[0], 2, 1.0, Parity::Even));
        let pb = Symbol::poisson_bracket(&xi, &ax);
        // {xi, a(x)} = a'(x) = -2 sin(2x)
        let expect = Symbol::from_field(&Field::trig(&lat, &[0], 2, -2.0, Parity::Odd));
        let diff: f64 = pb
            .values()
            .iter()
            .zip(expect.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
        let bb = Symbol::poisson_bracket(&ax, &ax);
        assert!(bb.values().iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-14);
    }

    #[test]
    fn norm_of_multiplication_symbol_matches_field_norm() {
        let lat = ModeLattice::new(1, 3, 3).unwrap();
        let f = Field::trig(&lat, &[2], 1, 0.7, Parity::Even);
        let a = Symbol::from_field(&f);
        let s = 1.5;
        assert!((a.psdo_norm(0.0, s, 2) - f.sobolev_norm(s)).abs() < 1e-12);
        let zero = Symbol::from_values(
            &lat,
            0.0,
            vec![C64::new(0.0, 0.0); a.values().len()],
        );
        assert_eq!(zero.psdo_norm(0.0, s, 2), 0.0);
    }

    #[test]
    fn fourier_multiplier_norm_is_s_independent() {
        let lat = ModeLattice::new(1, 3, 8).unwrap();
        let g = Symbol::multiplier(&lat, MultiplierKind::AbsDPow(0.5), 1.0);
        let n1 = g.psdo_norm(0.5, 1.0, 2);
        let n2 = g.psdo_norm(0.5, 3.5, 2);
        assert!((n1 - n2).abs() < 1e-12 * n1.max(1.0));
    }
}
