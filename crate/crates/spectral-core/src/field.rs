use crate::lattice::{ModeLattice, MAX_NU};
use crate::transform::{fft_axes, fft_nd};
use crate::{Scalar, SpectralError};
use num_complex::Complex;

/// Parity of a function under sign flip of the phi block or of x.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Truncated Fourier series u(phi, x) = sum u_{l,j} e^{i(l.phi + j x)}.
///
/// The reality flag records that u is a real-valued function, i.e.
/// u_{-l,-j} = conj(u_{l,j}); operations preserve it where that is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField<T: Scalar> {
    lattice: ModeLattice,
    coeffs: Vec<Complex<T>>,
    real: bool,
}

impl<T: Scalar> FourierField<T> {
    pub fn zeros(lattice: &ModeLattice) -> Self {
        Self {
            coeffs: vec![Complex::default(); lattice.num_modes()],
            lattice: lattice.clone(),
            real: true,
        }
    }

    pub fn from_coeffs(
        lattice: &ModeLattice,
        coeffs: Vec<Complex<T>>,
        real: bool,
    ) -> Result<Self, SpectralError> {
        if coeffs.len() != lattice.num_modes() {
            return Err(SpectralError::InvalidParameter(format!(
                "coefficient count {} does not match lattice {}",
                coeffs.len(),
                lattice.describe()
            )));
        }
        Ok(Self {
            lattice: lattice.clone(),
            coeffs,
            real,
        })
    }

    /// Single exponential e^{i(l.phi + j x)} scaled by `amp`.
    pub fn mode(lattice: &ModeLattice, ell: &[i64], j: i64, amp: Complex<T>) -> Self {
        let mut u = Self::zeros(lattice);
        let idx = lattice
            .index_of(ell, j)
            .expect("mode inside the lattice box");
        u.coeffs[idx] = amp;
        u.real = false;
        u
    }

    /// Real cosine / sine builders: kind Even gives amp cos(l.phi + jx),
    /// Odd gives amp sin(l.phi + jx).
    pub fn trig(lattice: &ModeLattice, ell: &[i64], j: i64, amp: T, kind: Parity) -> Self {
        let mut u = Self::zeros(lattice);
        let half = amp / T::fr(2.0);
        let neg: Vec<i64> = ell.iter().map(|v| -v).collect();
        let ip = lattice.index_of(ell, j).expect("mode inside lattice");
        let im = lattice.index_of(&neg, -j).expect("mode inside lattice");
        match kind {
            Parity::Even => {
                u.coeffs[ip] += Complex::new(half, T::zero());
                u.coeffs[im] += Complex::new(half, T::zero());
            }
            Parity::Odd => {
                u.coeffs[ip] += Complex::new(T::zero(), -half);
                u.coeffs[im] += Complex::new(T::zero(), half);
            }
        }
        u.real = true;
        u
    }

    pub fn lattice(&self) -> &ModeLattice {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        self.real = false;
        &mut self.coeffs
    }

    pub fn is_real_flagged(&self) -> bool {
        self.real
    }

    pub fn set_real_flag(&mut self, real: bool) {
        self.real = real;
    }

    pub fn get(&self, ell: &[i64], j: i64) -> Complex<T> {
        self.lattice
            .index_of(ell, j)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    pub fn set(&mut self, ell: &[i64], j: i64, v: Complex<T>) {
        let idx = self.lattice.index_of(ell, j).expect("mode inside lattice");
        self.coeffs[idx] = v;
    }

    pub fn same_lattice(&self, other: &Self) -> Result<(), SpectralError> {
        if self.lattice != other.lattice {
            return Err(SpectralError::LatticeMismatch(
                self.lattice.describe(),
                other.lattice.describe(),
            ));
        }
        Ok(())
    }

    // ---- norms ----------------------------------------------------------

    /// Sobolev norm (sum |u_{lj}|^2 <l,j>^{2s})^{1/2}.
    pub fn sobolev_norm(&self, s: f64) -> T {
        let mut acc = T::zero();
        self.lattice.for_each_mode(|idx, ell, j| {
            let w = T::fr(ModeLattice::weight(ell, j).powf(2.0 * s));
            acc += self.coeffs[idx].norm_sqr() * w;
        });
        acc.sqrt()
    }

    pub fn l2_norm(&self) -> T {
        self.coeffs
            .iter()
            .map(|c| c.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_coeff(&self) -> T {
        self.coeffs
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), T::max)
    }

    /// Max modulus over the collocation grid (sup-norm surrogate).
    pub fn grid_sup(&self) -> T {
        self.grid_values()
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), T::max)
    }

    // ---- projectors and smoothings --------------------------------------

    /// Sharp projector Pi_N: zero all modes with <l,j> > N.
    pub fn project(&self, n: usize) -> Self {
        let mut out = self.clone();
        self.lattice.for_each_mode(|idx, ell, j| {
            if ModeLattice::weight(ell, j) > n as f64 {
                out.coeffs[idx] = Complex::default();
            }
        });
        out
    }

    /// Complement Pi_N^perp = Id - Pi_N.
    pub fn project_complement(&self, n: usize) -> Self {
        let mut out = self.clone();
        self.lattice.for_each_mode(|idx, ell, j| {
            if ModeLattice::weight(ell, j) <= n as f64 {
                out.coeffs[idx] = Complex::default();
            }
        });
        out
    }

    /// Dyadic smoothing S_n = Pi_{2^n}.
    pub fn dyadic_smoothing(&self, n: u32) -> Self {
        self.project(1usize << n)
    }

    /// Dyadic block: R_0 = S_1, R_n = S_{n+1} - S_n for n >= 1.
    pub fn dyadic_block(&self, n: u32) -> Self {
        if n == 0 {
            self.dyadic_smoothing(1)
        } else {
            let mut out = self.dyadic_smoothing(n + 1);
            let lower = 1usize << n;
            self.lattice.for_each_mode(|idx, ell, j| {
                if ModeLattice::weight(ell, j) <= lower as f64 {
                    out.coeffs[idx] = Complex::default();
                }
            });
            out
        }
    }

    // ---- algebra ---------------------------------------------------------

    pub fn add(&self, rhs: &Self) -> Self {
        self.same_lattice(rhs).expect("matching lattices");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            lattice: self.lattice.clone(),
            coeffs,
            real: self.real && rhs.real,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.same_lattice(rhs).expect("matching lattices");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            lattice: self.lattice.clone(),
            coeffs,
            real: self.real && rhs.real,
        }
    }

    pub fn scale(&self, k: T) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * k).collect();
        Self {
            lattice: self.lattice.clone(),
            coeffs,
            real: self.real,
        }
    }

    pub fn scale_complex(&self, k: Complex<T>) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * k).collect();
        Self {
            lattice: self.lattice.clone(),
            coeffs,
            real: false,
        }
    }

    /// Pointwise product computed on the oversampled collocation grid,
    /// then re-truncated; exact convolution within the joint truncation.
    pub fn mul(&self, rhs: &Self) -> Self {
        self.same_lattice(rhs).expect("matching lattices");
        let mut a = self.grid_buffer();
        let b = rhs.grid_buffer();
        let dims = self.lattice.grid_dims();
        fft_nd(&mut a, &dims, true);
        let mut bb = b;
        fft_nd(&mut bb, &dims, true);
        for (x, y) in a.iter_mut().zip(&bb) {
            *x = *x * *y;
        }
        let mut out = Self::analyze(&self.lattice, a);
        out.real = self.real && rhs.real;
        out
    }

    /// Map the (real parts of the) grid values through `f`; input must be
    /// real-flagged, output is real.  Used for exp, sqrt, reciprocals of
    /// coefficient fields.
    pub fn map_grid_real(&self, f: impl Fn(T) -> T) -> Self {
        let mut vals = self.grid_values();
        for v in vals.iter_mut() {
            *v = Complex::new(f(v.re), T::zero());
        }
        let mut out = Self::from_grid(&self.lattice, vals);
        out.real = true;
        out
    }

    pub fn map_grid(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let mut vals = self.grid_values();
        for v in vals.iter_mut() {
            *v = f(*v);
        }
        Self::from_grid(&self.lattice, vals)
    }

    // ---- transforms ------------------------------------------------------

    fn grid_buffer(&self) -> Vec<Complex<T>> {
        let dims = self.lattice.grid_dims();
        let total: usize = dims.iter().product();
        let mut buf = vec![Complex::default(); total];
        let l = self.lattice.l_max() as i64;
        let nu = self.lattice.nu();
        let mut ell = [0i64; MAX_NU];
        let x_grid = self.lattice.x_grid();
        let phi_grid = self.lattice.phi_grid() as i64;
        for idx in 0..self.coeffs.len() {
            let c = self.coeffs[idx];
            if c == Complex::default() {
                continue;
            }
            let j = self.lattice.mode_at(idx, &mut ell);
            let mut gi = 0usize;
            for &li in ell[..nu].iter() {
                debug_assert!(li.abs() <= l);
                let bin = li.rem_euclid(phi_grid) as usize;
                gi = gi * phi_grid as usize + bin;
            }
            let jbin = j.rem_euclid(x_grid as i64) as usize;
            buf[gi * x_grid + jbin] = c;
        }
        buf
    }

    /// Values on the collocation grid (synthesis).
    pub fn grid_values(&self) -> Vec<Complex<T>> {
        let mut buf = self.grid_buffer();
        fft_nd(&mut buf, &self.lattice.grid_dims(), true);
        buf
    }

    fn analyze(lattice: &ModeLattice, mut grid: Vec<Complex<T>>) -> Self {
        let dims = lattice.grid_dims();
        let total: usize = dims.iter().product();
        fft_nd(&mut grid, &dims, false);
        let scale = T::fr(total as f64).recip();
        let mut out = Self::zeros(lattice);
        let nu = lattice.nu();
        let phi_grid = lattice.phi_grid() as i64;
        let x_grid = lattice.x_grid() as i64;
        let mut ell = [0i64; MAX_NU];
        for idx in 0..out.coeffs.len() {
            let j = lattice.mode_at(idx, &mut ell);
            let mut gi = 0usize;
            for &li in ell[..nu].iter() {
                gi = gi * phi_grid as usize + li.rem_euclid(phi_grid) as usize;
            }
            let jbin = j.rem_euclid(x_grid) as usize;
            out.coeffs[idx] = grid[gi * x_grid as usize + jbin] * scale;
        }
        out.real = false;
        out
    }

    /// Analysis: collocation values -> truncated coefficients.
    pub fn from_grid(lattice: &ModeLattice, grid: Vec<Complex<T>>) -> Self {
        Self::analyze(lattice, grid)
    }

    /// Direct evaluation at an arbitrary point (sum over all modes).
    pub fn eval_at(&self, phi: &[T], x: T) -> Complex<T> {
        let mut acc = Complex::default();
        let mut ell = [0i64; MAX_NU];
        for idx in 0..self.coeffs.len() {
            let c = self.coeffs[idx];
            if c == Complex::default() {
                continue;
            }
            let j = self.lattice.mode_at(idx, &mut ell);
            let mut phase = T::fr(j as f64) * x;
            for (d, &li) in ell[..self.lattice.nu()].iter().enumerate() {
                phase += T::fr(li as f64) * phi[d];
            }
            acc += c * Complex::cis(phase);
        }
        acc
    }

    // ---- derivatives and averages ---------------------------------------

    /// d/dx: multiply u_{lj} by i j.
    pub fn dx(&self) -> Self {
        let mut out = self.clone();
        self.lattice.for_each_mode(|idx, _ell, j| {
            out.coeffs[idx] *= Complex::new(T::zero(), T::fr(j as f64));
        });
        out
    }

    /// d/dphi_d.
    pub fn dphi(&self, d: usize) -> Self {
        let mut out = self.clone();
        self.lattice.for_each_mode(|idx, ell, _j| {
            out.coeffs[idx] *= Complex::new(T::zero(), T::fr(ell[d] as f64));
        });
        out
    }

    /// w . dphi: multiply by i (w . l).
    pub fn omega_dphi(&self, omega: &[T]) -> Self {
        let mut out = self.clone();
        self.lattice.for_each_mode(|idx, ell, _j| {
            let mut wl = T::zero();
            for (d, &li) in ell.iter().enumerate() {
                wl += omega[d] * T::fr(li as f64);
            }
            out.coeffs[idx] *= Complex::new(T::zero(), wl);
        });
        out
    }

    /// Primitive in x on the zero-x-average part: divide by i j, drop j=0.
    pub fn dx_inv(&self) -> Self {
        let mut out = self.clone();
        self.lattice.for_each_mode(|idx, _ell, j| {
            if j == 0 {
                out.coeffs[idx] = Complex::default();
            } else {
                out.coeffs[idx] = out.coeffs[idx] / Complex::new(T::zero(), T::fr(j as f64));
            }
        });
        out
    }

    /// Average over the phi torus (keeps only l = 0 coefficients).
    pub fn phi_average(&self) -> Self {
        let mut out = self.clone();
        self.lattice.for_each_mode(|idx, ell, _j| {
            if ell.iter().any(|&l| l != 0) {
                out.coeffs[idx] = Complex::default();
            }
        });
        out
    }

    pub fn remove_phi_average(&self) -> Self {
        self.sub(&self.phi_average())
    }

    /// Average over x (keeps only j = 0).
    pub fn x_average(&self) -> Self {
        let mut out = self.clone();
        self.lattice.for_each_mode(|idx, _ell, j| {
            if j != 0 {
                out.coeffs[idx] = Complex::default();
            }
        });
        out
    }

    /// Mean over the full torus: the (0, 0) coefficient.
    pub fn mean(&self) -> Complex<T> {
        let zeros = vec![0i64; self.lattice.nu()];
        self.get(&zeros, 0)
    }

    /// Mass of the l = 0 block (diagnostic for strict phi-inversion).
    pub fn phi_average_mass(&self) -> T {
        self.phi_average().l2_norm()
    }

    // ---- symmetry operations --------------------------------------------

    /// u(-phi, x): coefficients u_{-l, j}.
    pub fn flip_phi(&self) -> Self {
        let mut out = Self::zeros(&self.lattice);
        out.real = self.real;
        self.lattice.for_each_mode(|idx, ell, j| {
            let neg: Vec<i64> = ell.iter().map(|v| -v).collect();
            let tgt = self.lattice.index_of(&neg, j).unwrap();
            out.coeffs[tgt] = self.coeffs[idx];
        });
        out
    }

    /// u(phi, -x): coefficients u_{l, -j}.
    pub fn flip_x(&self) -> Self {
        let mut out = Self::zeros(&self.lattice);
        out.real = self.real;
        self.lattice.for_each_mode(|idx, ell, j| {
            let tgt = self.lattice.index_of(ell, -j).unwrap();
            out.coeffs[tgt] = self.coeffs[idx];
        });
        out
    }

    /// The reality involution: coefficients conj(u_{-l,-j}); u is a real
    /// function iff this equals u.
    pub fn conj_reflect(&self) -> Self {
        let mut out = Self::zeros(&self.lattice);
        out.real = self.real;
        self.lattice.for_each_mode(|idx, ell, j| {
            let neg: Vec<i64> = ell.iter().map(|v| -v).collect();
            let tgt = self.lattice.index_of(&neg, -j).unwrap();
            out.coeffs[tgt] = self.coeffs[idx].conj();
        });
        out
    }

    pub fn reality_defect(&self) -> T {
        self.sub(&self.conj_reflect()).l2_norm()
    }

    pub fn symmetrize_real(&self) -> Self {
        let mut out = self.add(&self.conj_reflect()).scale(T::fr(0.5));
        out.real = true;
        out
    }

    /// L2 distance to the subspace with the given parities.
    pub fn parity_defect(&self, phi: Parity, x: Parity) -> T {
        self.sub(&self.parity_project(Some(phi), Some(x))).l2_norm()
    }

    /// Project onto the requested parity in phi and/or x.
    pub fn parity_project(&self, phi: Option<Parity>, x: Option<Parity>) -> Self {
        let mut out = self.clone();
        if let Some(p) = phi {
            let flipped = out.flip_phi();
            out = match p {
                Parity::Even => out.add(&flipped).scale(T::fr(0.5)),
                Parity::Odd => out.sub(&flipped).scale(T::fr(0.5)),
            };
        }
        if let Some(p) = x {
            let flipped = out.flip_x();
            out = match p {
                Parity::Even => out.add(&flipped).scale(T::fr(0.5)),
                Parity::Odd => out.sub(&flipped).scale(T::fr(0.5)),
            };
        }
        out
    }

    // ---- lattice embedding ----------------------------------------------

    /// Copy shared modes into a field on `target` (other modes zero).
    pub fn embed(&self, target: &ModeLattice) -> Self {
        assert_eq!(self.lattice.nu(), target.nu(), "angle count must match");
        let mut out = Self::zeros(target);
        out.real = self.real;
        self.lattice.for_each_mode(|idx, ell, j| {
            if let Some(tgt) = target.index_of(ell, j) {
                out.coeffs[tgt] = self.coeffs[idx];
            }
        });
        out
    }

    // ---- composition with x-diffeomorphisms ------------------------------

    /// u(phi, x + beta(phi, x)) resampled on the collocation grid and
    /// re-truncated.  beta = 0 returns a bit-identical copy.
    pub fn compose_x(&self, beta: &Self) -> Self {
        self.same_lattice(beta).expect("matching lattices");
        if beta.coeffs.iter().all(|c| *c == Complex::default()) {
            return self.clone();
        }
        let part = PartialEval::new(self);
        let shift = beta.grid_values();
        let dims = self.lattice.grid_dims();
        let x_grid = self.lattice.x_grid();
        let nphi: usize = dims[..self.lattice.nu()].iter().product();
        let mut vals = vec![Complex::<T>::default(); self.lattice.num_grid()];
        let two_pi = T::TAU();
        let step = two_pi / T::fr(x_grid as f64);
        for g in 0..nphi {
            for q in 0..x_grid {
                let x = T::fr(q as f64) * step;
                let b = shift[g * x_grid + q].re;
                vals[g * x_grid + q] = part.eval(g, x + b);
            }
        }
        let mut out = Self::from_grid(&self.lattice, vals);
        out.real = self.real && beta.real;
        out
    }

    /// Pointwise inverse of the diffeomorphism x -> x + beta(phi, x):
    /// returns breve with x = y + breve(phi, y).  Requires sup |beta_x| < 1.
    pub fn invert_x_diffeo(&self) -> Self {
        let beta = self;
        let part = PartialEval::new(beta);
        let dims = beta.lattice.grid_dims();
        let x_grid = beta.lattice.x_grid();
        let nphi: usize = dims[..beta.lattice.nu()].iter().product();
        let mut vals = vec![Complex::<T>::default(); beta.lattice.num_grid()];
        let two_pi = T::TAU();
        let step = two_pi / T::fr(x_grid as f64);
        let tol = T::fr(1e-13).max(T::epsilon() * T::fr(16.0));
        for g in 0..nphi {
            for q in 0..x_grid {
                let y = T::fr(q as f64) * step;
                let mut x = y;
                for _ in 0..60 {
                    let f = x + part.eval(g, x).re - y;
                    if f.abs() <= tol {
                        break;
                    }
                    let fp = T::one() + part.eval_dx(g, x).re;
                    x = x - f / fp;
                }
                vals[g * x_grid + q] = Complex::new(x - y, T::zero());
            }
        }
        let mut out = Self::from_grid(&beta.lattice, vals);
        out.real = beta.real;
        out
    }
}

/// Coefficients in x at each phi collocation point: c_j(phi_g).  Supports
/// evaluation at arbitrary x, which is what compositions and the
/// characteristic flow need.
pub struct PartialEval<T: Scalar> {
    x_modes: usize,
    j_max: i64,
    /// [n_phi, 2J+1] row-major, slot (g, j + J)
    data: Vec<Complex<T>>,
}

impl<T: Scalar> PartialEval<T> {
    pub fn new(u: &FourierField<T>) -> Self {
        let lat = u.lattice();
        let nu = lat.nu();
        let phi_grid = lat.phi_grid();
        let x_modes = lat.x_modes();
        let mut dims: Vec<usize> = vec![phi_grid; nu];
        dims.push(x_modes);
        let total: usize = dims.iter().product();
        let mut buf = vec![Complex::<T>::default(); total];
        let mut ell = [0i64; MAX_NU];
        for idx in 0..u.coeffs().len() {
            let c = u.coeffs()[idx];
            if c == Complex::default() {
                continue;
            }
            let j = lat.mode_at(idx, &mut ell);
            let mut gi = 0usize;
            for &li in ell[..nu].iter() {
                gi = gi * phi_grid + li.rem_euclid(phi_grid as i64) as usize;
            }
            buf[gi * x_modes + (j + lat.j_max() as i64) as usize] = c;
        }
        let axes: Vec<usize> = (0..nu).collect();
        fft_axes(&mut buf, &dims, &axes, true);
        Self {
            x_modes,
            j_max: lat.j_max() as i64,
            data: buf,
        }
    }

    /// Number of phi grid rows.
    pub fn rows(&self) -> usize {
        self.data.len() / self.x_modes
    }

    pub fn eval(&self, phi_row: usize, x: T) -> Complex<T> {
        let base = phi_row * self.x_modes;
        let mut acc = Complex::default();
        for s in 0..self.x_modes {
            let c = self.data[base + s];
            if c == Complex::default() {
                continue;
            }
            let j = s as i64 - self.j_max;
            acc += c * Complex::cis(T::fr(j as f64) * x);
        }
        acc
    }

    pub fn eval_dx(&self, phi_row: usize, x: T) -> Complex<T> {
        let base = phi_row * self.x_modes;
        let mut acc = Complex::default();
        for s in 0..self.x_modes {
            let c = self.data[base + s];
            if c == Complex::default() {
                continue;
            }
            let j = s as i64 - self.j_max;
            let jj = T::fr(j as f64);
            acc += c * Complex::new(T::zero(), jj) * Complex::cis(jj * x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> ModeLattice {
        ModeLattice::new(1, 4, 4).unwrap()
    }

    #[test]
    fn grid_roundtrip_is_identity() {
        let lattice = lat();
        let mut u = FourierField::<f64>::zeros(&lattice);
        u.set(&[2], -3, num_complex::Complex::new(0.3, -1.1));
        u.set(&[0], 1, num_complex::Complex::new(-2.0, 0.4));
        let v = FourierField::from_grid(&lattice, u.grid_values());
        assert!(u.sub(&v).l2_norm() < 1e-13 * u.l2_norm());
    }

    #[test]
    fn compose_with_zero_shift_is_exact_identity() {
        let lattice = lat();
        let u = FourierField::<f64>::trig(&lattice, &[1], 2, 0.7, Parity::Even);
        let z = FourierField::zeros(&lattice);
        assert_eq!(u.compose_x(&z), u);
    }

    #[test]
    fn diffeo_inverse_consistency() {
        let lattice = ModeLattice::new(1, 6, 6).unwrap();
        let beta = FourierField::<f64>::trig(&lattice, &[1], 1, 0.05, Parity::Even);
        let breve = beta.invert_x_diffeo();
        // x + beta(phi, y + breve(phi, y)) should reproduce -breve
        let composed = beta.compose_x(&breve);
        let resid = composed.add(&breve).l2_norm();
        assert!(resid < 1e-11, "resid = {resid:e}");
    }
}
