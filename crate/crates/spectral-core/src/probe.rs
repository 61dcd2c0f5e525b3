use crate::field::{FourierField, Parity};
use crate::lattice::ModeLattice;
use crate::Scalar;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Recipe for seeded random probe fields.
#[derive(Debug, Clone, Copy)]
pub struct ProbeOptions {
    /// Coefficient magnitudes scale like <l,j>^-decay.
    pub decay: f64,
    pub real: bool,
    pub zero_phi_average: bool,
    pub parity_phi: Option<Parity>,
    pub parity_x: Option<Parity>,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            decay: 2.0,
            real: true,
            zero_phi_average: false,
            parity_phi: None,
            parity_x: None,
        }
    }
}

/// Deterministic random field: complex Gaussian coefficients with the
/// requested decay, then symmetrized to match the requested structure.
pub fn random_field<T: Scalar>(
    lattice: &ModeLattice,
    seed: u64,
    opts: &ProbeOptions,
) -> FourierField<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = FourierField::zeros(lattice);
    {
        let coeffs = u.coeffs_mut();
        let mut draw = |w: f64| -> Complex<T> {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex::new(T::fr(re * w), T::fr(im * w))
        };
        let mut idx = 0usize;
        lattice.for_each_mode(|_, ell, j| {
            let w = ModeLattice::weight(ell, j).powf(-opts.decay);
            coeffs[idx] = draw(w);
            idx += 1;
        });
    }
    if opts.real {
        u = u.symmetrize_real();
    }
    u = u.parity_project(opts.parity_phi, opts.parity_x);
    if opts.zero_phi_average {
        u = u.remove_phi_average();
    }
    u
}

/// Probe normalized to unit Sobolev norm at index `s` (zero fields kept).
pub fn random_field_unit<T: Scalar>(
    lattice: &ModeLattice,
    seed: u64,
    opts: &ProbeOptions,
    s: f64,
) -> FourierField<T> {
    let u = random_field(lattice, seed, opts);
    let n: T = u.sobolev_norm(s);
    if n > T::zero() {
        u.scale(n.recip())
    } else {
        u
    }
}
