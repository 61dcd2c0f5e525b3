//! Truncated Fourier series on the torus T^nu x T.
//!
//! A field u(phi, x) is stored by its coefficients u_{l,j} over the index box
//! |l_i| <= L_phi, |j| <= J_x.  The crate provides Sobolev norms with the
//! weight <l,j> = max(1, |l|, |j|), smoothing projectors, dyadic blocks,
//! inverses of the directional derivative w.dphi under a Diophantine
//! condition, composition with small space diffeomorphisms, and seeded
//! random probe fields.
//!
//! Everything is generic over the scalar (`f32` or `f64`); the concrete
//! aliases [`Field`] and [`Frequency`] at the crate root are what the
//! higher-level crates consume.

mod cutoff;
mod diophantine;
mod error;
mod fd;
mod field;
mod lattice;
mod probe;
mod serialize;
pub mod transform;

pub use cutoff::{chi, chi0, psi_bump, regularized_reciprocal, regularized_reciprocal_slice};
pub use diophantine::{DiophantineFrequency, DivisorMode};
pub use error::SpectralError;
pub use fd::central_derivative;
pub use field::{FourierField, Parity, PartialEval};
pub use lattice::{ModeLattice, MAX_NU};
pub use probe::{random_field, random_field_unit, ProbeOptions};
pub use serialize::{FieldJson, LatticeJson};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, Signed};
use rustfft::FftNum;
use std::iter::Sum;

/// Scalar types the spectral layer is generic over.  Implemented by `f32`
/// and `f64`; everything needed for FFTs, norms and RNG conversion.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + FftNum + Signed + NumAssign + Sum + Default
{
    fn fr(v: f64) -> Self {
        Self::from_f64(v).expect("value representable in scalar type")
    }

    fn f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + FftNum + Signed + NumAssign + Sum + Default
{
}

pub type C64 = Complex<f64>;

/// Double-precision field, the working type of the operator layers.
pub type Field = FourierField<f64>;
/// Single-precision variant, mainly exercised by tests.
pub type Field32 = FourierField<f32>;
/// Double-precision Diophantine frequency vector.
pub type Frequency = DiophantineFrequency<f64>;

/// Sobolev index s0 = floor((nu+1)/2) + 1 used as the low norm throughout.
pub fn s0(nu: usize) -> f64 {
    ((nu + 1) / 2 + 1) as f64
}
