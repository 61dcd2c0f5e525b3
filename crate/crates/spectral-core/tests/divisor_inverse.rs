use num_complex::Complex;
use proptest::prelude::*;
use spectral_core::{
    random_field, DivisorMode, Field, Frequency, ModeLattice, Parity, ProbeOptions, SpectralError,
};

#[test]
fn inverse_of_cosine_is_scaled_sine() {
    let lat = ModeLattice::new(1, 4, 3).unwrap();
    let w = Frequency::fitted(vec![1.7], 1.0, 8).unwrap();
    let u = Field::trig(&lat, &[1], 2, 1.0, Parity::Even);
    let v = w.invert(&u, DivisorMode::Strict).unwrap();
    let expect = Field::trig(&lat, &[1], 2, 1.0 / 1.7, Parity::Odd);
    assert!(v.sub(&expect).l2_norm() < 1e-15);
}

#[test]
fn strict_mode_reports_average_mass() {
    let lat = ModeLattice::new(1, 4, 3).unwrap();
    let w = Frequency::default_for(1, 4).unwrap();
    let mut u = Field::trig(&lat, &[1], 1, 1.0, Parity::Even);
    u.set(&[0], 2, Complex::new(0.25, 0.0));
    match w.invert(&u, DivisorMode::Strict) {
        Err(SpectralError::NonZeroPhiAverage { mass }) => {
            assert!((mass - 0.25).abs() < 1e-13);
        }
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn extended_mode_zeroes_below_threshold() {
    // omega = (1, 0.601) certified only on the box |l| <= 2; the mode
    // l = (-3, 5) has divisor 0.005 <= gamma <l>^-tau / 3 and must be
    // annihilated, while (1, -1) is far from resonance and inverted as in
    // strict mode.
    let w = Frequency::new(vec![1.0, 0.601], 0.601, 1.0, 2).unwrap();
    let lat = ModeLattice::new(2, 5, 1).unwrap();
    let mut u = Field::zeros(&lat);
    u.set(&[-3, 5], 0, Complex::new(1.0, 0.0));
    u.set(&[1, -1], 0, Complex::new(1.0, 0.0));
    let v = w.invert(&u, DivisorMode::Extended).unwrap();
    assert_eq!(v.get(&[-3, 5], 0), Complex::new(0.0, 0.0));
    let d = 1.0 - 0.601;
    let expect = Complex::new(0.0, -1.0 / d);
    assert!((v.get(&[1, -1], 0) - expect).norm() < 1e-13);
}

#[test]
fn extended_mode_handles_exact_resonance() {
    let w = Frequency::new(vec![1.0, 0.6], 0.6, 1.0, 2).unwrap();
    let lat = ModeLattice::new(2, 5, 1).unwrap();
    let u = Field::mode(&lat, &[-3, 5], 0, Complex::new(2.0, 1.0));
    let v = w.invert(&u, DivisorMode::Extended).unwrap();
    assert_eq!(v.l2_norm(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn forward_of_strict_inverse_is_identity(seed in any::<u64>()) {
        let lat = ModeLattice::new(2, 6, 4).unwrap();
        let w = Frequency::default_for(2, 6).unwrap();
        let opts = ProbeOptions { zero_phi_average: true, ..ProbeOptions::default() };
        let u: Field = random_field(&lat, seed, &opts);
        let v = w.invert(&u, DivisorMode::Strict).unwrap();
        let resid = w.forward(&v).sub(&u).sobolev_norm(1.0);
        prop_assert!(resid <= 1e-12 * u.sobolev_norm(1.0));
    }

    #[test]
    fn certified_frequency_makes_modes_agree(seed in any::<u64>()) {
        // gamma is fitted over the full active box, so every divisor is at
        // least gamma <l>^-tau and the cutoff sits in its plateau
        let lat = ModeLattice::new(1, 8, 4).unwrap();
        let w = Frequency::default_for(1, 8).unwrap();
        let opts = ProbeOptions { zero_phi_average: true, ..ProbeOptions::default() };
        let u: Field = random_field(&lat, seed, &opts);
        let a = w.invert(&u, DivisorMode::Strict).unwrap();
        let b = w.invert(&u, DivisorMode::Extended).unwrap();
        prop_assert!(a.sub(&b).l2_norm() <= 1e-15 * a.l2_norm());
    }
}
