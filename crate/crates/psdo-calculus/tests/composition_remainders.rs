use psdo_calculus::{BlockOperator, MultiplierKind, Symbol, C64};
use spectral_core::{Field, ModeLattice, Parity};

fn weight_pow(lat: &ModeLattice, p: f64) -> BlockOperator {
    BlockOperator::from_x_multiplier(lat, move |j| {
        C64::new((j.unsigned_abs() as f64).max(1.0).powf(p), 0.0)
    })
}

/// a = (1 + 0.1 cos x) chi(xi) |xi|^{1/2}, b = chi(xi) |xi|^{1/2}
fn half_order_pair(lat: &ModeLattice) -> (Symbol, Symbol) {
    let b = Symbol::multiplier(lat, MultiplierKind::AbsDPow(0.5), 1.0);
    let f = Symbol::from_fn(lat, 0.0, |_phi, x, _xi| C64::new(1.0 + 0.1 * x.cos(), 0.0));
    (f.mul(&b), b)
}

#[test]
fn remainder_order_stays_bounded() {
    let lat = ModeLattice::new(1, 4, 16).unwrap();
    let (a, b) = half_order_pair(&lat);
    // remainder of the N-term expansion has order 1 - N; weighting by
    // <D>^{N-1} on the input side should give comparable norms across N
    for n in 1..=3usize {
        let w = weight_pow(&lat, n as f64 - 1.0);

        // x-independent right factor: every correction term vanishes and
        // the remainder is zero to roundoff
        let (_sym, rem) = Symbol::compose(&a, &b, n, 4).unwrap();
        let exact = rem.compose(&w).op_norm();
        assert!(exact < 1e-10);

        // reversed order exercises the genuine Taylor tail
        let (_sym, rem) = Symbol::compose(&b, &a, n, 4).unwrap();
        let norm = rem.compose(&w).op_norm();
        println!("N = {n}: weighted remainder norm = {norm:.6e}");
        assert!(norm.is_finite() && norm < 0.2);
    }
}

#[test]
fn two_term_expansions_differ_by_poisson_bracket() {
    // sigma_ab^(2) - sigma_ba^(2) = -i {a, b} holds exactly slot by slot
    // (the same difference stencils enter both sides)
    let lat = ModeLattice::new(1, 3, 10).unwrap();
    let (a, b) = half_order_pair(&lat);
    let (sab, _) = Symbol::compose(&a, &b, 2, 0).unwrap();
    let (sba, _) = Symbol::compose(&b, &a, 2, 0).unwrap();
    let diff = sab.add(&sba.scale(C64::new(-1.0, 0.0)));
    let bracket = Symbol::poisson_bracket(&a, &b).scale(C64::new(0.0, -1.0));
    let defect = diff
        .quantize()
        .sub(&bracket.quantize())
        .max_entry();
    assert!(defect < 1e-13);
}

#[test]
fn half_order_commutator_principal_part() {
    // [beta |D|^{1/2}, a7 |D|^{1/2}] has principal symbol
    // (i/2) ((d_x beta) a7 - beta (d_x a7)) sign(xi)
    let lat = ModeLattice::new(1, 4, 16).unwrap();
    let half = Symbol::multiplier(&lat, MultiplierKind::AbsDPow(0.5), 1.0);
    let beta = Field::trig(&lat, &[0], 1, 0.4, Parity::Even);
    let a7_f = Field::trig(&lat, &[0], 2, 0.3, Parity::Even);
    let a = Symbol::from_field(&beta).mul(&half);
    let b = Symbol::from_field(&a7_f).mul(&half);

    let bracket = Symbol::poisson_bracket(&a, &b).scale(C64::new(0.0, -1.0));
    // closed form on the x-grid
    let closed = beta
        .dx()
        .mul(&a7_f)
        .sub(&beta.mul(&a7_f.dx()));
    let closed_grid = closed.grid_values();

    // compare at an interior slot where the centered difference of
    // sqrt(|xi|) is accurate
    let j_probe = 14i64;
    for (sign, j) in [(1.0, j_probe), (-1.0, -j_probe)] {
        let slice = bracket.slice(j);
        let mut worst = 0.0f64;
        for (g, v) in slice.iter().enumerate() {
            let want = C64::new(0.0, 0.5 * sign) * closed_grid[g];
            worst = worst.max((v - want).norm());
        }
        println!("slot {j}: principal-part defect {worst:.3e}");
        assert!(worst < 5e-4);
    }

    // the full commutator minus the bracket quantization is one order
    // lower: weighting by <D> keeps it bounded
    let ab = Symbol::compose_operators(&a, &b, 4);
    let ba = Symbol::compose_operators(&b, &a, 4);
    let comm = ab.sub(&ba);
    let rem = comm.sub(&bracket.quantize());
    let weighted = rem.compose(&weight_pow(&lat, 1.0)).op_norm();
    println!("weighted commutator remainder = {weighted:.6e}");
    assert!(weighted < 0.5);
}

#[test]
fn tanh_multiplier_decomposition() {
    // tanh(h|xi|chi) = 1 + r_h(xi) with r_h = -2/(1+e^{2h|xi|chi}),
    // an algebraic identity that must hold slot by slot
    let lat = ModeLattice::new(1, 2, 12).unwrap();
    for h in [0.5, 1.0, 2.0] {
        let t = Symbol::multiplier(&lat, MultiplierKind::TanhHD, h);
        for j in -12..=12i64 {
            let got = t.slice(j)[0];
            let want = 1.0 + psdo_calculus::r_h(h, j as f64);
            assert!((got - C64::new(want, 0.0)).norm() < 1e-15);
        }
    }
}
