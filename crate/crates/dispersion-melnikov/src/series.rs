//! Taylor expansion of the depth profile sqrt(tanh(h^4)).
//!
//! All series arithmetic is exact over rationals: the tanh coefficients
//! come from dividing the sinh series by the cosh series, the square
//! root from the coefficient recurrence of sqrt(1 + s).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive};

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn inv_factorial(n: usize) -> BigRational {
    BigRational::new(BigInt::one(), factorial(n))
}

/// Coefficients t_n of tanh z = sum t_n z^{2n+1}.
pub(crate) fn tanh_coefficients(n_terms: usize) -> Vec<BigRational> {
    let mut t: Vec<BigRational> = Vec::with_capacity(n_terms);
    for n in 0..n_terms {
        let mut c = inv_factorial(2 * n + 1);
        for (i, ti) in t.iter().enumerate().take(n) {
            c -= ti * inv_factorial(2 * (n - i));
        }
        t.push(c);
    }
    t
}

/// Exact coefficients of h^{8n+2}, n = 0..n_terms, in sqrt(tanh(h^4)).
pub fn g1_taylor_exact(n_terms: usize) -> Vec<BigRational> {
    assert!(n_terms >= 1);
    let t = tanh_coefficients(n_terms);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    for n in 1..n_terms {
        let mut c = t[n].clone();
        for i in 1..n {
            c -= &b[i] * &b[n - i];
        }
        b.push(c * &half);
    }
    b
}

/// Leading coefficients as floats; the expansion starts h^2 - h^10/6 + ...
pub fn g1_taylor(n_terms: usize) -> Vec<f64> {
    assert!((1..=4).contains(&n_terms), "coefficients tabulated through h^26");
    g1_taylor_exact(n_terms).iter().map(|c| c.to_f64().unwrap()).collect()
}

/// sqrt(tanh(h^4)).
pub fn g1(h: f64) -> f64 {
    h.powi(4).tanh().sqrt()
}

/// sqrt(j) g1(j^{1/4} h), the j-th frequency evaluated at depth h^4.
pub fn gj(j: usize, h: f64) -> f64 {
    (j as f64).sqrt() * g1((j as f64).powf(0.25) * h)
}
