//! Dense complex matrix kernels: gemm-backed products, blocked LU with
//! partial pivoting, and power-iteration operator norms.
//!
//! nalgebra's generic matmul and decompositions are scalar loops; at the
//! operator dimensions used here (up to ~4000) the gemm-blocked paths below
//! are what keep the budgets.

use matrixmultiply::{zgemm, CGemmOption};
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// alpha * a * b + beta * c, written into c.
pub fn gemm_into(alpha: C64, a: &CMat, b: &CMat, beta: C64, c: &mut CMat) {
    let (m, k) = a.shape();
    let (k2, n) = b.shape();
    assert_eq!(k, k2, "inner dimensions must agree");
    assert_eq!(c.shape(), (m, n), "output shape must agree");
    if m == 0 || n == 0 || k == 0 {
        if beta != C64::new(1.0, 0.0) {
            c.iter_mut().for_each(|v| *v *= beta);
        }
        return;
    }
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [alpha.re, alpha.im],
            a.as_slice().as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_slice().as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [beta.re, beta.im],
            c.as_mut_slice().as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    let mut c = CMat::zeros(a.nrows(), b.ncols());
    gemm_into(C64::new(1.0, 0.0), a, b, C64::new(0.0, 0.0), &mut c);
    c
}

/// a * b1 * b2 ... chained left to right.
pub fn matmul3(a: &CMat, b: &CMat, c: &CMat) -> CMat {
    matmul(&matmul(a, b), c)
}

const NB: usize = 48;

/// LU factors of a square matrix, P A = L U with unit lower L.
pub struct LuFactors {
    lu: CMat,
    piv: Vec<usize>,
}

#[derive(Debug, thiserror::Error)]
#[error("matrix is numerically singular at column {col} (pivot {pivot:e})")]
pub struct SingularMatrix {
    pub col: usize,
    pub pivot: f64,
}

pub fn lu_factor(mut a: CMat) -> Result<LuFactors, SingularMatrix> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix required");
    let mut piv = vec![0usize; n];
    let mut k0 = 0usize;
    while k0 < n {
        let kend = (k0 + NB).min(n);
        for k in k0..kend {
            let mut p = k;
            let mut best = a[(k, k)].norm_sqr();
            for r in k + 1..n {
                let v = a[(r, k)].norm_sqr();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                return Err(SingularMatrix {
                    col: k,
                    pivot: 0.0,
                });
            }
            piv[k] = p;
            if p != k {
                a.swap_rows(k, p);
            }
            let inv = a[(k, k)].inv();
            for r in k + 1..n {
                a[(r, k)] *= inv;
            }
            for c in k + 1..kend {
                let m = a[(k, c)];
                if m != C64::new(0.0, 0.0) {
                    for r in k + 1..n {
                        let l = a[(r, k)];
                        a[(r, c)] -= l * m;
                    }
                }
            }
        }
        if kend < n {
            // U12 = L11^{-1} A12 (unit lower triangular, scalar panel)
            for c in kend..n {
                for k in k0..kend {
                    let v = a[(k, c)];
                    if v != C64::new(0.0, 0.0) {
                        for r in k + 1..kend {
                            let l = a[(r, k)];
                            a[(r, c)] -= l * v;
                        }
                    }
                }
            }
            // A22 -= L21 U12 (the gemm that carries the n^3 work)
            let m = n - kend;
            let kk = kend - k0;
            let nn = n - kend;
            unsafe {
                let base = a.as_mut_slice().as_mut_ptr();
                let l21 = base.add(k0 * n + kend) as *const [f64; 2];
                let u12 = base.add(kend * n + k0) as *const [f64; 2];
                let a22 = base.add(kend * n + kend) as *mut [f64; 2];
                zgemm(
                    CGemmOption::Standard,
                    CGemmOption::Standard,
                    m,
                    kk,
                    nn,
                    [-1.0, 0.0],
                    l21,
                    1,
                    n as isize,
                    u12,
                    1,
                    n as isize,
                    [1.0, 0.0],
                    a22,
                    1,
                    n as isize,
                );
            }
        }
        k0 = kend;
    }
    Ok(LuFactors { lu: a, piv })
}

impl LuFactors {
    pub fn n(&self) -> usize {
        self.lu.nrows()
    }

    /// Solve A X = B for a matrix of right-hand sides.
    pub fn solve_mat(&self, b: &CMat) -> CMat {
        let n = self.n();
        assert_eq!(b.nrows(), n);
        let mut x = b.clone();
        for k in 0..n {
            if self.piv[k] != k {
                x.swap_rows(k, self.piv[k]);
            }
        }
        let nrhs = x.ncols();
        // forward, unit lower, blocked
        let mut k0 = 0usize;
        while k0 < n {
            let kend = (k0 + NB).min(n);
            for c in 0..nrhs {
                for k in k0..kend {
                    let v = x[(k, c)];
                    if v != C64::new(0.0, 0.0) {
                        for r in k + 1..kend {
                            let l = self.lu[(r, k)];
                            x[(r, c)] -= l * v;
                        }
                    }
                }
            }
            if kend < n {
                unsafe {
                    let lbase = self.lu.as_slice().as_ptr();
                    let xbase = x.as_mut_slice().as_mut_ptr();
                    zgemm(
                        CGemmOption::Standard,
                        CGemmOption::Standard,
                        n - kend,
                        kend - k0,
                        nrhs,
                        [-1.0, 0.0],
                        lbase.add(k0 * n + kend) as *const [f64; 2],
                        1,
                        n as isize,
                        xbase.add(k0) as *const [f64; 2],
                        1,
                        n as isize,
                        [1.0, 0.0],
                        xbase.add(kend) as *mut [f64; 2],
                        1,
                        n as isize,
                    );
                }
            }
            k0 = kend;
        }
        // backward, upper
        let mut kend = n;
        while kend > 0 {
            let k0 = kend.saturating_sub(NB);
            for c in 0..nrhs {
                for k in (k0..kend).rev() {
                    let mut v = x[(k, c)];
                    for r in k + 1..kend {
                        v -= self.lu[(k, r)] * x[(r, c)];
                    }
                    x[(k, c)] = v * self.lu[(k, k)].inv();
                }
            }
            if k0 > 0 {
                unsafe {
                    let lbase = self.lu.as_slice().as_ptr();
                    let xbase = x.as_mut_slice().as_mut_ptr();
                    zgemm(
                        CGemmOption::Standard,
                        CGemmOption::Standard,
                        k0,
                        kend - k0,
                        nrhs,
                        [-1.0, 0.0],
                        lbase.add(k0 * n) as *const [f64; 2],
                        1,
                        n as isize,
                        xbase.add(k0) as *const [f64; 2],
                        1,
                        n as isize,
                        [1.0, 0.0],
                        xbase as *mut [f64; 2],
                        1,
                        n as isize,
                    );
                }
            }
            kend = k0;
        }
        x
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let bm = CMat::from_column_slice(self.n(), 1, b);
        self.solve_mat(&bm).as_slice().to_vec()
    }

    pub fn inverse(&self) -> CMat {
        self.solve_mat(&CMat::identity(self.n(), self.n()))
    }
}

pub fn inverse(a: &CMat) -> Result<CMat, SingularMatrix> {
    Ok(lu_factor(a.clone())?.inverse())
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0f64, |acc, v| acc.max(v.norm()))
}

/// Spectral norm by power iteration on A^H A with a seeded start vector.
pub fn op_norm2(a: &CMat) -> f64 {
    op_norm2_apply(a.ncols(), 120, |v| {
        let av = a * CMat::from_column_slice(a.ncols(), 1, v);
        let aha = a.adjoint() * av;
        aha.as_slice().to_vec()
    })
}

/// Power iteration given only the action of A^H A; `dim` is the domain
/// dimension.  Deterministic start (fixed seed).
pub fn op_norm2_apply(dim: usize, iters: usize, mut apply_aha: impl FnMut(&[C64]) -> Vec<C64>) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm = |v: &[C64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let n0 = norm(&v);
    if n0 == 0.0 {
        return 0.0;
    }
    v.iter_mut().for_each(|x| *x /= n0);
    let mut lambda = 0.0f64;
    for _ in 0..iters {
        let w = apply_aha(&v);
        let nw = norm(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let prev = lambda;
        lambda = nw;
        v = w;
        v.iter_mut().for_each(|x| *x /= nw);
        if (lambda - prev).abs() <= 1e-13 * lambda.max(1e-300) {
            break;
        }
    }
    lambda.sqrt()
}
