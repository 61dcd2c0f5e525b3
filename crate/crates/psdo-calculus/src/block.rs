use crate::dense::{self, CMat, C64};
use crate::PsdoError;
use num_complex::Complex;
use serde::Serialize;
use spectral_core::{Field, ModeLattice, MAX_NU};

/// Dense operator on the truncated mode space, rows and columns indexed by
/// the lattice's flat (l, j) order.  Most constructors produce matrices
/// that are Toplitz in l (entries depend on l - l' only); products and
/// conjugations are free to leave that class, the storage does not care.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    lattice: ModeLattice,
    mat: CMat,
}

/// Structural predicates checked as matrix identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructurePredicate {
    /// Maps real functions to real functions.
    Real,
    /// Preserves the space of functions even in x, pointwise in phi.
    Even,
    /// Anti self-conjugate under the j-flip: R_j^{j'}(l) = -conj(R_{-j}^{-j'}(l)).
    Reversible,
    /// Self-conjugate under the j-flip: A_j^{j'}(l) = conj(A_{-j}^{-j'}(l)).
    ReversibilityPreserving,
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorEntry {
    pub row_ell: Vec<i64>,
    pub row_j: i64,
    pub col_ell: Vec<i64>,
    pub col_j: i64,
    pub re: f64,
    pub im: f64,
}

impl BlockOperator {
    pub fn zeros(lattice: &ModeLattice) -> Self {
        let n = lattice.num_modes();
        Self {
            lattice: lattice.clone(),
            mat: CMat::zeros(n, n),
        }
    }

    pub fn identity(lattice: &ModeLattice) -> Self {
        let n = lattice.num_modes();
        Self {
            lattice: lattice.clone(),
            mat: CMat::identity(n, n),
        }
    }

    pub fn from_matrix(lattice: &ModeLattice, mat: CMat) -> Self {
        assert_eq!(mat.nrows(), lattice.num_modes());
        assert_eq!(mat.ncols(), lattice.num_modes());
        Self {
            lattice: lattice.clone(),
            mat,
        }
    }

    pub fn lattice(&self) -> &ModeLattice {
        &self.lattice
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn matrix_mut(&mut self) -> &mut CMat {
        &mut self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Multiplication operator u -> f u as the Toplitz matrix of f's
    /// coefficients.
    pub fn from_field(f: &Field) -> Self {
        let lattice = f.lattice().clone();
        let mut out = Self::zeros(&lattice);
        let mut row_ell = [0i64; MAX_NU];
        let mut col_ell = [0i64; MAX_NU];
        let nu = lattice.nu();
        let n = lattice.num_modes();
        for row in 0..n {
            let rj = lattice.mode_at(row, &mut row_ell);
            for col in 0..n {
                let cj = lattice.mode_at(col, &mut col_ell);
                let diff: Vec<i64> = (0..nu).map(|d| row_ell[d] - col_ell[d]).collect();
                let c = f.get(&diff, rj - cj);
                if c != Complex::new(0.0, 0.0) {
                    out.mat[(row, col)] = c;
                }
            }
        }
        out
    }

    /// Fourier multiplier g(j) acting in x (phi-independent, diagonal).
    pub fn from_x_multiplier(lattice: &ModeLattice, g: impl Fn(i64) -> C64) -> Self {
        let mut out = Self::zeros(lattice);
        lattice.for_each_mode(|idx, _ell, j| {
            out.mat[(idx, idx)] = g(j);
        });
        out
    }

    /// The first-order part w . dphi as a diagonal matrix i (w . l).
    pub fn omega_dphi(lattice: &ModeLattice, omega: &[f64]) -> Self {
        let mut out = Self::zeros(lattice);
        lattice.for_each_mode(|idx, ell, _j| {
            let wl: f64 = omega.iter().zip(ell).map(|(w, &l)| w * l as f64).sum();
            out.mat[(idx, idx)] = C64::new(0.0, wl);
        });
        out
    }

    /// d/dx as the diagonal matrix i j.
    pub fn dx(lattice: &ModeLattice) -> Self {
        Self::from_x_multiplier(lattice, |j| C64::new(0.0, j as f64))
    }

    pub fn apply(&self, u: &Field) -> Field {
        assert_eq!(u.lattice(), &self.lattice, "lattice mismatch");
        let v = CMat::from_column_slice(self.dim(), 1, u.coeffs());
        let w = &self.mat * v;
        let mut out = Field::zeros(&self.lattice);
        out.coeffs_mut().copy_from_slice(w.as_slice());
        out
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.lattice, rhs.lattice, "lattice mismatch");
        Self {
            lattice: self.lattice.clone(),
            mat: dense::matmul(&self.mat, &rhs.mat),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            lattice: self.lattice.clone(),
            mat: &self.mat + &rhs.mat,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            lattice: self.lattice.clone(),
            mat: &self.mat - &rhs.mat,
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            lattice: self.lattice.clone(),
            mat: &self.mat * k,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            lattice: self.lattice.clone(),
            mat: self.mat.adjoint(),
        }
    }

    pub fn inverse(&self) -> Result<Self, PsdoError> {
        let inv = dense::inverse(&self.mat).map_err(|e| PsdoError::Singular(e.to_string()))?;
        Ok(Self {
            lattice: self.lattice.clone(),
            mat: inv,
        })
    }

    /// Conjugation rhs^{-1} . self . rhs computed with a single LU.
    pub fn conjugate_by(&self, rhs: &Self) -> Result<Self, PsdoError> {
        let lu = dense::lu_factor(rhs.mat.clone()).map_err(|e| PsdoError::Singular(e.to_string()))?;
        let prod = dense::matmul(&self.mat, &rhs.mat);
        Ok(Self {
            lattice: self.lattice.clone(),
            mat: lu.solve_mat(&prod),
        })
    }

    pub fn op_norm(&self) -> f64 {
        dense::op_norm2(&self.mat)
    }

    pub fn frobenius(&self) -> f64 {
        dense::frobenius(&self.mat)
    }

    pub fn max_entry(&self) -> f64 {
        dense::max_abs(&self.mat)
    }

    /// Operator norm of <D>^m A <D>^m with the x-weight max(1, |j|)^m on
    /// both sides.
    pub fn weighted_op_norm(&self, m: f64) -> f64 {
        let n = self.dim();
        let mut w = vec![0.0f64; n];
        self.lattice.for_each_mode(|idx, _ell, j| {
            w[idx] = (j.abs().max(1) as f64).powf(m);
        });
        let mut scaled = self.mat.clone();
        for c in 0..n {
            for r in 0..n {
                scaled[(r, c)] *= C64::new(w[r] * w[c], 0.0);
            }
        }
        dense::op_norm2(&scaled)
    }

    /// Entrywise absolute values (the majorant of the operator).
    pub fn majorant(&self) -> Self {
        Self {
            lattice: self.lattice.clone(),
            mat: self.mat.map(|v| C64::new(v.norm(), 0.0)),
        }
    }

    /// Copy entries whose row and column modes both exist in `target`.
    pub fn restrict_to(&self, target: &ModeLattice) -> Self {
        let mut out = Self::zeros(target);
        let mut r_ell = [0i64; MAX_NU];
        let mut c_ell = [0i64; MAX_NU];
        let tn = target.num_modes();
        for row in 0..tn {
            let rj = target.mode_at(row, &mut r_ell);
            let Some(src_row) = self.lattice.index_of(&r_ell[..target.nu()], rj) else {
                continue;
            };
            for col in 0..tn {
                let cj = target.mode_at(col, &mut c_ell);
                if let Some(src_col) = self.lattice.index_of(&c_ell[..target.nu()], cj) {
                    out.mat[(row, col)] = self.mat[(src_row, src_col)];
                }
            }
        }
        out
    }

    fn index_flip(&self, flip_ell: bool, flip_j: bool) -> Vec<usize> {
        let n = self.dim();
        let mut perm = vec![0usize; n];
        let mut ell = [0i64; MAX_NU];
        for idx in 0..n {
            let j = self.lattice.mode_at(idx, &mut ell);
            let target_ell: Vec<i64> = ell[..self.lattice.nu()]
                .iter()
                .map(|&l| if flip_ell { -l } else { l })
                .collect();
            let tj = if flip_j { -j } else { j };
            perm[idx] = self.lattice.index_of(&target_ell, tj).unwrap();
        }
        perm
    }

    fn permuted_conj(&self, perm: &[usize], conj: bool) -> CMat {
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for c in 0..n {
            for r in 0..n {
                let v = self.mat[(perm[r], perm[c])];
                out[(r, c)] = if conj { v.conj() } else { v };
            }
        }
        out
    }

    /// Max-entry defect of the requested structure identity.
    pub fn structure_defect(&self, predicate: StructurePredicate) -> f64 {
        let defect_mat: CMat = match predicate {
            StructurePredicate::Real => {
                // A = conj(S A S) with S: (l, j) -> (-l, -j)
                let perm = self.index_flip(true, true);
                &self.mat - self.permuted_conj(&perm, true)
            }
            StructurePredicate::Even => {
                // A_j^{j'} + A_j^{-j'} - A_{-j}^{j'} - A_{-j}^{-j'} must
                // vanish: the operator then preserves x-even functions.
                let perm = self.index_flip(false, true);
                let n = self.dim();
                let mut defect = CMat::zeros(n, n);
                for c in 0..n {
                    for r in 0..n {
                        defect[(r, c)] = self.mat[(r, c)] + self.mat[(r, perm[c])]
                            - self.mat[(perm[r], c)]
                            - self.mat[(perm[r], perm[c])];
                    }
                }
                defect
            }
            StructurePredicate::Reversible => {
                let perm = self.index_flip(false, true);
                &self.mat + self.permuted_conj(&perm, true)
            }
            StructurePredicate::ReversibilityPreserving => {
                let perm = self.index_flip(false, true);
                &self.mat - self.permuted_conj(&perm, true)
            }
        };
        dense::max_abs(&defect_mat)
    }

    pub fn check_structure(&self, predicate: StructurePredicate, tol: f64) -> (bool, f64) {
        let d = self.structure_defect(predicate);
        (d <= tol, d)
    }

    /// Entries above `threshold` in magnitude, for JSON inspection dumps.
    pub fn entries_above(&self, threshold: f64) -> Vec<OperatorEntry> {
        let mut out = Vec::new();
        let mut r_ell = [0i64; MAX_NU];
        let mut c_ell = [0i64; MAX_NU];
        let n = self.dim();
        let nu = self.lattice.nu();
        for col in 0..n {
            let cj = self.lattice.mode_at(col, &mut c_ell);
            for row in 0..n {
                let v = self.mat[(row, col)];
                if v.norm() > threshold {
                    let rj = self.lattice.mode_at(row, &mut r_ell);
                    out.push(OperatorEntry {
                        row_ell: r_ell[..nu].to_vec(),
                        row_j: rj,
                        col_ell: c_ell[..nu].to_vec(),
                        col_j: cj,
                        re: v.re,
                        im: v.im,
                    });
                }
            }
        }
        out
    }

    /// Largest |entry| with |l - l'| weight: diagnostic for Toplitz decay
    /// in the x index: sup |A_j^{j'}| (1 + |j| + |j'|)^kappa.
    pub fn offdiagonal_decay(&self, kappa: f64) -> f64 {
        let mut r_ell = [0i64; MAX_NU];
        let mut c_ell = [0i64; MAX_NU];
        let n = self.dim();
        let mut worst = 0.0f64;
        for col in 0..n {
            let cj = self.lattice.mode_at(col, &mut c_ell);
            for row in 0..n {
                let rj = self.lattice.mode_at(row, &mut r_ell);
                let w = (1.0 + rj.abs() as f64 + cj.abs() as f64).powf(kappa);
                worst = worst.max(self.mat[(row, col)].norm() * w);
            }
        }
        worst
    }

    /// Matrix of the conjugated operator bar(A) u := conj(A conj(u)):
    /// entries conj(A) with both mode indices reflected.
    pub fn bar(&self) -> Self {
        let perm = self.index_flip(true, true);
        Self {
            lattice: self.lattice.clone(),
            mat: self.permuted_conj(&perm, true),
        }
    }

    /// Matrix of phi -> A(-phi): the ell index reflected on both sides.
    pub fn phi_reflected(&self) -> Self {
        let perm = self.index_flip(true, false);
        Self {
            lattice: self.lattice.clone(),
            mat: self.permuted_conj(&perm, false),
        }
    }
}

/// Matrix of the mode-reflection u(phi, x) -> u(-phi, -x).
pub fn reflection(lattice: &ModeLattice) -> BlockOperator {
    let mut out = BlockOperator::zeros(lattice);
    let mut ell = [0i64; MAX_NU];
    for idx in 0..lattice.num_modes() {
        let j = lattice.mode_at(idx, &mut ell);
        let neg: Vec<i64> = ell[..lattice.nu()].iter().map(|&l| -l).collect();
        let tgt = lattice.index_of(&neg, -j).unwrap();
        out.matrix_mut()[(tgt, idx)] = C64::new(1.0, 0.0);
    }
    out
}
