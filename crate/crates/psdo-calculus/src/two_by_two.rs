use crate::block::{BlockOperator, StructurePredicate};
use crate::dense::{self, CMat, C64};
use crate::PsdoError;
use spectral_core::{Field, ModeLattice};

/// Four-block operator acting on real pairs (eta, psi).
#[derive(Debug, Clone)]
pub struct Operator2x2 {
    pub a: BlockOperator,
    pub b: BlockOperator,
    pub c: BlockOperator,
    pub d: BlockOperator,
}

impl Operator2x2 {
    pub fn new(a: BlockOperator, b: BlockOperator, c: BlockOperator, d: BlockOperator) -> Self {
        assert!(
            a.lattice() == b.lattice() && a.lattice() == c.lattice() && a.lattice() == d.lattice(),
            "blocks must share one lattice"
        );
        Self { a, b, c, d }
    }

    pub fn zeros(lattice: &ModeLattice) -> Self {
        let z = BlockOperator::zeros(lattice);
        Self::new(z.clone(), z.clone(), z.clone(), z)
    }

    pub fn identity(lattice: &ModeLattice) -> Self {
        let mut out = Self::zeros(lattice);
        out.a = BlockOperator::identity(lattice);
        out.d = BlockOperator::identity(lattice);
        out
    }

    /// diag(p, q) with zero off-diagonal blocks.
    pub fn diag(p: BlockOperator, q: BlockOperator) -> Self {
        let z = BlockOperator::zeros(p.lattice());
        Self::new(p, z.clone(), z, q)
    }

    pub fn lattice(&self) -> &ModeLattice {
        self.a.lattice()
    }

    pub fn dim(&self) -> usize {
        2 * self.a.dim()
    }

    pub fn apply(&self, eta: &Field, psi: &Field) -> (Field, Field) {
        let top = self.a.apply(eta).add(&self.b.apply(psi));
        let bot = self.c.apply(eta).add(&self.d.apply(psi));
        (top, bot)
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self::new(
            self.a.compose(&rhs.a).add(&self.b.compose(&rhs.c)),
            self.a.compose(&rhs.b).add(&self.b.compose(&rhs.d)),
            self.c.compose(&rhs.a).add(&self.d.compose(&rhs.c)),
            self.c.compose(&rhs.b).add(&self.d.compose(&rhs.d)),
        )
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(
            self.a.add(&rhs.a),
            self.b.add(&rhs.b),
            self.c.add(&rhs.c),
            self.d.add(&rhs.d),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(
            self.a.sub(&rhs.a),
            self.b.sub(&rhs.b),
            self.c.sub(&rhs.c),
            self.d.sub(&rhs.d),
        )
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::new(
            self.a.scale(k),
            self.b.scale(k),
            self.c.scale(k),
            self.d.scale(k),
        )
    }

    /// Assembled 2n x 2n matrix in (eta, psi) block order.
    pub fn embed(&self) -> CMat {
        let n = self.a.dim();
        let mut out = CMat::zeros(2 * n, 2 * n);
        for c in 0..n {
            for r in 0..n {
                out[(r, c)] = self.a.matrix()[(r, c)];
                out[(r, n + c)] = self.b.matrix()[(r, c)];
                out[(n + r, c)] = self.c.matrix()[(r, c)];
                out[(n + r, n + c)] = self.d.matrix()[(r, c)];
            }
        }
        out
    }

    pub fn from_embedded(lattice: &ModeLattice, full: &CMat) -> Self {
        let n = lattice.num_modes();
        assert_eq!(full.nrows(), 2 * n);
        let block = |r0: usize, c0: usize| {
            let mut m = CMat::zeros(n, n);
            for c in 0..n {
                for r in 0..n {
                    m[(r, c)] = full[(r0 + r, c0 + c)];
                }
            }
            BlockOperator::from_matrix(lattice, m)
        };
        Self::new(block(0, 0), block(0, n), block(n, 0), block(n, n))
    }

    pub fn inverse(&self) -> Result<Self, PsdoError> {
        let inv = dense::inverse(&self.embed()).map_err(|e| PsdoError::Singular(e.to_string()))?;
        Ok(Self::from_embedded(self.lattice(), &inv))
    }

    pub fn max_entry(&self) -> f64 {
        self.a
            .max_entry()
            .max(self.b.max_entry())
            .max(self.c.max_entry())
            .max(self.d.max_entry())
    }

    pub fn op_norm(&self) -> f64 {
        dense::op_norm2(&self.embed())
    }

    /// Defect of the requested structure identity on the (eta, psi) form.
    /// Reversibility compares against conjugation by the involution
    /// diag(1, -1) composed with phi -> -phi.
    pub fn structure_defect(&self, predicate: StructurePredicate) -> f64 {
        match predicate {
            StructurePredicate::Real | StructurePredicate::Even => [
                &self.a, &self.b, &self.c, &self.d,
            ]
            .iter()
            .map(|blk| blk.structure_defect(predicate))
            .fold(0.0, f64::max),
            StructurePredicate::Reversible => {
                let da = self.a.phi_reflected().add(&self.a).max_entry();
                let db = self.b.phi_reflected().sub(&self.b).max_entry();
                let dc = self.c.phi_reflected().sub(&self.c).max_entry();
                let dd = self.d.phi_reflected().add(&self.d).max_entry();
                da.max(db).max(dc).max(dd)
            }
            StructurePredicate::ReversibilityPreserving => {
                let da = self.a.phi_reflected().sub(&self.a).max_entry();
                let db = self.b.phi_reflected().add(&self.b).max_entry();
                let dc = self.c.phi_reflected().add(&self.c).max_entry();
                let dd = self.d.phi_reflected().sub(&self.d).max_entry();
                da.max(db).max(dc).max(dd)
            }
        }
    }

    pub fn check_structure(&self, predicate: StructurePredicate, tol: f64) -> (bool, f64) {
        let d = self.structure_defect(predicate);
        (d <= tol, d)
    }

    /// Blocks of the same operator in the complex variables
    /// (u, bar u) = C^{-1} (eta, psi), C = (1 1; -i i)/2.
    pub fn complexify(&self) -> ComplexPairOp {
        let half = C64::new(0.5, 0.0);
        let half_i = C64::new(0.0, 0.5);
        let p = self
            .a
            .add(&self.d)
            .scale(half)
            .sub(&self.b.sub(&self.c).scale(half_i));
        let q = self
            .a
            .sub(&self.d)
            .scale(half)
            .add(&self.b.add(&self.c).scale(half_i));
        ComplexPairOp { p, q }
    }
}

/// Operator (P Q; bar Q bar P) on complex pairs (u, bar u); the second
/// row is determined by the first, so only P and Q are stored.
#[derive(Debug, Clone)]
pub struct ComplexPairOp {
    pub p: BlockOperator,
    pub q: BlockOperator,
}

impl ComplexPairOp {
    pub fn new(p: BlockOperator, q: BlockOperator) -> Self {
        assert!(p.lattice() == q.lattice(), "blocks must share one lattice");
        Self { p, q }
    }

    pub fn zeros(lattice: &ModeLattice) -> Self {
        let z = BlockOperator::zeros(lattice);
        Self { p: z.clone(), q: z }
    }

    pub fn identity(lattice: &ModeLattice) -> Self {
        Self {
            p: BlockOperator::identity(lattice),
            q: BlockOperator::zeros(lattice),
        }
    }

    /// diag(p, bar p): no coupling between u and bar u.
    pub fn diag(p: BlockOperator) -> Self {
        let q = BlockOperator::zeros(p.lattice());
        Self { p, q }
    }

    pub fn lattice(&self) -> &ModeLattice {
        self.p.lattice()
    }

    pub fn apply(&self, u: &Field) -> Field {
        self.p.apply(u).add(&self.q.apply(&u.conj_reflect()))
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            p: self.p.compose(&rhs.p).add(&self.q.compose(&rhs.q.bar())),
            q: self.p.compose(&rhs.q).add(&self.q.compose(&rhs.p.bar())),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            p: self.p.add(&rhs.p),
            q: self.q.add(&rhs.q),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            p: self.p.sub(&rhs.p),
            q: self.q.sub(&rhs.q),
        }
    }

    /// Real scaling only: a complex factor would break the pair structure.
    pub fn scale(&self, k: f64) -> Self {
        let kc = C64::new(k, 0.0);
        Self {
            p: self.p.scale(kc),
            q: self.q.scale(kc),
        }
    }

    /// Schur-complement inverse of (P Q; bar Q bar P):
    /// X = (P - Q bar P^{-1} bar Q)^{-1}, Y = -X Q bar P^{-1}.
    pub fn inverse(&self) -> Result<Self, PsdoError> {
        let pbar_inv = self.p.bar().inverse()?;
        let schur = self.p.sub(&self.q.compose(&pbar_inv).compose(&self.q.bar()));
        let x = schur.inverse()?;
        let y = x
            .compose(&self.q)
            .compose(&pbar_inv)
            .scale(C64::new(-1.0, 0.0));
        Ok(Self { p: x, q: y })
    }

    /// Assembled 2n x 2n matrix in (u, bar u) block order.
    pub fn embed(&self) -> CMat {
        let n = self.p.dim();
        let qbar = self.q.bar();
        let pbar = self.p.bar();
        let mut out = CMat::zeros(2 * n, 2 * n);
        for c in 0..n {
            for r in 0..n {
                out[(r, c)] = self.p.matrix()[(r, c)];
                out[(r, n + c)] = self.q.matrix()[(r, c)];
                out[(n + r, c)] = qbar.matrix()[(r, c)];
                out[(n + r, n + c)] = pbar.matrix()[(r, c)];
            }
        }
        out
    }

    /// Blocks of C (P Q; bar Q bar P) C^{-1} acting on real pairs.
    pub fn realify(&self) -> Operator2x2 {
        let half = C64::new(0.5, 0.0);
        let half_i = C64::new(0.0, 0.5);
        let pbar = self.p.bar();
        let qbar = self.q.bar();
        let p_sum = self.p.add(&pbar);
        let p_dif = self.p.sub(&pbar);
        let q_sum = self.q.add(&qbar);
        let q_dif = self.q.sub(&qbar);
        Operator2x2::new(
            p_sum.add(&q_sum).scale(half),
            p_dif.sub(&q_dif).scale(half_i),
            p_dif.add(&q_dif).scale(C64::new(0.0, -0.5)),
            p_sum.sub(&q_sum).scale(half),
        )
    }

    pub fn max_entry(&self) -> f64 {
        self.p.max_entry().max(self.q.max_entry())
    }

    pub fn op_norm(&self) -> f64 {
        self.p.op_norm().max(self.q.op_norm())
    }

    pub fn weighted_op_norm(&self, m: f64) -> f64 {
        self.p.weighted_op_norm(m).max(self.q.weighted_op_norm(m))
    }

    /// Worst defect over both stored blocks; evenness and reversibility
    /// reduce to per-block identities.  The real structure is the pair
    /// shape itself, enforced by construction, so its defect is 0.
    pub fn structure_defect(&self, predicate: StructurePredicate) -> f64 {
        if matches!(predicate, StructurePredicate::Real) {
            return 0.0;
        }
        self.p
            .structure_defect(predicate)
            .max(self.q.structure_defect(predicate))
    }

    pub fn check_structure(&self, predicate: StructurePredicate, tol: f64) -> (bool, f64) {
        let d = self.structure_defect(predicate);
        (d <= tol, d)
    }
}
