use crate::field::FourierField;
use crate::lattice::ModeLattice;
use crate::{Scalar, SpectralError};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// JSON shape of a lattice; rebuilt through the validating constructor on
/// the way in.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeJson {
    pub nu: usize,
    pub l_max: usize,
    pub j_max: usize,
    pub phi_grid: usize,
    pub x_grid: usize,
}

/// JSON shape of a field: the lattice plus the nonzero coefficients as
/// (l, j, re, im) rows in flat index order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldJson {
    pub lattice: LatticeJson,
    pub real: bool,
    pub coeffs: Vec<(Vec<i64>, i64, f64, f64)>,
}

impl LatticeJson {
    pub fn from_lattice(l: &ModeLattice) -> Self {
        Self {
            nu: l.nu(),
            l_max: l.l_max(),
            j_max: l.j_max(),
            phi_grid: l.phi_grid(),
            x_grid: l.x_grid(),
        }
    }

    pub fn to_lattice(&self) -> Result<ModeLattice, SpectralError> {
        ModeLattice::with_grids(self.nu, self.l_max, self.j_max, self.phi_grid, self.x_grid)
    }
}

impl FieldJson {
    pub fn from_field<T: Scalar>(u: &FourierField<T>) -> Self {
        let mut coeffs = Vec::new();
        u.lattice().for_each_mode(|idx, ell, j| {
            let c = u.coeffs()[idx];
            if c != Complex::default() {
                coeffs.push((ell.to_vec(), j, c.re.f64(), c.im.f64()));
            }
        });
        Self {
            lattice: LatticeJson::from_lattice(u.lattice()),
            real: u.is_real_flagged(),
            coeffs,
        }
    }

    pub fn to_field<T: Scalar>(&self) -> Result<FourierField<T>, SpectralError> {
        let lattice = self.lattice.to_lattice()?;
        let mut u = FourierField::zeros(&lattice);
        for (ell, j, re, im) in &self.coeffs {
            let idx = lattice.index_of(ell, *j).ok_or_else(|| {
                SpectralError::InvalidParameter(format!(
                    "coefficient ({ell:?}, {j}) outside lattice {}",
                    lattice.describe()
                ))
            })?;
            u.coeffs_mut()[idx] = Complex::new(T::fr(*re), T::fr(*im));
        }
        u.set_real_flag(self.real);
        Ok(u)
    }
}
