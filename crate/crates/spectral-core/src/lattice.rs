use crate::SpectralError;
use serde::{Deserialize, Serialize};

/// Maximum number of angle variables supported by the fixed-size index
/// buffers used in hot loops.
pub const MAX_NU: usize = 4;

/// Index box for the modes (l, j) of a truncated Fourier series on
/// T^nu x T, together with the collocation grid sizes used for
/// alias-free quadratic products (>= 3/2 oversampling per axis).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeLattice {
    nu: usize,
    l_max: usize,
    j_max: usize,
    phi_grid: usize,
    x_grid: usize,
}

fn oversampled(modes: usize) -> usize {
    // ceil(3/2 * modes)
    (3 * modes).div_ceil(2)
}

impl ModeLattice {
    pub fn new(nu: usize, l_max: usize, j_max: usize) -> Result<Self, SpectralError> {
        if nu == 0 || nu > MAX_NU {
            return Err(SpectralError::InvalidParameter(format!(
                "nu must lie in 1..={MAX_NU}, got {nu}"
            )));
        }
        if l_max == 0 || j_max == 0 {
            return Err(SpectralError::InvalidParameter(
                "truncations must be >= 1".into(),
            ));
        }
        Ok(Self {
            nu,
            l_max,
            j_max,
            phi_grid: oversampled(2 * l_max + 1),
            x_grid: oversampled(2 * j_max + 1),
        })
    }

    /// Same mode box but custom collocation sizes (still >= 3/2 oversampled).
    pub fn with_grids(
        nu: usize,
        l_max: usize,
        j_max: usize,
        phi_grid: usize,
        x_grid: usize,
    ) -> Result<Self, SpectralError> {
        let base = Self::new(nu, l_max, j_max)?;
        if phi_grid < base.phi_grid || x_grid < base.x_grid {
            return Err(SpectralError::InvalidParameter(format!(
                "collocation sizes must be at least ({}, {})",
                base.phi_grid, base.x_grid
            )));
        }
        Ok(Self {
            phi_grid,
            x_grid,
            ..base
        })
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn phi_grid(&self) -> usize {
        self.phi_grid
    }

    pub fn x_grid(&self) -> usize {
        self.x_grid
    }

    /// Modes per phi axis, 2 L_phi + 1.
    pub fn phi_modes(&self) -> usize {
        2 * self.l_max + 1
    }

    /// Modes on the x axis, 2 J_x + 1.
    pub fn x_modes(&self) -> usize {
        2 * self.j_max + 1
    }

    /// Total number of stored modes.
    pub fn num_modes(&self) -> usize {
        self.phi_modes().pow(self.nu as u32) * self.x_modes()
    }

    /// Total collocation points.
    pub fn num_grid(&self) -> usize {
        self.phi_grid.pow(self.nu as u32) * self.x_grid
    }

    /// Low Sobolev index floor((nu+1)/2)+1 for this lattice.
    pub fn s0(&self) -> f64 {
        crate::s0(self.nu)
    }

    /// Flat storage index of the mode (l, j); row-major over
    /// (l_1, ..., l_nu, j) with each axis offset to 0..len.
    pub fn index_of(&self, ell: &[i64], j: i64) -> Option<usize> {
        if ell.len() != self.nu {
            return None;
        }
        let l = self.l_max as i64;
        let mut idx = 0usize;
        for &li in ell {
            if li.abs() > l {
                return None;
            }
            idx = idx * self.phi_modes() + (li + l) as usize;
        }
        if j.abs() > self.j_max as i64 {
            return None;
        }
        Some(idx * self.x_modes() + (j + self.j_max as i64) as usize)
    }

    /// Inverse of [`index_of`]: writes l into `ell` and returns j.
    pub fn mode_at(&self, mut idx: usize, ell: &mut [i64; MAX_NU]) -> i64 {
        let j = (idx % self.x_modes()) as i64 - self.j_max as i64;
        idx /= self.x_modes();
        for d in (0..self.nu).rev() {
            ell[d] = (idx % self.phi_modes()) as i64 - self.l_max as i64;
            idx /= self.phi_modes();
        }
        j
    }

    /// Weight <l,j> = max(1, |l|, |j|) with |l| the l^1 norm.
    pub fn weight(ell: &[i64], j: i64) -> f64 {
        let l1: i64 = ell.iter().map(|v| v.abs()).sum();
        l1.max(j.abs()).max(1) as f64
    }

    /// Run `f` over every mode as (flat index, l, j).
    pub fn for_each_mode(&self, mut f: impl FnMut(usize, &[i64], i64)) {
        let mut ell = [0i64; MAX_NU];
        for idx in 0..self.num_modes() {
            let j = self.mode_at(idx, &mut ell);
            f(idx, &ell[..self.nu], j);
        }
    }

    /// Grid dimensions [phi_grid; nu] ++ [x_grid].
    pub fn grid_dims(&self) -> Vec<usize> {
        let mut d = vec![self.phi_grid; self.nu];
        d.push(self.x_grid);
        d
    }

    /// Mode dimensions [2L+1; nu] ++ [2J+1].
    pub fn mode_dims(&self) -> Vec<usize> {
        let mut d = vec![self.phi_modes(); self.nu];
        d.push(self.x_modes());
        d
    }

    pub fn describe(&self) -> String {
        format!(
            "nu={} L={} J={} grid={}^{}x{}",
            self.nu, self.l_max, self.j_max, self.phi_grid, self.nu, self.x_grid
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oversampling_meets_three_halves() {
        let lat = ModeLattice::new(1, 16, 16).unwrap();
        assert_eq!(lat.phi_grid(), 50);
        assert_eq!(lat.x_grid(), 50);
        assert!(lat.phi_grid() * 2 >= 3 * lat.phi_modes());
    }

    #[test]
    fn index_roundtrip() {
        let lat = ModeLattice::new(2, 3, 5).unwrap();
        let mut seen = vec![false; lat.num_modes()];
        lat.for_each_mode(|idx, ell, j| {
            assert_eq!(lat.index_of(ell, j), Some(idx));
            seen[idx] = true;
        });
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn weight_is_max_of_one_l1_j() {
        assert_eq!(ModeLattice::weight(&[0], 0), 1.0);
        assert_eq!(ModeLattice::weight(&[-2, 1], 2), 3.0);
        assert_eq!(ModeLattice::weight(&[1], -7), 7.0);
    }
}
