//! Linear frequencies of the finite-depth problem.

/// sqrt(j tanh(h j)); strictly increasing in j at fixed depth and in
/// the depth at fixed j.
pub fn omega(j: usize, h: f64) -> f64 {
    assert!(j >= 1, "mode index must be positive");
    assert!(h > 0.0, "depth must be positive");
    let jf = j as f64;
    (jf * (h * jf).tanh()).sqrt()
}

/// Frequency vector over the given sites.
pub fn omega_vec(sites: &[usize], h: f64) -> Vec<f64> {
    sites.iter().map(|&j| omega(j, h)).collect()
}

/// omega_j - sqrt(j), the finite-depth correction; decays like exp(-h j).
pub fn deep_water_defect(j: usize, h: f64) -> f64 {
    omega(j, h) - (j as f64).sqrt()
}
