//! Central finite differences with automatic step selection.
//!
//! The step comes from a log-spaced sweep: the sweep evaluates the
//! Richardson-extrapolated stencil at each step and picks the plateau
//! where consecutive estimates agree best, balancing truncation against
//! roundoff without needing derivative bounds.

/// k-th derivative at `x` (k = 1..=4).  Returns (value, error estimate).
pub fn central_derivative(f: &dyn Fn(f64) -> f64, x: f64, k: usize) -> (f64, f64) {
    assert!((1..=4).contains(&k), "stencils provided for k = 1..=4");
    let scale = x.abs().max(1.0);
    let steps: Vec<f64> = (0..28).map(|i| scale * 10f64.powf(-0.25 * i as f64 - 1.0)).collect();
    let mut vals = Vec::with_capacity(steps.len());
    for &h in &steps {
        let d1 = stencil(f, x, h, k);
        let d2 = stencil(f, x, h / 2.0, k);
        // Richardson: leading h^2 error cancels
        let r = (4.0 * d2 - d1) / 3.0;
        vals.push(r);
    }
    let mut best = (f64::INFINITY, 0usize);
    for i in 0..vals.len() - 1 {
        let d = (vals[i + 1] - vals[i]).abs();
        if d < best.0 {
            best = (d, i + 1);
        }
    }
    (vals[best.1], best.0)
}

fn stencil(f: &dyn Fn(f64) -> f64, x: f64, h: f64, k: usize) -> f64 {
    match k {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
        4 => {
            (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                / (h * h * h * h)
        }
        _ => unreachable!(),
    }
}
