//! Cached FFT plans and n-dimensional transforms on flat buffers.

use crate::Scalar;
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type PlanKey = (TypeId, usize, bool);

static PLANS: OnceLock<Mutex<HashMap<PlanKey, Box<dyn Any + Send>>>> = OnceLock::new();

fn plan<T: Scalar>(n: usize, inverse: bool) -> Arc<dyn Fft<T>> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    let key = (TypeId::of::<T>(), n, inverse);
    if let Some(entry) = guard.get(&key) {
        return entry
            .downcast_ref::<Arc<dyn Fft<T>>>()
            .expect("plan cache type")
            .clone();
    }
    let mut planner = FftPlanner::<T>::new();
    let p = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    guard.insert(key, Box::new(p.clone()));
    p
}

/// Unnormalized FFT along every axis of a row-major array.  `inverse`
/// uses the e^{+i} kernel (synthesis); forward uses e^{-i} (analysis,
/// caller divides by the total length).
pub fn fft_nd<T: Scalar>(data: &mut [Complex<T>], dims: &[usize], inverse: bool) {
    debug_assert_eq!(data.len(), dims.iter().product::<usize>());
    for (ax, &n) in dims.iter().enumerate() {
        if n == 1 {
            continue;
        }
        let fft = plan::<T>(n, inverse);
        let inner: usize = dims[ax + 1..].iter().product();
        if inner == 1 {
            for chunk in data.chunks_exact_mut(n) {
                fft.process(chunk);
            }
        } else {
            let outer: usize = dims[..ax].iter().product();
            let mut line = vec![Complex::<T>::default(); n];
            for o in 0..outer {
                for i in 0..inner {
                    let base = o * n * inner + i;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + k * inner];
                    }
                    fft.process(&mut line);
                    for (k, v) in line.iter().enumerate() {
                        data[base + k * inner] = *v;
                    }
                }
            }
        }
    }
}

/// Transform only the selected axes (used for partial synthesis in phi).
pub fn fft_axes<T: Scalar>(data: &mut [Complex<T>], dims: &[usize], axes: &[usize], inverse: bool) {
    for &ax in axes {
        let n = dims[ax];
        if n == 1 {
            continue;
        }
        let fft = plan::<T>(n, inverse);
        let inner: usize = dims[ax + 1..].iter().product();
        let outer: usize = dims[..ax].iter().product();
        if inner == 1 {
            for o in 0..outer {
                fft.process(&mut data[o * n..(o + 1) * n]);
            }
        } else {
            let mut line = vec![Complex::<T>::default(); n];
            for o in 0..outer {
                for i in 0..inner {
                    let base = o * n * inner + i;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + k * inner];
                    }
                    fft.process(&mut line);
                    for (k, v) in line.iter().enumerate() {
                        data[base + k * inner] = *v;
                    }
                }
            }
        }
    }
}
