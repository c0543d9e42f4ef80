use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Square 2D complex FFT pair with the `θ(x) = Σ θ̂(k) e^{ik·x}` convention:
/// `forward` divides by n², `inverse` is unnormalized.
pub struct Transform {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Transform {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Transform {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Shared, cached transform for grids of size `n`.
    pub fn for_size(n: usize) -> Arc<Transform> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Transform>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("transform cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(Transform::new(n)))
            .clone()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Physical samples → Fourier coefficients, in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(&*self.forward, data);
        let scale = 1.0 / (self.n * self.n) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    /// Fourier coefficients → physical samples, in place.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(&*self.inverse, data);
    }

    fn apply(&self, fft: &dyn Fft<f64>, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n * self.n, "buffer does not match grid");
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        // rows are contiguous; transpose to reach the columns
        fft.process_with_scratch(data, &mut scratch);
        transpose_square(data, self.n);
        fft.process_with_scratch(data, &mut scratch);
        transpose_square(data, self.n);
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}
