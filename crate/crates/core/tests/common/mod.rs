//! Independent test oracles: brute-force sums written directly from the
//! definitions, sharing no code paths with the library beyond data access.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqg_core::{GridSpec, SpectralField, Wavevector};

pub fn grid(n: usize) -> GridSpec {
    GridSpec::new(n).unwrap()
}

/// Uniform random coefficients on `1 ≤ |k| ≤ band` (Hermitian-completed).
pub fn random_field(n: usize, band: f64, seed: u64) -> SpectralField {
    let g = grid(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    for k2 in 0..=(band as i32) {
        for k1 in -(band as i32)..=(band as i32) {
            let k = Wavevector::new(k1, k2);
            let r = k.norm();
            let canonical = k2 > 0 || (k2 == 0 && k1 > 0);
            if canonical && r <= band && g.contains(k) && !g.is_nyquist(k) {
                let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                modes.push((k, c));
            }
        }
    }
    SpectralField::from_modes(g, modes).unwrap()
}

/// `u·∇θ` by the double sum over all mode pairs `p + q = k`, restricted to
/// the 2/3 band on both operands and the result.
pub fn direct_transport(theta: &SpectralField) -> Vec<(Wavevector, Complex64)> {
    let g = theta.grid();
    let cut = (g.n() as i32 - 1) / 3;
    let inside = |k: Wavevector| k.k1.abs() <= cut && k.k2.abs() <= cut;
    let modes: Vec<(Wavevector, Complex64)> = theta.modes().filter(|(k, _)| inside(*k)).collect();
    let i = Complex64::new(0.0, 1.0);
    let mut out = std::collections::BTreeMap::<Wavevector, Complex64>::new();
    for (p, tp) in &modes {
        let r = ((p.k1 * p.k1 + p.k2 * p.k2) as f64).sqrt();
        let u1 = -i * (p.k2 as f64) * tp / r;
        let u2 = i * (p.k1 as f64) * tp / r;
        for (q, tq) in &modes {
            let k = Wavevector::new(p.k1 + q.k1, p.k2 + q.k2);
            if !inside(k) || k.is_zero() {
                continue;
            }
            let grad1 = i * (q.k1 as f64) * tq;
            let grad2 = i * (q.k2 as f64) * tq;
            *out.entry(k).or_default() += u1 * grad1 + u2 * grad2;
        }
    }
    out.into_iter().collect()
}

/// `Σ w(k)|θ̂(k)|²` by direct iteration.
pub fn weighted_sq(theta: &SpectralField, w: impl Fn(f64) -> f64) -> f64 {
    theta.modes().map(|(k, c)| w(k.norm()) * c.norm_sqr()).sum()
}

/// `Σ_m (2a)^m/m! ‖θ‖²_{Ḣ^{s + m·alpha/2}}`, summed until the next term is
/// below `1e-17` of the partial sum.
pub fn gevrey_series_sq(theta: &SpectralField, a: f64, s: f64, alpha: f64) -> f64 {
    let mut total = 0.0;
    let mut coef = 1.0;
    for m in 0..10_000 {
        let order = s + m as f64 * alpha / 2.0;
        let term = coef * weighted_sq(theta, |r| r.powf(2.0 * order));
        total += term;
        if m > 0 && term < 1e-17 * total {
            break;
        }
        coef *= 2.0 * a / (m as f64 + 1.0);
    }
    total
}

/// Real L² inner product of two spectral fields.
pub fn inner(f: &SpectralField, g: &SpectralField) -> f64 {
    f.coeffs()
        .iter()
        .zip(g.coeffs())
        .map(|(a, b)| (a * b.conj()).re)
        .sum()
}

/// Largest coefficient error of `f` against the oracle modes, relative to
/// `Σ|θ̂|·Σ|k||θ̂|`, which bounds every coefficient of the transport term.
pub fn max_rel_err(
    oracle: &[(Wavevector, Complex64)],
    f: &SpectralField,
    theta: &SpectralField,
) -> f64 {
    let l1: f64 = theta.modes().map(|(_, c)| c.norm()).sum();
    let l1k: f64 = theta.modes().map(|(k, c)| k.norm() * c.norm()).sum();
    let scale = (l1 * l1k).max(f64::MIN_POSITIVE);
    let mut err: f64 = 0.0;
    for (k, c) in oracle {
        err = err.max((f.coeff(*k) - c).norm());
    }
    // modes present in f but absent from the oracle
    for (k, c) in f.modes() {
        if !oracle.iter().any(|(q, _)| *q == k) {
            err = err.max(c.norm());
        }
    }
    err / scale
}
