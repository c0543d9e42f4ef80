use num_complex::Complex64;

use super::fft::Transform;
use super::field::{project, SpectralField};
use super::grid::{GridSpec, Wavevector};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `|k|^beta`, with the zero mode mapped to 0 for every `beta`.
pub fn fractional_symbol(k: Wavevector, beta: f64) -> f64 {
    if k.is_zero() {
        return 0.0;
    }
    k.norm_sq().powf(0.5 * beta)
}

/// A real Fourier multiplier tabulated on a grid and verified to be even in k.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    grid: GridSpec,
    values: Vec<f64>,
}

impl SymbolTable {
    /// Tabulates `symbol` on every non-Nyquist, nonzero mode. The mean and
    /// Nyquist entries are never applied and are stored as 0.
    pub fn new(grid: GridSpec, symbol: impl Fn(Wavevector) -> f64) -> Result<Self> {
        let mut values = vec![0.0; grid.len()];
        for (idx, v) in values.iter_mut().enumerate() {
            let k = grid.wavevector(idx);
            if k.is_zero() || grid.is_nyquist(k) {
                continue;
            }
            let plus = symbol(k);
            if !plus.is_finite() {
                return Err(Error::NonFiniteSymbol { k });
            }
            let minus = symbol(-k);
            if plus != minus {
                return Err(Error::NonEvenSymbol { k, plus, minus });
            }
            *v = plus;
        }
        Ok(SymbolTable { grid, values })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: Wavevector) -> f64 {
        if self.grid.contains(k) {
            self.values[self.grid.index(k)]
        } else {
            0.0
        }
    }

    pub fn apply(&self, theta: &SpectralField) -> SpectralField {
        assert_eq!(theta.grid(), self.grid, "symbol and field grids differ");
        let coeffs = theta
            .coeffs()
            .iter()
            .zip(&self.values)
            .map(|(c, m)| if *c == ZERO { ZERO } else { c * m })
            .collect();
        SpectralField::from_raw_unchecked(self.grid, coeffs)
    }
}

/// Coefficient-wise product with a real multiplier that must be even in k.
pub fn apply_operator(
    theta: &SpectralField,
    symbol: impl Fn(Wavevector) -> f64,
) -> Result<SpectralField> {
    Ok(SymbolTable::new(theta.grid(), symbol)?.apply(theta))
}

/// Riesz-transform velocity `u = (-∂₂|D|⁻¹θ, ∂₁|D|⁻¹θ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    pub u1: SpectralField,
    pub u2: SpectralField,
}

impl VelocityField {
    /// Largest `|k·û(k)|` relative to `|k||û(k)|` over all modes.
    pub fn max_divergence(&self) -> f64 {
        let grid = self.u1.grid();
        let mut worst: f64 = 0.0;
        for (idx, (a, b)) in self.u1.coeffs().iter().zip(self.u2.coeffs()).enumerate() {
            let k = grid.wavevector(idx);
            let div = *a * k.k1 as f64 + *b * k.k2 as f64;
            let scale = k.norm() * (a.norm_sqr() + b.norm_sqr()).sqrt();
            if scale > 0.0 {
                worst = worst.max(div.norm() / scale);
            }
        }
        worst
    }

    /// Largest relative mismatch between `|û(k)|` and `|θ̂(k)|`.
    pub fn max_magnitude_mismatch(&self, theta: &SpectralField) -> f64 {
        let mut worst: f64 = 0.0;
        for ((a, b), t) in self
            .u1
            .coeffs()
            .iter()
            .zip(self.u2.coeffs())
            .zip(theta.coeffs())
        {
            let u = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let th = t.norm();
            if th > 0.0 {
                worst = worst.max((u - th).abs() / th);
            } else {
                worst = worst.max(u);
            }
        }
        worst
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.u1.l2_norm_sq() + self.u2.l2_norm_sq()
    }
}

pub fn riesz_velocity(theta: &SpectralField) -> VelocityField {
    let grid = theta.grid();
    let mut u1 = vec![ZERO; grid.len()];
    let mut u2 = vec![ZERO; grid.len()];
    for (idx, c) in theta.coeffs().iter().enumerate() {
        if *c == ZERO {
            continue;
        }
        let k = grid.wavevector(idx);
        let f = c / k.norm();
        u1[idx] = -I * (f * k.k2 as f64);
        u2[idx] = I * (f * k.k1 as f64);
    }
    VelocityField {
        u1: SpectralField::from_raw_unchecked(grid, u1),
        u2: SpectralField::from_raw_unchecked(grid, u2),
    }
}

/// Dealiased spectral coefficients of the transport term `u_θ·∇θ`.
///
/// Modes outside the 2/3 band are dropped from `θ` first. The velocity and
/// gradient are then brought to physical space (two real fields packed per
/// complex transform), multiplied pointwise, transformed back and truncated
/// to the 2/3 band, which makes the result the exact Galerkin product.
pub fn nonlinear_term(theta: &SpectralField) -> SpectralField {
    let grid = theta.grid();
    let transform = Transform::for_size(grid.n());
    let len = grid.len();
    // za = u1 + i ∂₁θ, zb = u2 + i ∂₂θ; both halves are real in physical space
    let mut za = vec![ZERO; len];
    let mut zb = vec![ZERO; len];
    for (idx, c) in theta.coeffs().iter().enumerate() {
        let k = grid.wavevector(idx);
        if *c == ZERO || !grid.is_dealiased(k) {
            continue;
        }
        let (k1, k2) = (k.k1 as f64, k.k2 as f64);
        let f = c / k.norm();
        let u1 = -I * (f * k2);
        let u2 = I * (f * k1);
        let d1 = I * (c * k1);
        let d2 = I * (c * k2);
        za[idx] = u1 + I * d1;
        zb[idx] = u2 + I * d2;
    }
    transform.inverse(&mut za);
    transform.inverse(&mut zb);
    let mut prod: Vec<Complex64> = za
        .iter()
        .zip(&zb)
        .map(|(a, b)| Complex64::new(a.re * a.im + b.re * b.im, 0.0))
        .collect();
    transform.forward(&mut prod);
    for (idx, c) in prod.iter_mut().enumerate() {
        if !grid.is_dealiased(grid.wavevector(idx)) {
            *c = ZERO;
        }
    }
    project(grid, &mut prod);
    SpectralField::from_raw_unchecked(grid, prod)
}

/// `(∂₁θ, ∂₂θ)` in spectral space.
pub fn gradient(theta: &SpectralField) -> (SpectralField, SpectralField) {
    let grid = theta.grid();
    let mut d1 = vec![ZERO; grid.len()];
    let mut d2 = vec![ZERO; grid.len()];
    for (idx, c) in theta.coeffs().iter().enumerate() {
        let k = grid.wavevector(idx);
        d1[idx] = I * (c * k.k1 as f64);
        d2[idx] = I * (c * k.k2 as f64);
    }
    (
        SpectralField::from_raw_unchecked(grid, d1),
        SpectralField::from_raw_unchecked(grid, d2),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    fn cos_mode(g: GridSpec, k: Wavevector, amp: f64) -> SpectralField {
        SpectralField::from_modes(g, [(k, Complex64::new(0.5 * amp, 0.0))]).unwrap()
    }

    fn sin_mode(g: GridSpec, k: Wavevector, amp: f64) -> SpectralField {
        SpectralField::from_modes(g, [(k, Complex64::new(0.0, -0.5 * amp))]).unwrap()
    }

    #[test]
    fn fractional_symbol_examples() {
        assert_relative_eq!(fractional_symbol(Wavevector::new(3, 4), 0.5), 5f64.sqrt());
        assert_eq!(fractional_symbol(Wavevector::ZERO, -1.0), 0.0);
        assert_eq!(fractional_symbol(Wavevector::new(1, 0), 2.0 * 0.25), 1.0);
    }

    #[test]
    fn riesz_of_sin_x1_is_cos_x1_in_second_component() {
        let g = grid(16);
        let u = riesz_velocity(&sin_mode(g, Wavevector::new(1, 0), 1.0));
        assert!(u.u1.is_zero());
        assert_eq!(u.u2, cos_mode(g, Wavevector::new(1, 0), 1.0));
    }

    #[test]
    fn riesz_of_cos_x2_is_sin_x2_in_first_component() {
        let g = grid(16);
        let u = riesz_velocity(&cos_mode(g, Wavevector::new(0, 1), 1.0));
        assert_eq!(u.u1, sin_mode(g, Wavevector::new(0, 1), 1.0));
        assert!(u.u2.is_zero());
    }

    #[test]
    fn riesz_output_is_a_valid_field_pair() {
        let g = grid(16);
        let theta = SpectralField::from_modes(
            g,
            [
                (Wavevector::new(2, 3), Complex64::new(0.3, -0.7)),
                (Wavevector::new(-4, 1), Complex64::new(1.1, 0.2)),
            ],
        )
        .unwrap();
        let u = riesz_velocity(&theta);
        u.u1.check_invariants().unwrap();
        u.u2.check_invariants().unwrap();
        assert!(u.max_divergence() < 4.0 * f64::EPSILON);
        assert!(u.max_magnitude_mismatch(&theta) < 4.0 * f64::EPSILON);
    }

    #[test]
    fn nonlinear_term_vanishes_on_x1_profiles() {
        let g = grid(32);
        let theta =
            &cos_mode(g, Wavevector::new(1, 0), 1.0) + &sin_mode(g, Wavevector::new(3, 0), 0.4);
        let n = nonlinear_term(&theta);
        assert!(n.l2_norm() < 1e-15, "{}", n.l2_norm());
    }

    #[test]
    fn nonlinear_term_of_two_modes() {
        // cos(x1) + cos(2 x2)  ->  sin(x1) sin(2 x2)
        let g = grid(32);
        let theta =
            &cos_mode(g, Wavevector::new(1, 0), 1.0) + &cos_mode(g, Wavevector::new(0, 2), 1.0);
        let n = nonlinear_term(&theta);
        // sin a sin b = (cos(a-b) - cos(a+b)) / 2
        let expected =
            &cos_mode(g, Wavevector::new(1, -2), 0.5) - &cos_mode(g, Wavevector::new(1, 2), 0.5);
        let err = (&n - &expected).l2_norm();
        assert!(err < 1e-15, "err = {err}");
    }

    #[test]
    fn apply_operator_examples() {
        let g = grid(16);
        let theta = cos_mode(g, Wavevector::new(1, 0), 1.0);
        assert_eq!(apply_operator(&theta, |_| 1.0).unwrap(), theta);
        let lap = apply_operator(&theta, |k| k.norm_sq()).unwrap();
        assert_eq!(lap, theta);
        let heat = apply_operator(&theta, |k| (-fractional_symbol(k, 2.0 * 0.5)).exp()).unwrap();
        assert_relative_eq!(
            heat.coeff(Wavevector::new(1, 0)).re,
            0.5 * (-1f64).exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn apply_operator_rejects_odd_symbol() {
        let g = grid(16);
        let theta = cos_mode(g, Wavevector::new(1, 0), 1.0);
        let err = apply_operator(&theta, |k| k.k1 as f64).unwrap_err();
        assert!(matches!(err, Error::NonEvenSymbol { .. }));
        let err = apply_operator(&theta, |_| f64::NAN).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSymbol { .. }));
    }
}
