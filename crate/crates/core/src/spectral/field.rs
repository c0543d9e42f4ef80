use num_complex::Complex64;

use super::fft::Transform;
use super::grid::{GridSpec, Wavevector};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fourier coefficients of a real, mean-zero scalar on the periodic grid.
///
/// Every constructor leaves the field exactly Hermitian with zero mean and
/// zero Nyquist row/column.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField {
            grid,
            coeffs: vec![ZERO; grid.len()],
        }
    }

    /// Builds a field from raw coefficients in storage order, projecting onto
    /// the invariants (Hermitian average, zero mean, zero Nyquist).
    pub fn from_coeffs_projected(grid: GridSpec, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        project(grid, &mut coeffs);
        Ok(SpectralField { grid, coeffs })
    }

    /// Builds a field from raw coefficients, rejecting any invariant violation.
    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        let field = SpectralField { grid, coeffs };
        field.check_invariants()?;
        Ok(field)
    }

    /// Sets `coeff(k)` and `coeff(-k) = conj` for each listed mode. Later
    /// entries overwrite earlier ones; listing both `k` and `-k` keeps the last.
    pub fn from_modes<I>(grid: GridSpec, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Wavevector, Complex64)>,
    {
        let mut coeffs = vec![ZERO; grid.len()];
        for (k, c) in modes {
            if !grid.contains(k) {
                return Err(Error::InvalidField(format!(
                    "mode {k} not representable on n = {}",
                    grid.n()
                )));
            }
            if k.is_zero() {
                if c != ZERO {
                    return Err(Error::InvalidField("nonzero mean mode".into()));
                }
                continue;
            }
            coeffs[grid.index(k)] = c;
            coeffs[grid.index(-k)] = c.conj();
        }
        Ok(SpectralField { grid, coeffs })
    }

    /// Real physical samples `values[j1 * n + j2] = θ(x1_j1, x2_j2)`.
    ///
    /// The mean and the Nyquist content are discarded.
    pub fn from_physical(grid: GridSpec, values: &[f64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Transform::for_size(grid.n()).forward(&mut buf);
        project(grid, &mut buf);
        Ok(SpectralField { grid, coeffs: buf })
    }

    /// Samples on the collocation grid, same layout as [`Self::from_physical`].
    pub fn to_physical(&self) -> Vec<f64> {
        let mut buf = self.coeffs.clone();
        Transform::for_size(self.grid.n()).inverse(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    pub(crate) fn from_raw_unchecked(grid: GridSpec, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectralField { grid, coeffs }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeff(&self, k: Wavevector) -> Complex64 {
        if !self.grid.contains(k) {
            return ZERO;
        }
        self.coeffs[self.grid.index(k)]
    }

    /// Coefficients in storage order (see [`GridSpec`]).
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Nonzero modes with their coefficients.
    pub fn modes(&self) -> impl Iterator<Item = (Wavevector, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(move |(i, c)| (self.grid.wavevector(i), *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn is_hermitian(&self) -> bool {
        (0..self.coeffs.len()).all(|i| {
            let p = self.grid.partner(i);
            self.coeffs[i] == self.coeffs[p].conj()
        })
    }

    pub fn is_mean_zero(&self) -> bool {
        self.coeffs[0] == ZERO
    }

    pub fn check_invariants(&self) -> Result<()> {
        if !self.is_mean_zero() {
            return Err(Error::InvalidField("mean mode is nonzero".into()));
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.grid.wavevector(i);
            if self.grid.is_nyquist(k) && *c != ZERO {
                return Err(Error::InvalidField(format!("Nyquist mode {k} is nonzero")));
            }
            if *c != self.coeffs[self.grid.partner(i)].conj() {
                return Err(Error::InvalidField(format!(
                    "Hermitian symmetry broken at {k}"
                )));
            }
        }
        Ok(())
    }

    /// Largest `max(|k1|, |k2|)` over nonzero modes (0 for the zero field).
    pub fn bandwidth(&self) -> i32 {
        self.modes().map(|(k, _)| k.max_abs()).max().unwrap_or(0)
    }

    pub fn is_dealiased(&self) -> bool {
        self.modes().all(|(k, _)| self.grid.is_dealiased(k))
    }

    /// Σ|θ̂(k)|², the mean square of the physical field.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Real L² inner product Σ Re(f̂ conj ĝ).
    pub fn inner_l2(&self, other: &SpectralField) -> f64 {
        self.assert_same_grid(other);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// `self += factor * other`
    pub fn add_scaled(&mut self, factor: f64, other: &SpectralField) {
        self.assert_same_grid(other);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * factor;
        }
    }

    /// Zeroes every mode outside the 2/3-rule band.
    pub fn dealiased(&self) -> SpectralField {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if !self.grid.is_dealiased(self.grid.wavevector(i)) {
                *c = ZERO;
            }
        }
        out
    }

    /// Same field on a larger grid (zero padded). Fails if `target` is smaller
    /// than the field's bandwidth allows.
    pub fn resampled(&self, target: GridSpec) -> Result<SpectralField> {
        let mut coeffs = vec![ZERO; target.len()];
        for (k, c) in self.modes() {
            if !target.contains(k) {
                return Err(Error::InvalidField(format!(
                    "mode {k} does not fit on n = {}",
                    target.n()
                )));
            }
            coeffs[target.index(k)] = c;
        }
        Ok(SpectralField {
            grid: target,
            coeffs,
        })
    }

    fn assert_same_grid(&self, other: &SpectralField) {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
    }
}

impl std::ops::Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.add_scaled(1.0, rhs);
        out
    }
}

impl std::ops::Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}

/// Forces Hermitian pairing, zero mean and zero Nyquist in place.
pub(crate) fn project(grid: GridSpec, coeffs: &mut [Complex64]) {
    for idx in 0..coeffs.len() {
        let k = grid.wavevector(idx);
        if k.is_zero() || grid.is_nyquist(k) {
            coeffs[idx] = ZERO;
        } else if k.is_canonical() {
            let p = grid.partner(idx);
            let avg = (coeffs[idx] + coeffs[p].conj()) * 0.5;
            coeffs[idx] = avg;
            coeffs[p] = avg.conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    #[test]
    fn physical_roundtrip_of_single_mode() {
        let g = grid(16);
        let n = g.n();
        let values: Vec<f64> = (0..g.len())
            .map(|i| {
                let (x1, x2) = (g.coordinate(i / n), g.coordinate(i % n));
                2.0 * (x1 + 2.0 * x2).cos() + (3.0 * x2).sin()
            })
            .collect();
        let f = SpectralField::from_physical(g, &values).unwrap();
        assert!(f.is_hermitian());
        assert!((f.coeff(Wavevector::new(1, 2)).re - 1.0).abs() < 1e-14);
        assert!((f.coeff(Wavevector::new(0, 3)).im + 0.5).abs() < 1e-14);
        let back = f.to_physical();
        for (a, b) in back.iter().zip(&values) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn from_coeffs_rejects_broken_symmetry() {
        let g = grid(8);
        let mut coeffs = vec![ZERO; g.len()];
        coeffs[g.index(Wavevector::new(1, 0))] = Complex64::new(1.0, 0.0);
        assert!(SpectralField::from_coeffs(g, coeffs.clone()).is_err());
        coeffs[g.index(Wavevector::new(-1, 0))] = Complex64::new(1.0, 0.0);
        assert!(SpectralField::from_coeffs(g, coeffs.clone()).is_ok());
        coeffs[0] = Complex64::new(0.1, 0.0);
        assert!(SpectralField::from_coeffs(g, coeffs).is_err());
    }

    #[test]
    fn projection_drops_mean_and_nyquist() {
        let g = grid(8);
        let values: Vec<f64> = (0..g.len())
            .map(|i| {
                3.0 + if (i / g.n()).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        let f = SpectralField::from_physical(g, &values).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn from_modes_rejects_nyquist_and_mean() {
        let g = grid(8);
        let one = Complex64::new(1.0, 0.0);
        assert!(SpectralField::from_modes(g, [(Wavevector::new(4, 0), one)]).is_err());
        assert!(SpectralField::from_modes(g, [(Wavevector::ZERO, one)]).is_err());
    }
}
