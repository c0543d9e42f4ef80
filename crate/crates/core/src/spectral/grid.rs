use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer wavevector on the 2π-periodic torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Wavevector {
    pub k1: i32,
    pub k2: i32,
}

impl Wavevector {
    pub const ZERO: Wavevector = Wavevector { k1: 0, k2: 0 };

    pub const fn new(k1: i32, k2: i32) -> Self {
        Wavevector { k1, k2 }
    }

    pub fn norm_sq(self) -> f64 {
        let (a, b) = (self.k1 as f64, self.k2 as f64);
        a * a + b * b
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_zero(self) -> bool {
        self.k1 == 0 && self.k2 == 0
    }

    /// Canonical half-plane: k2 > 0, or k2 = 0 and k1 > 0.
    pub fn is_canonical(self) -> bool {
        self.k2 > 0 || (self.k2 == 0 && self.k1 > 0)
    }

    pub fn max_abs(self) -> i32 {
        self.k1.abs().max(self.k2.abs())
    }
}

impl std::ops::Neg for Wavevector {
    type Output = Wavevector;
    fn neg(self) -> Wavevector {
        Wavevector::new(-self.k1, -self.k2)
    }
}

impl std::ops::Add for Wavevector {
    type Output = Wavevector;
    fn add(self, rhs: Wavevector) -> Wavevector {
        Wavevector::new(self.k1 + rhs.k1, self.k2 + rhs.k2)
    }
}

impl std::ops::Sub for Wavevector {
    type Output = Wavevector;
    fn sub(self, rhs: Wavevector) -> Wavevector {
        Wavevector::new(self.k1 - rhs.k1, self.k2 - rhs.k2)
    }
}

impl fmt::Display for Wavevector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k1, self.k2)
    }
}

/// Square periodic grid on [0, 2π)² with `n` points per dimension.
///
/// Coefficients are stored row-major in FFT order: index `j` along an axis
/// holds wavenumber `j` for `j < n/2` and `j - n` for `j > n/2`. The column
/// `j = n/2` is the Nyquist mode and is kept at zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(n));
        }
        Ok(GridSpec { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nyquist(&self) -> i32 {
        (self.n / 2) as i32
    }

    /// Largest retained |k_i| after 2/3-rule truncation.
    ///
    /// Retained modes satisfy `3·max(|k1|,|k2|) < n`, so products of two
    /// retained modes never alias back into the retained band.
    pub fn dealias_cutoff(&self) -> i32 {
        ((self.n - 1) / 3) as i32
    }

    pub fn is_dealiased(&self, k: Wavevector) -> bool {
        k.max_abs() <= self.dealias_cutoff()
    }

    pub fn is_nyquist(&self, k: Wavevector) -> bool {
        let ny = self.nyquist();
        k.k1.abs() == ny || k.k2.abs() == ny
    }

    /// Whether `k` is representable on this grid without touching Nyquist.
    pub fn contains(&self, k: Wavevector) -> bool {
        k.max_abs() < self.nyquist()
    }

    fn axis_index(&self, k: i32) -> usize {
        let n = self.n as i32;
        k.rem_euclid(n) as usize
    }

    fn axis_wavenumber(&self, j: usize) -> i32 {
        if j <= self.n / 2 {
            j as i32
        } else {
            j as i32 - self.n as i32
        }
    }

    pub fn index(&self, k: Wavevector) -> usize {
        self.axis_index(k.k1) * self.n + self.axis_index(k.k2)
    }

    pub fn wavevector(&self, idx: usize) -> Wavevector {
        Wavevector::new(
            self.axis_wavenumber(idx / self.n),
            self.axis_wavenumber(idx % self.n),
        )
    }

    /// Index of the mode `-k` for the mode stored at `idx`.
    pub fn partner(&self, idx: usize) -> usize {
        let (i, j) = (idx / self.n, idx % self.n);
        ((self.n - i) % self.n) * self.n + (self.n - j) % self.n
    }

    /// All wavevectors in storage order.
    pub fn wavevectors(&self) -> impl Iterator<Item = Wavevector> + '_ {
        (0..self.len()).map(move |i| self.wavevector(i))
    }

    /// Physical collocation coordinate along one axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * j as f64 / self.n as f64
    }
}
