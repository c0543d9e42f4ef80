//! Initial data.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{GridSpec, SpectralField, Wavevector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// `A cos(k·x)`.
    SingleMode,
    /// `A cos(k1 x1)` plus a half-amplitude `sin(2 k1 x1)` harmonic: depends
    /// on `x1` only, so the transport term vanishes.
    X1Profile,
    /// Gaussian coefficients on `band_min ≤ |k| ≤ band_max`, rescaled to
    /// `‖θ‖_{L²} = A`.
    RandomBand,
    /// `A cos(k·x) + A cos(k'·x)`.
    TwoMode,
}

impl InitKind {
    pub const ALL: [InitKind; 4] = [
        InitKind::SingleMode,
        InitKind::X1Profile,
        InitKind::RandomBand,
        InitKind::TwoMode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InitKind::SingleMode => "single_mode",
            InitKind::X1Profile => "x1_profile",
            InitKind::RandomBand => "random_band",
            InitKind::TwoMode => "two_mode",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    pub kind: InitKind,
    pub amplitude: f64,
    pub band_min: f64,
    pub band_max: f64,
    pub seed: u64,
    pub mode: Wavevector,
    pub mode2: Wavevector,
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        InitialDataSpec {
            kind: InitKind::RandomBand,
            amplitude: 0.1,
            band_min: 1.0,
            band_max: 8.0,
            seed: 0,
            mode: Wavevector::new(1, 0),
            mode2: Wavevector::new(0, 2),
        }
    }
}

fn cos_mode(grid: GridSpec, k: Wavevector, amp: f64) -> Result<SpectralField> {
    if k.is_zero() {
        return Err(Error::InvalidParameter("mode must be nonzero".into()));
    }
    check_band(grid, k.norm(), k.norm())?;
    SpectralField::from_modes(grid, [(k, Complex64::new(0.5 * amp, 0.0))])
}

fn check_band(grid: GridSpec, min: f64, max: f64) -> Result<()> {
    let cutoff = grid.dealias_cutoff();
    if !(min > 0.0 && min <= max && max <= cutoff as f64) {
        return Err(Error::BandOutOfRange {
            min,
            max,
            n: grid.n(),
            cutoff,
        });
    }
    Ok(())
}

/// Complex Gaussian coefficients on the band, Hermitian-completed and
/// rescaled to `‖θ‖_{L²} = amplitude`.
pub fn random_band<R: Rng>(
    grid: GridSpec,
    band_min: f64,
    band_max: f64,
    amplitude: f64,
    rng: &mut R,
) -> Result<SpectralField> {
    check_band(grid, band_min, band_max)?;
    let mut modes = Vec::new();
    for k in grid.wavevectors() {
        let r = k.norm();
        if k.is_canonical() && r >= band_min && r <= band_max && grid.is_dealiased(k) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            modes.push((k, Complex64::new(re, im)));
        }
    }
    let field = SpectralField::from_modes(grid, modes)?;
    let norm = field.l2_norm();
    if norm == 0.0 {
        return Ok(field);
    }
    Ok(field.scaled(amplitude / norm))
}

/// Builds `θ⁰`; deterministic given the spec.
pub fn generate_initial_data(spec: &InitialDataSpec, grid: GridSpec) -> Result<SpectralField> {
    if !spec.amplitude.is_finite() {
        return Err(Error::InvalidParameter("amplitude must be finite".into()));
    }
    match spec.kind {
        InitKind::SingleMode => cos_mode(grid, spec.mode, spec.amplitude),
        InitKind::X1Profile => {
            let k1 = spec.mode.k1;
            if k1 == 0 {
                return Err(Error::InvalidParameter(
                    "x1_profile needs mode k1 != 0".into(),
                ));
            }
            let base = cos_mode(grid, Wavevector::new(k1, 0), spec.amplitude)?;
            let h = Wavevector::new(2 * k1, 0);
            check_band(grid, h.norm(), h.norm())?;
            let harmonic = SpectralField::from_modes(
                grid,
                [(h, Complex64::new(0.0, -0.25 * spec.amplitude))],
            )?;
            Ok(&base + &harmonic)
        }
        InitKind::RandomBand => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            random_band(grid, spec.band_min, spec.band_max, spec.amplitude, &mut rng)
        }
        InitKind::TwoMode => {
            if spec.mode == spec.mode2 || spec.mode == -spec.mode2 {
                return Err(Error::InvalidParameter(
                    "two_mode needs distinct modes".into(),
                ));
            }
            Ok(&cos_mode(grid, spec.mode, spec.amplitude)?
                + &cos_mode(grid, spec.mode2, spec.amplitude)?)
        }
    }
}
