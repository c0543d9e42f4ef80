//! Discrete Sobolev, Gevrey–Sobolev and Fourier-Lebesgue norms.
//!
//! All norms are plain sums over the integer spectrum; there is no measure
//! factor. The Gevrey weight of order `alpha` at radius `a` is
//! `e^{a|k|^alpha}`, and the Sobolev weights are `(1 + |k|²)^{s/2}`
//! (inhomogeneous) or `|k|^s` (homogeneous). Squared weights are formed in
//! log space: a mode whose log weight exceeds the `f64` exponent range is an
//! error, never an infinity.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{GridSpec, SpectralField, Wavevector};

/// Natural log of `f64::MAX`.
pub const LOG_MAX: f64 = 709.782_712_893_384;

/// Anything that can list its Fourier modes.
pub trait ModeSource {
    fn for_each_mode(&self, f: &mut dyn FnMut(Wavevector, Complex64));
}

impl ModeSource for SpectralField {
    fn for_each_mode(&self, f: &mut dyn FnMut(Wavevector, Complex64)) {
        for (k, c) in self.modes() {
            f(k, c);
        }
    }
}

impl ModeSource for BTreeMap<Wavevector, Complex64> {
    fn for_each_mode(&self, f: &mut dyn FnMut(Wavevector, Complex64)) {
        for (k, c) in self {
            if *c != Complex64::new(0.0, 0.0) {
                f(*k, *c);
            }
        }
    }
}

/// Validated `(a, s, alpha)`: `a > 0`, `s > 2`, `0 < alpha < 1/2`.
///
/// The Gevrey index is `sigma = 1/alpha`, so the exponential weight reads
/// `e^{a|k|^alpha}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GevreyParams {
    a: f64,
    s: f64,
    alpha: f64,
}

impl GevreyParams {
    pub fn new(a: f64, s: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be in (0, 1/2), got {alpha}"
            )));
        }
        if !(s > 2.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!("s must be > 2, got {s}")));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("a must be > 0, got {a}")));
        }
        Ok(GevreyParams { a, s, alpha })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> f64 {
        1.0 / self.alpha
    }

    pub fn weight(&self) -> GevreyWeight {
        GevreyWeight {
            a: self.a,
            s: self.s,
            alpha: self.alpha,
        }
    }

    /// Same radius and order with a shifted Sobolev index.
    pub fn weight_with_s(&self, s: f64) -> GevreyWeight {
        GevreyWeight { s, ..self.weight() }
    }
}

/// Unrestricted weight `(1+|k|²)^{s} e^{2a|k|^alpha}` (squared form).
///
/// Used for derived norms outside the theorem hypotheses (`s - 1`,
/// degenerate `s = 0, a = 0` ledgers).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GevreyWeight {
    pub a: f64,
    pub s: f64,
    pub alpha: f64,
}

impl GevreyWeight {
    pub fn new(a: f64, s: f64, alpha: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite() && s.is_finite() && alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "weight needs a >= 0, finite s, alpha > 0 (got a = {a}, s = {s}, alpha = {alpha})"
            )));
        }
        Ok(GevreyWeight { a, s, alpha })
    }

    /// Log of the squared weight at `k`; `None` when the mode carries zero
    /// weight (the zero mode of a homogeneous norm with `s > 0`).
    pub fn log_weight_sq(&self, k: Wavevector, homogeneous: bool) -> Option<f64> {
        let r2 = k.norm_sq();
        let gevrey = if self.a == 0.0 || r2 == 0.0 {
            0.0
        } else {
            2.0 * self.a * r2.powf(0.5 * self.alpha)
        };
        if homogeneous {
            if r2 == 0.0 {
                return if self.s == 0.0 { Some(0.0) } else { None };
            }
            Some(self.s * r2.ln() + gevrey)
        } else {
            Some(self.s * r2.ln_1p() + gevrey)
        }
    }
}

fn weighted_sq_sum(
    theta: &dyn ModeSource,
    w: &GevreyWeight,
    homogeneous: bool,
    extra_log: &dyn Fn(Wavevector) -> Option<f64>,
) -> Result<f64> {
    let mut terms: Vec<(f64, f64)> = Vec::new();
    let mut overflow = None;
    theta.for_each_mode(&mut |k, c| {
        if overflow.is_some() {
            return;
        }
        let (Some(lw), Some(extra)) = (w.log_weight_sq(k, homogeneous), extra_log(k)) else {
            return;
        };
        let lw = lw + extra;
        if lw > LOG_MAX {
            overflow = Some(Error::WeightOverflow { k, exponent: lw });
            return;
        }
        terms.push((lw, c.norm_sqr()));
    });
    if let Some(e) = overflow {
        return Err(e);
    }
    let Some(max) = terms.iter().map(|t| t.0).reduce(f64::max) else {
        return Ok(0.0);
    };
    let scaled: f64 = terms.iter().map(|(lw, c2)| (lw - max).exp() * c2).sum();
    Ok(scaled * max.exp())
}

/// `‖θ‖_{H^s_{a,1/alpha}}` (or the homogeneous `Ḣ` variant when
/// `homogeneous` is set).
pub fn gevrey_norm(theta: &dyn ModeSource, w: &GevreyWeight, homogeneous: bool) -> Result<f64> {
    Ok(gevrey_norm_sq(theta, w, homogeneous)?.sqrt())
}

pub fn gevrey_norm_sq(theta: &dyn ModeSource, w: &GevreyWeight, homogeneous: bool) -> Result<f64> {
    weighted_sq_sum(theta, w, homogeneous, &|_| Some(0.0))
}

/// `‖|D|^beta θ‖²` in the weighted space, i.e. the extra factor `|k|^{2beta}`.
pub fn fractional_gevrey_norm_sq(
    theta: &dyn ModeSource,
    w: &GevreyWeight,
    beta: f64,
    homogeneous: bool,
) -> Result<f64> {
    weighted_sq_sum(theta, w, homogeneous, &|k| {
        if k.is_zero() {
            None
        } else {
            Some(beta * k.norm_sq().ln())
        }
    })
}

/// `Σ |k|^sigma_x e^{weight_a |k|^weight_alpha} |θ̂(k)|`.
///
/// `weight_a = 0` is the plain `X^sigma` norm. At `k = 0` the factor
/// `|k|^sigma_x` is taken as 1 for `sigma_x = 0` and 0 otherwise.
pub fn xsigma_norm(
    theta: &dyn ModeSource,
    sigma_x: f64,
    weight_a: f64,
    weight_alpha: f64,
) -> Result<f64> {
    let mut terms: Vec<(f64, f64)> = Vec::new();
    let mut overflow = None;
    theta.for_each_mode(&mut |k, c| {
        if overflow.is_some() {
            return;
        }
        let r = k.norm();
        let lw = if r == 0.0 {
            if sigma_x == 0.0 {
                0.0
            } else {
                return;
            }
        } else {
            sigma_x * r.ln() + weight_a * r.powf(weight_alpha)
        };
        if lw > LOG_MAX {
            overflow = Some(Error::WeightOverflow { k, exponent: lw });
            return;
        }
        terms.push((lw, c.norm()));
    });
    if let Some(e) = overflow {
        return Err(e);
    }
    let Some(max) = terms.iter().map(|t| t.0).reduce(f64::max) else {
        return Ok(0.0);
    };
    let scaled: f64 = terms.iter().map(|(lw, c)| (lw - max).exp() * c).sum();
    Ok(scaled * max.exp())
}

/// Per-step diagnostics bundle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    pub hs: f64,
    pub hs_gevrey: f64,
    pub hs_dot_gevrey: f64,
    /// `‖e^{a·alpha|D|^alpha} θ‖_{X¹}`, i.e. `‖F(e^{a·alpha|D|^alpha}∇θ)‖_{L¹}`.
    pub x1_weighted: f64,
}

impl NormReport {
    pub const CSV_COLUMNS: [&'static str; 5] =
        ["l2", "hs", "hs_gevrey", "hs_dot_gevrey", "x1_weighted"];

    pub fn csv_header() -> String {
        Self::CSV_COLUMNS.join(",")
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{:e}",
            self.l2, self.hs, self.hs_gevrey, self.hs_dot_gevrey, self.x1_weighted
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("NormReport is plain data")
    }
}

/// All [`NormReport`] fields from one pass over the spectrum.
pub fn norm_report(theta: &SpectralField, p: &GevreyParams) -> Result<NormReport> {
    let (a, s, alpha) = (p.a(), p.s(), p.alpha());
    let mut acc = [0.0f64; 4];
    let mut x1 = 0.0;
    for (k, c) in theta.modes() {
        let r2 = k.norm_sq();
        let r = r2.sqrt();
        let ra = r.powf(alpha);
        let log_hs = s * r2.ln_1p();
        let log_g = log_hs + 2.0 * a * ra;
        let log_hdot = s * r2.ln() + 2.0 * a * ra;
        let log_x1 = r.ln() + a * alpha * ra;
        for lw in [log_g, log_hdot, log_x1] {
            if lw > LOG_MAX {
                return Err(Error::WeightOverflow { k, exponent: lw });
            }
        }
        let c2 = c.norm_sqr();
        acc[0] += c2;
        acc[1] += log_hs.exp() * c2;
        acc[2] += log_g.exp() * c2;
        acc[3] += log_hdot.exp() * c2;
        x1 += log_x1.exp() * c.norm();
    }
    Ok(NormReport {
        l2: acc[0].sqrt(),
        hs: acc[1].sqrt(),
        hs_gevrey: acc[2].sqrt(),
        hs_dot_gevrey: acc[3].sqrt(),
        x1_weighted: x1,
    })
}

/// Discrete Cauchy–Schwarz constant `C` with
/// `‖e^{a·alpha|D|^alpha}θ‖_{X¹} ≤ C ‖θ‖_{H^s_{a,1/alpha}}`:
/// `C² = Σ_k e^{-2a(1-alpha)|k|^alpha} |k|² (1+|k|²)^{-s}` over the grid.
pub fn x1_bridge_constant(grid: GridSpec, p: &GevreyParams) -> f64 {
    let (a, s, alpha) = (p.a(), p.s(), p.alpha());
    grid.wavevectors()
        .filter(|k| !k.is_zero() && !grid.is_nyquist(*k))
        .map(|k| {
            let r2 = k.norm_sq();
            (-2.0 * a * (1.0 - alpha) * r2.powf(0.5 * alpha)).exp() * r2 * (1.0 + r2).powf(-s)
        })
        .sum::<f64>()
        .sqrt()
}

/// Precomputed per-mode weights for repeated evaluation on one grid.
#[derive(Clone, Debug)]
pub struct NormTables {
    grid: GridSpec,
    weight: GevreyWeight,
    hs: Vec<f64>,
    gevrey: Vec<f64>,
    hdot_gevrey: Vec<f64>,
    x1: Vec<f64>,
    frac: Vec<f64>,
}

impl NormTables {
    /// Tables for `weight`; the `|D|^alpha` dissipation factor uses `weight.alpha`.
    pub fn new(grid: GridSpec, weight: GevreyWeight) -> Self {
        let len = grid.len();
        let mut t = NormTables {
            grid,
            weight,
            hs: vec![0.0; len],
            gevrey: vec![0.0; len],
            hdot_gevrey: vec![0.0; len],
            x1: vec![0.0; len],
            frac: vec![0.0; len],
        };
        let (a, s, alpha) = (weight.a, weight.s, weight.alpha);
        for idx in 0..len {
            let k = grid.wavevector(idx);
            if k.is_zero() || grid.is_nyquist(k) {
                continue;
            }
            let r2 = k.norm_sq();
            let ra = r2.powf(0.5 * alpha);
            t.hs[idx] = (s * r2.ln_1p()).exp();
            t.gevrey[idx] = (s * r2.ln_1p() + 2.0 * a * ra).exp();
            t.hdot_gevrey[idx] = (s * r2.ln() + 2.0 * a * ra).exp();
            t.x1[idx] = (0.5 * r2.ln() + a * alpha * ra).exp();
            t.frac[idx] = ra * ra;
        }
        t
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn weight(&self) -> GevreyWeight {
        self.weight
    }

    fn check_finite(&self, theta: &SpectralField, table: &[f64]) -> Result<()> {
        for (idx, (c, w)) in theta.coeffs().iter().zip(table).enumerate() {
            if !w.is_finite() && c.norm_sqr() > 0.0 {
                return Err(Error::WeightOverflow {
                    k: self.grid.wavevector(idx),
                    exponent: f64::INFINITY,
                });
            }
        }
        Ok(())
    }

    fn weighted(table: &[f64], theta: &SpectralField) -> f64 {
        theta
            .coeffs()
            .iter()
            .zip(table)
            .map(|(c, w)| w * c.norm_sqr())
            .sum()
    }

    pub fn report(&self, theta: &SpectralField) -> Result<NormReport> {
        self.check_finite(theta, &self.gevrey)?;
        self.check_finite(theta, &self.hdot_gevrey)?;
        let x1 = theta
            .coeffs()
            .iter()
            .zip(&self.x1)
            .map(|(c, w)| w * c.norm())
            .sum();
        Ok(NormReport {
            l2: theta.l2_norm(),
            hs: Self::weighted(&self.hs, theta).sqrt(),
            hs_gevrey: Self::weighted(&self.gevrey, theta).sqrt(),
            hs_dot_gevrey: Self::weighted(&self.hdot_gevrey, theta).sqrt(),
            x1_weighted: x1,
        })
    }

    /// `‖θ‖²` in the inhomogeneous weighted space.
    pub fn gevrey_sq(&self, theta: &SpectralField) -> f64 {
        Self::weighted(&self.gevrey, theta)
    }

    /// `‖|D|^alpha θ‖²` in the inhomogeneous weighted space.
    pub fn dissipation_sq(&self, theta: &SpectralField) -> f64 {
        theta
            .coeffs()
            .iter()
            .zip(&self.gevrey)
            .zip(&self.frac)
            .map(|((c, w), f)| w * f * c.norm_sqr())
            .sum()
    }

    /// `‖e^{a·alpha|D|^alpha}θ‖_{X¹}`.
    pub fn x1_weighted(&self, theta: &SpectralField) -> f64 {
        theta
            .coeffs()
            .iter()
            .zip(&self.x1)
            .map(|(c, w)| w * c.norm())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_cos_x1(n: usize) -> SpectralField {
        let g = GridSpec::new(n).unwrap();
        SpectralField::from_modes(g, [(Wavevector::new(1, 0), Complex64::new(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(GevreyParams::new(0.1, 2.5, 0.25).is_ok());
        let e = GevreyParams::new(0.1, 2.5, 0.7).unwrap_err();
        assert!(e.to_string().contains("(0, 1/2)"));
        assert!(GevreyParams::new(0.1, 2.0, 0.25).is_err());
        assert!(GevreyParams::new(0.0, 2.5, 0.25).is_err());
        assert_eq!(GevreyParams::new(0.1, 2.5, 0.25).unwrap().sigma(), 4.0);
    }

    #[test]
    fn gevrey_norm_of_two_cos_x1() {
        let theta = two_cos_x1(16);
        let w = GevreyWeight::new(0.5, 2.0, 0.5).unwrap();
        let n2 = gevrey_norm_sq(&theta, &w, false).unwrap();
        assert_relative_eq!(n2, 8.0 * std::f64::consts::E, max_relative = 1e-15);
    }

    #[test]
    fn gevrey_norm_tends_to_sobolev_as_radius_vanishes() {
        let g = GridSpec::new(16).unwrap();
        let theta = SpectralField::from_modes(
            g,
            [
                (Wavevector::new(3, 1), Complex64::new(0.2, 0.1)),
                (Wavevector::new(-1, 5), Complex64::new(-0.4, 0.3)),
            ],
        )
        .unwrap();
        let plain =
            gevrey_norm(&theta, &GevreyWeight::new(0.0, 2.5, 0.25).unwrap(), false).unwrap();
        let mut prev = f64::INFINITY;
        for a in [1e-1, 1e-3, 1e-6, 1e-9] {
            let v = gevrey_norm(&theta, &GevreyWeight::new(a, 2.5, 0.25).unwrap(), false).unwrap();
            let gap = (v - plain) / plain;
            assert!(gap >= 0.0 && gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-8);
    }

    #[test]
    fn xsigma_examples() {
        let theta = two_cos_x1(16);
        assert_relative_eq!(xsigma_norm(&theta, 1.0, 0.0, 0.5).unwrap(), 2.0);
        assert_relative_eq!(
            xsigma_norm(&theta, 1.0, 1.0 * 0.5, 0.5).unwrap(),
            2.0 * 0.5f64.exp(),
            max_relative = 1e-15
        );
        let zero = SpectralField::zeros(GridSpec::new(16).unwrap());
        assert_eq!(xsigma_norm(&zero, 1.0, 0.3, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn overflow_is_an_error() {
        let theta = two_cos_x1(16);
        let huge = GevreyWeight::new(400.0, 2.5, 0.25).unwrap();
        assert!(matches!(
            gevrey_norm(&theta, &huge, false),
            Err(Error::WeightOverflow { .. })
        ));
        assert!(matches!(
            xsigma_norm(&theta, 1.0, 800.0, 0.25),
            Err(Error::WeightOverflow { .. })
        ));
    }

    #[test]
    fn no_overflow_at_documented_extremes() {
        // a <= 5 and n <= 1024 must stay representable
        let g = GridSpec::new(1024).unwrap();
        let k = Wavevector::new(511, 511);
        let theta = SpectralField::from_modes(g, [(k, Complex64::new(1.0, 0.0))]).unwrap();
        let p = GevreyParams::new(5.0, 2.5, 0.49).unwrap();
        let r = norm_report(&theta, &p).unwrap();
        assert!(r.hs_gevrey.is_finite());
    }

    #[test]
    fn report_of_zero_field() {
        let zero = SpectralField::zeros(GridSpec::new(16).unwrap());
        let p = GevreyParams::new(0.1, 2.5, 0.25).unwrap();
        assert_eq!(norm_report(&zero, &p).unwrap(), NormReport::default());
    }

    #[test]
    fn tables_agree_with_log_space_norms() {
        let g = GridSpec::new(32).unwrap();
        let theta = SpectralField::from_modes(
            g,
            [
                (Wavevector::new(7, -2), Complex64::new(0.2, 0.1)),
                (Wavevector::new(1, 9), Complex64::new(-0.4, 0.3)),
                (Wavevector::new(0, 1), Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        let p = GevreyParams::new(0.3, 2.5, 0.25).unwrap();
        let tables = NormTables::new(g, p.weight());
        let fast = tables.report(&theta).unwrap();
        let direct = norm_report(&theta, &p).unwrap();
        assert_relative_eq!(fast.hs_gevrey, direct.hs_gevrey, max_relative = 1e-13);
        assert_relative_eq!(
            fast.hs_dot_gevrey,
            direct.hs_dot_gevrey,
            max_relative = 1e-13
        );
        assert_relative_eq!(fast.x1_weighted, direct.x1_weighted, max_relative = 1e-13);
        let diss = fractional_gevrey_norm_sq(&theta, &p.weight(), p.alpha(), false).unwrap();
        assert_relative_eq!(tables.dissipation_sq(&theta), diss, max_relative = 1e-13);
    }
}
