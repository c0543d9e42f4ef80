use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use crate::error::{Error, Result};
use crate::norms::{GevreyParams, NormTables};
use crate::spectral::{nonlinear_term, SpectralField};

/// Distances below this fraction of the data norm are treated as converged.
pub const PICARD_FLOOR: f64 = 1e-13;

/// Number of consecutive growths of `d_m` that signal divergence.
const DIVERGENCE_RUN: usize = 3;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PicardReport {
    pub horizon: f64,
    pub steps: usize,
    /// `d_m = max_j ‖F^{m+1} − F^m‖` at the step times, `m = 0, 1, ...`.
    pub distances: Vec<f64>,
    /// Norm of the data, used to scale the convergence floor.
    pub scale: f64,
    #[serde(skip)]
    pub final_iterate: Option<SpectralField>,
}

impl PicardReport {
    /// `d_{m+1}/d_m`; pairs whose numerator is already below the floor
    /// count as 0.
    pub fn ratios(&self) -> Vec<f64> {
        let floor = PICARD_FLOOR * self.scale;
        self.distances
            .windows(2)
            .map(|w| {
                if w[1] <= floor || w[0] == 0.0 {
                    0.0
                } else {
                    w[1] / w[0]
                }
            })
            .collect()
    }

    /// Largest ratio over `d_{m+1}/d_m` for `m` in `range`.
    pub fn max_ratio(&self, range: std::ops::RangeInclusive<usize>) -> f64 {
        let r = self.ratios();
        range.filter_map(|m| r.get(m).copied()).fold(0.0, f64::max)
    }
}

struct Mild {
    tables: NormTables,
    e_step: Vec<f64>,
    linear: Vec<f64>,
    h: f64,
    steps: usize,
}

impl Mild {
    fn new(cfg: &SolverConfig, horizon: f64) -> Result<Self> {
        cfg.validate()?;
        if !(horizon > 0.0) || horizon > cfg.t_end {
            return Err(Error::InvalidParameter(format!(
                "horizon must be in (0, t_end = {}], got {horizon}",
                cfg.t_end
            )));
        }
        let steps = (horizon / cfg.dt).round().max(1.0) as usize;
        let h = horizon / steps as f64;
        let linear = cfg.linear_table()?.values().to_vec();
        let e_step = linear.iter().map(|l| (-h * l).exp()).collect();
        Ok(Mild {
            tables: NormTables::new(cfg.grid, cfg.params.weight()),
            e_step,
            linear,
            h,
            steps,
        })
    }

    fn linear_solution(&self, theta0: &SpectralField) -> Vec<SpectralField> {
        let grid = theta0.grid();
        (0..=self.steps)
            .map(|j| {
                let t = j as f64 * self.h;
                let c = theta0
                    .coeffs()
                    .iter()
                    .zip(&self.linear)
                    .map(|(c, l)| c * (-t * l).exp())
                    .collect();
                SpectralField::from_raw_unchecked(grid, c)
            })
            .collect()
    }

    /// `F(θ)(t_j) = e^{-t_j L}θ⁰ − ∫₀^{t_j} e^{-(t_j−τ)L} u·∇θ dτ`, with the
    /// integral by composite trapezoid on the step grid.
    fn map(&self, lin: &[SpectralField], theta: &[SpectralField]) -> Vec<SpectralField> {
        let grid = lin[0].grid();
        let len = grid.len();
        let mut out = Vec::with_capacity(lin.len());
        out.push(lin[0].clone());
        let mut integral = vec![Complex64::new(0.0, 0.0); len];
        let mut n_prev = nonlinear_term(&theta[0]);
        for j in 1..lin.len() {
            let n_next = nonlinear_term(&theta[j]);
            let (np, nn) = (n_prev.coeffs(), n_next.coeffs());
            for i in 0..len {
                let e = self.e_step[i];
                integral[i] = integral[i] * e + (np[i] * e + nn[i]) * (0.5 * self.h);
            }
            let c = lin[j]
                .coeffs()
                .iter()
                .zip(&integral)
                .map(|(l, d)| l - d)
                .collect();
            out.push(SpectralField::from_raw_unchecked(grid, c));
            n_prev = n_next;
        }
        out
    }

    fn distance(&self, a: &[SpectralField], b: &[SpectralField]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| self.tables.gevrey_sq(&(x - y)).sqrt())
            .fold(0.0, f64::max)
    }
}

/// Picard iteration of the mild formulation on `[0, horizon]`, starting from
/// the linear solution. The step is `dt` adjusted to divide `horizon`.
pub fn picard_iterate(
    theta0: &SpectralField,
    cfg: &SolverConfig,
    horizon: f64,
    n_iter: usize,
) -> Result<PicardReport> {
    let mild = Mild::new(cfg, horizon)?;
    let scale = mild.tables.gevrey_sq(theta0).sqrt();
    let mut current = mild.linear_solution(theta0);
    let lin = current.clone();
    let mut distances = Vec::with_capacity(n_iter);
    let mut growths = Vec::new();
    let mut run = 0;
    for m in 0..n_iter {
        let next = mild.map(&lin, &current);
        let d = mild.distance(&next, &current);
        if !d.is_finite() {
            return Err(Error::Divergence(vec![m]));
        }
        if let Some(&prev) = distances.last() {
            if d > prev && d > PICARD_FLOOR * scale {
                run += 1;
                growths.push(m);
                if run >= DIVERGENCE_RUN {
                    return Err(Error::Divergence(growths));
                }
            } else {
                run = 0;
                growths.clear();
            }
        }
        distances.push(d);
        current = next;
    }
    Ok(PicardReport {
        horizon,
        steps: mild.steps,
        distances,
        scale,
        final_iterate: current.pop(),
    })
}

/// Horizon at which the largest ratio `d_{m+1}/d_m`, `m = 1..=5`, crosses 1,
/// located by bisection on `[0, max_horizon]`. Returns `max_horizon` when
/// the iteration still contracts there.
pub fn contraction_boundary(
    theta0: &SpectralField,
    cfg: &SolverConfig,
    max_horizon: f64,
    bisections: usize,
) -> Result<f64> {
    let contracts = |h: f64| -> Result<bool> {
        match picard_iterate(theta0, cfg, h, 7) {
            Ok(r) => Ok(r.max_ratio(1..=5) < 1.0),
            Err(Error::Divergence(_)) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if contracts(max_horizon)? {
        return Ok(max_horizon);
    }
    let (mut lo, mut hi) = (0.0, max_horizon);
    for _ in 0..bisections {
        let mid = 0.5 * (lo + hi);
        if mid < cfg.dt {
            break;
        }
        if contracts(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo.max(cfg.dt))
}

/// `T = 1/(c_cal·‖θ⁰‖²_{H^s_{a,1/alpha}})`.
pub fn existence_time_estimate(
    theta0: &SpectralField,
    p: &GevreyParams,
    c_cal: f64,
) -> Result<f64> {
    if !(c_cal > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "calibration constant must be > 0, got {c_cal}"
        )));
    }
    let norm_sq = crate::norms::gevrey_norm_sq(theta0, &p.weight(), false)?;
    if norm_sq == 0.0 {
        return Err(Error::ZeroInitialData);
    }
    Ok(1.0 / (c_cal * norm_sq))
}

/// Calibrated constant `C` such that `existence_time_estimate` returns
/// `horizon` for `theta0`.
pub fn calibrate_existence_constant(
    theta0: &SpectralField,
    p: &GevreyParams,
    horizon: f64,
) -> Result<f64> {
    let norm_sq = crate::norms::gevrey_norm_sq(theta0, &p.weight(), false)?;
    if norm_sq == 0.0 {
        return Err(Error::ZeroInitialData);
    }
    Ok(1.0 / (horizon * norm_sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{GridSpec, Wavevector};

    fn setup(amp: f64) -> (SpectralField, SolverConfig) {
        let g = GridSpec::new(16).unwrap();
        let p = GevreyParams::new(0.1, 2.5, 0.25).unwrap();
        let theta = SpectralField::from_modes(
            g,
            [
                (Wavevector::new(1, 0), Complex64::new(amp, 0.0)),
                (Wavevector::new(0, 2), Complex64::new(0.0, amp)),
            ],
        )
        .unwrap();
        (theta, SolverConfig::new(g, p, 1e-2, 1.0))
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let (theta, cfg) = setup(0.0);
        let r = picard_iterate(&theta, &cfg, 0.5, 4).unwrap();
        assert!(r.distances.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn small_data_contracts() {
        let (theta, cfg) = setup(0.1);
        let r = picard_iterate(&theta, &cfg, 0.2, 6).unwrap();
        assert!(r.max_ratio(0..=4) < 0.5, "{:?}", r.ratios());
        assert_eq!(r.steps, 20);
    }

    #[test]
    fn horizon_must_fit() {
        let (theta, cfg) = setup(0.1);
        assert!(picard_iterate(&theta, &cfg, 2.0, 3).is_err());
        assert!(picard_iterate(&theta, &cfg, 0.0, 3).is_err());
    }

    #[test]
    fn existence_time_arithmetic() {
        let (theta, cfg) = setup(0.5);
        let p = cfg.params;
        let t = existence_time_estimate(&theta, &p, 1.0).unwrap();
        let t2 = existence_time_estimate(&theta.scaled(2.0), &p, 1.0).unwrap();
        assert!((t / t2 - 4.0).abs() < 1e-12);
        let c = calibrate_existence_constant(&theta, &p, 0.3).unwrap();
        assert!((existence_time_estimate(&theta, &p, c).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(
            existence_time_estimate(&setup(0.0).0, &p, 1.0),
            Err(Error::ZeroInitialData)
        );
    }
}
