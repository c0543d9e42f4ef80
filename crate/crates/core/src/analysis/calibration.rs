//! Empirical constants for the monitors.
//!
//! Two separate constants are fitted:
//! * `c_small`, from the largest amplitude whose weighted norm is
//!   non-increasing over a run: the small-data threshold `1/(2√c_small)`
//!   is set to that boundary norm;
//! * `c_exist`, from the Picard contraction boundary `h*`: the working
//!   horizon is `h*/2` and `c_exist = 1/(horizon·‖θ⁰‖²)`.

use serde::{Deserialize, Serialize};

use super::monitors::{small_data_constant, MONOTONE_TOL};
use crate::error::Result;
use crate::norms::gevrey_norm;
use crate::solver::{calibrate_existence_constant, contraction_boundary, Integrator, SolverConfig};
use crate::spectral::SpectralField;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallDataCalibration {
    /// Largest non-increasing amplitude found (scale applied to the profile).
    pub boundary_amplitude: f64,
    /// `‖θ⁰‖_{H^s_{a,1/alpha}}` at the boundary amplitude.
    pub boundary_norm: f64,
    pub c_small: f64,
}

/// True when `‖θ(t)‖_{H^s_{a,1/alpha}}` never increases from one step to
/// the next; unstable runs count as increasing.
pub fn norm_non_increasing(theta0: &SpectralField, cfg: &SolverConfig) -> Result<bool> {
    let integrator = Integrator::new(cfg)?;
    let mut state = integrator.initial_state(theta0)?;
    let (full, rest) = cfg.step_plan();
    let total = full + rest.is_some() as usize;
    for i in 0..total {
        let h = if i < full { None } else { rest };
        let before = *state
            .ledger
            .hs_gevrey_sq
            .last()
            .expect("ledger starts nonempty");
        if integrator.advance_by(&mut state, h).is_err() {
            return Ok(false);
        }
        let after = *state.ledger.hs_gevrey_sq.last().expect("just pushed");
        if after > before * (1.0 + MONOTONE_TOL) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bisects the amplitude `A` of `A·profile` on `[lo, hi]` for the
/// monotonicity boundary. `lo` must be monotone and `hi` must not.
pub fn calibrate_small_data(
    profile: &SpectralField,
    cfg: &SolverConfig,
    lo: f64,
    hi: f64,
    bisections: usize,
) -> Result<SmallDataCalibration> {
    let (mut lo, mut hi) = (lo, hi);
    if !norm_non_increasing(&profile.scaled(lo), cfg)? {
        return Err(crate::Error::InvalidParameter(format!(
            "lower amplitude {lo} is already outside the monotone regime"
        )));
    }
    if norm_non_increasing(&profile.scaled(hi), cfg)? {
        return Err(crate::Error::InvalidParameter(format!(
            "upper amplitude {hi} is still inside the monotone regime"
        )));
    }
    for _ in 0..bisections {
        let mid = 0.5 * (lo + hi);
        if norm_non_increasing(&profile.scaled(mid), cfg)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let boundary_norm = gevrey_norm(&profile.scaled(lo), &cfg.params.weight(), false)?;
    Ok(SmallDataCalibration {
        boundary_amplitude: lo,
        boundary_norm,
        c_small: small_data_constant(boundary_norm),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExistenceCalibration {
    /// Horizon where the Picard ratio crosses 1.
    pub boundary_horizon: f64,
    /// Working horizon `boundary_horizon / 2`.
    pub horizon: f64,
    pub c_exist: f64,
}

pub fn calibrate_existence(
    theta0: &SpectralField,
    cfg: &SolverConfig,
    max_horizon: f64,
    bisections: usize,
) -> Result<ExistenceCalibration> {
    let boundary = contraction_boundary(theta0, cfg, max_horizon, bisections)?;
    let horizon = 0.5 * boundary;
    Ok(ExistenceCalibration {
        boundary_horizon: boundary,
        horizon,
        c_exist: calibrate_existence_constant(theta0, &cfg.params, horizon)?,
    })
}
