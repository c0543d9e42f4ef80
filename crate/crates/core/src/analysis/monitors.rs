use serde::{Deserialize, Serialize};

use super::ledger::EnergyLedger;
use crate::norms::{gevrey_norm, GevreyParams};
use crate::spectral::SpectralField;

/// Relative slack allowed when judging a series non-increasing.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallDataCheck {
    pub passes: bool,
    /// `‖θ⁰‖ / threshold`.
    pub margin: f64,
    pub norm: f64,
    pub threshold: f64,
}

/// Compares `‖θ⁰‖_{H^s_{a,1/alpha}}` with `1/(2√c_cal)`.
pub fn small_data_check(theta0: &SpectralField, p: &GevreyParams, c_cal: f64) -> SmallDataCheck {
    let threshold = 1.0 / (2.0 * c_cal.sqrt());
    let norm = gevrey_norm(theta0, &p.weight(), false).unwrap_or(f64::INFINITY);
    SmallDataCheck {
        passes: norm < threshold,
        margin: norm / threshold,
        norm,
        threshold,
    }
}

/// `c_cal` whose small-data threshold equals `boundary_norm`.
pub fn small_data_constant(boundary_norm: f64) -> f64 {
    1.0 / (4.0 * boundary_norm * boundary_norm)
}

/// `max_t (‖θ(t)‖² + ∫₀ᵗ‖|D|^alpha θ‖² − ‖θ⁰‖²) / ‖θ⁰‖²` in the ledger's
/// weighted norm. Positive values are violations.
pub fn energy_inequality_audit(ledger: &EnergyLedger) -> f64 {
    audit_with_coefficient(ledger, 1.0)
}

/// As [`energy_inequality_audit`] with the dissipation integral scaled by
/// `coefficient`. With coefficient `2κ` and the degenerate weight
/// `s = 0, a = 0` this is the signed L² budget residual.
pub fn audit_with_coefficient(ledger: &EnergyLedger, coefficient: f64) -> f64 {
    let Some(&e0) = ledger.hs_gevrey_sq.first() else {
        return 0.0;
    };
    if e0 == 0.0 {
        return 0.0;
    }
    ledger
        .hs_gevrey_sq
        .iter()
        .zip(&ledger.diss_accum)
        .map(|(e, d)| (e + coefficient * d - e0) / e0)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// First ledger time with `‖θ(t)‖_{H^s_{a,1/alpha}} < eps`.
    pub first_below: Option<f64>,
    /// Whether the norm never increases after its global maximum.
    pub monotone_tail: bool,
}

pub fn decay_report(ledger: &EnergyLedger, eps: f64) -> DecayReport {
    let norms: Vec<f64> = ledger.hs_gevrey_sq.iter().map(|e| e.sqrt()).collect();
    let first_below = norms.iter().position(|&v| v < eps).map(|i| ledger.times[i]);
    let peak = norms
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        )
        .0;
    let monotone_tail = norms[peak.min(norms.len().saturating_sub(1))..]
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + MONOTONE_TOL));
    DecayReport {
        first_below,
        monotone_tail,
    }
}

/// Final value of `∫₀ᵗ ‖e^{a·alpha|D|^alpha}θ‖²_{X¹} dτ`.
pub fn bkm_integral(ledger: &EnergyLedger) -> f64 {
    ledger.x1w_sq_accum.last().copied().unwrap_or(0.0)
}
