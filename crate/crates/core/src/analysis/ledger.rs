use serde::{Deserialize, Serialize};

use crate::norms::GevreyWeight;

/// Running record of norms and accumulated dissipation along a trajectory.
///
/// One entry per solver step. Time integrals are accrued with the same
/// stage quadrature the integrator uses, so budgets close to the
/// integrator's own order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    /// Weight of the Gevrey columns (`hs_gevrey_sq`, `diss_accum`).
    pub weight: Option<GevreyWeight>,
    pub times: Vec<f64>,
    /// `‖θ(t)‖²_{L²}`
    pub l2_sq: Vec<f64>,
    /// `2∫₀ᵗ Σ L(k)|θ̂|² dτ` with the full linear symbol (dissipation plus
    /// any regularizing Laplacian): the L² energy drained so far.
    pub l2_drain: Vec<f64>,
    /// `‖θ(t)‖²_{H^s_{a,1/alpha}}`
    pub hs_gevrey_sq: Vec<f64>,
    /// `∫₀ᵗ ‖|D|^alpha θ‖²_{H^s_{a,1/alpha}} dτ`
    pub diss_accum: Vec<f64>,
    /// `∫₀ᵗ ‖e^{a·alpha|D|^alpha}θ‖²_{X¹} dτ`
    pub x1w_sq_accum: Vec<f64>,
}

/// Values recorded at one time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub t: f64,
    pub l2_sq: f64,
    pub l2_drain: f64,
    pub hs_gevrey_sq: f64,
    pub diss_accum: f64,
    pub x1w_sq_accum: f64,
}

impl EnergyLedger {
    pub fn new(weight: GevreyWeight) -> Self {
        EnergyLedger {
            weight: Some(weight),
            ..Default::default()
        }
    }

    pub fn push(&mut self, e: LedgerEntry) {
        self.times.push(e.t);
        self.l2_sq.push(e.l2_sq);
        self.l2_drain.push(e.l2_drain);
        self.hs_gevrey_sq.push(e.hs_gevrey_sq);
        self.diss_accum.push(e.diss_accum);
        self.x1w_sq_accum.push(e.x1w_sq_accum);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn entry(&self, i: usize) -> LedgerEntry {
        LedgerEntry {
            t: self.times[i],
            l2_sq: self.l2_sq[i],
            l2_drain: self.l2_drain[i],
            hs_gevrey_sq: self.hs_gevrey_sq[i],
            diss_accum: self.diss_accum[i],
            x1w_sq_accum: self.x1w_sq_accum[i],
        }
    }

    pub fn last(&self) -> Option<LedgerEntry> {
        (!self.is_empty()).then(|| self.entry(self.len() - 1))
    }

    /// `(‖θ(t)‖² + drain(t) − ‖θ⁰‖²) / ‖θ⁰‖²` in L²; 0 for zero data.
    pub fn budget_residual(&self, i: usize) -> f64 {
        let e0 = self.l2_sq[0];
        if e0 == 0.0 {
            return 0.0;
        }
        (self.l2_sq[i] + self.l2_drain[i] - e0) / e0
    }

    pub fn max_budget_residual(&self) -> f64 {
        (0..self.len())
            .map(|i| self.budget_residual(i).abs())
            .fold(0.0, f64::max)
    }

    /// Drops every entry with index ≥ `len`.
    pub fn truncate(&mut self, len: usize) {
        self.times.truncate(len);
        self.l2_sq.truncate(len);
        self.l2_drain.truncate(len);
        self.hs_gevrey_sq.truncate(len);
        self.diss_accum.truncate(len);
        self.x1w_sq_accum.truncate(len);
    }
}
