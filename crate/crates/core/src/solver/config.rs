use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::GevreyParams;
use crate::spectral::{fractional_symbol, GridSpec, SymbolTable, Wavevector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: GridSpec,
    pub params: GevreyParams,
    pub kappa: f64,
    /// Order of the dissipation `κ|D|^{2·alpha_diss}`; defaults to
    /// `params.alpha()` but may reach the critical value 1/2.
    pub alpha_diss: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Enables the regularizing `(1/k)Δ` term when set.
    pub kato_k: Option<u64>,
    pub output_stride: usize,
}

impl SolverConfig {
    pub fn new(grid: GridSpec, params: GevreyParams, dt: f64, t_end: f64) -> Self {
        SolverConfig {
            grid,
            params,
            kappa: 1.0,
            alpha_diss: params.alpha(),
            dt,
            t_end,
            kato_k: None,
            output_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be > 0, got {}",
                self.kappa
            )));
        }
        if !(self.alpha_diss > 0.0 && self.alpha_diss <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "dissipation order must be in (0, 1], got {}",
                self.alpha_diss
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        if self.kato_k == Some(0) {
            return Err(Error::InvalidParameter("kato_k must be >= 1".into()));
        }
        if self.output_stride == 0 {
            return Err(Error::InvalidParameter("output_stride must be >= 1".into()));
        }
        Ok(())
    }

    pub fn with_kato(mut self, k: Option<u64>) -> Self {
        self.kato_k = k;
        self
    }

    pub fn with_dissipation_order(mut self, alpha: f64) -> Self {
        self.alpha_diss = alpha;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.output_stride = stride;
        self
    }

    /// `L(k) = κ|k|^{2·alpha_diss} + |k|²/k_kato`.
    pub fn linear_symbol(&self, k: Wavevector) -> f64 {
        let diss = self.kappa * fractional_symbol(k, 2.0 * self.alpha_diss);
        match self.kato_k {
            Some(kk) => diss + k.norm_sq() / kk as f64,
            None => diss,
        }
    }

    pub fn linear_table(&self) -> Result<SymbolTable> {
        SymbolTable::new(self.grid, |k| self.linear_symbol(k))
    }

    /// Step sizes covering `[0, t_end]`: full steps of `dt` plus one shorter
    /// closing step when `t_end` is not a multiple of `dt`.
    pub fn step_plan(&self) -> (usize, Option<f64>) {
        let ratio = self.t_end / self.dt;
        let full = (ratio + 1e-9).floor() as usize;
        let rest = self.t_end - full as f64 * self.dt;
        if rest > 1e-9 * self.dt {
            (full, Some(rest))
        } else {
            (full, None)
        }
    }
}

/// Transport-limited step `cfl · 0.5 / max|k|^{max(1, 2α)}` over the
/// dealiased band.
pub fn default_dt(grid: GridSpec, alpha: f64, cfl: f64) -> f64 {
    let kmax = grid.dealias_cutoff() as f64 * std::f64::consts::SQRT_2;
    cfl * 0.5 / kmax.powf(1f64.max(2.0 * alpha))
}
