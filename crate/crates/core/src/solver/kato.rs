use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::integrator::Integrator;
use crate::error::{Error, Result};
use crate::norms::NormTables;
use crate::spectral::SpectralField;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KatoRow {
    pub k: u64,
    /// `sup_t ‖θ_k(t) − θ_∞(t)‖_{H^{s-1}_{a,1/alpha}}` over output times.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KatoReport {
    pub rows: Vec<KatoRow>,
}

impl KatoReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].deviation < w[0].deviation)
    }

    /// `p` in `deviation ≈ C·k^{-p}`, by least squares on the log-log data.
    pub fn exponent(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.deviation > 0.0)
            .map(|r| ((r.k as f64).ln(), r.deviation.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(-sxy / sxx)
    }
}

fn trajectory(theta0: &SpectralField, cfg: &SolverConfig) -> Result<Vec<SpectralField>> {
    let mut out = Vec::new();
    Integrator::new(cfg)?.run_observed(theta0, |_, theta| {
        out.push(theta.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Runs the regularized problem for each `k` in `ks` (concurrently) and
/// measures its distance from the unregularized baseline with the same `dt`
/// and output stride.
pub fn kato_compare(theta0: &SpectralField, cfg: &SolverConfig, ks: &[u64]) -> Result<KatoReport> {
    if ks.contains(&0) {
        return Err(Error::InvalidParameter("kato_k must be >= 1".into()));
    }
    let base_cfg = cfg.with_kato(None);
    let baseline = trajectory(theta0, &base_cfg)?;
    let weight = cfg.params.weight_with_s(cfg.params.s() - 1.0);
    let tables = NormTables::new(cfg.grid, weight);
    let results: Vec<Result<f64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ks
            .iter()
            .map(|&k| {
                let baseline = &baseline;
                let tables = &tables;
                scope.spawn(move || -> Result<f64> {
                    let traj = trajectory(theta0, &base_cfg.with_kato(Some(k)))?;
                    Ok(traj
                        .iter()
                        .zip(baseline)
                        .map(|(a, b)| tables.gevrey_sq(&(a - b)).sqrt())
                        .fold(0.0, f64::max))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("kato worker panicked"))
            .collect()
    });
    let mut rows = Vec::with_capacity(ks.len());
    for (&k, r) in ks.iter().zip(results) {
        rows.push(KatoRow { k, deviation: r? });
    }
    Ok(KatoReport { rows })
}
