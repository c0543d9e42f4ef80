use num_complex::Complex64;

use super::config::SolverConfig;
use crate::analysis::{EnergyLedger, LedgerEntry};
use crate::error::{Error, Result};
use crate::norms::{GevreyWeight, NormReport, NormTables};
use crate::spectral::{nonlinear_term, SpectralField};

/// Abort threshold for the L² norm growth over one step.
pub const MAX_STEP_GROWTH: f64 = 10.0;

#[derive(Clone, Debug)]
pub struct RunState {
    pub t: f64,
    pub theta: SpectralField,
    pub ledger: EnergyLedger,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub reports: Vec<(f64, NormReport)>,
    pub state: RunState,
}

/// Integrating-factor RK4 stepper.
///
/// The linear symbol `L(k)` is integrated exactly through `e^{-hL}`; the
/// transport term is advanced by the classical four-stage scheme in the
/// variable `e^{tL}θ̂`. Ledger integrals are accrued with the same stage
/// weights, which makes them fourth order along with the trajectory.
pub struct Integrator {
    cfg: SolverConfig,
    linear: Vec<f64>,
    half: Vec<f64>,
    full: Vec<f64>,
    tables: NormTables,
}

#[derive(Clone, Copy, Default)]
struct Rates {
    l2_drain: f64,
    diss: f64,
    x1w_sq: f64,
}

impl Rates {
    fn combine(r: [Rates; 4], h: f64) -> Rates {
        let q = |f: fn(&Rates) -> f64| {
            h / 6.0 * (f(&r[0]) + 2.0 * f(&r[1]) + 2.0 * f(&r[2]) + f(&r[3]))
        };
        Rates {
            l2_drain: q(|r| r.l2_drain),
            diss: q(|r| r.diss),
            x1w_sq: q(|r| r.x1w_sq),
        }
    }
}

impl Integrator {
    pub fn new(cfg: &SolverConfig) -> Result<Self> {
        Self::with_ledger_weight(cfg, cfg.params.weight())
    }

    /// Like [`Integrator::new`] but with the Gevrey ledger columns measured
    /// in `weight` instead of the configured parameters.
    pub fn with_ledger_weight(cfg: &SolverConfig, weight: GevreyWeight) -> Result<Self> {
        cfg.validate()?;
        let linear = cfg.linear_table()?.values().to_vec();
        let half = linear.iter().map(|l| (-0.5 * cfg.dt * l).exp()).collect();
        let full = linear.iter().map(|l| (-cfg.dt * l).exp()).collect();
        Ok(Integrator {
            cfg: *cfg,
            linear,
            half,
            full,
            tables: NormTables::new(cfg.grid, weight),
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn tables(&self) -> &NormTables {
        &self.tables
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    fn rates(&self, theta: &SpectralField) -> Rates {
        let drain: f64 = theta
            .coeffs()
            .iter()
            .zip(&self.linear)
            .map(|(c, l)| l * c.norm_sqr())
            .sum();
        let x1 = self.tables.x1_weighted(theta);
        Rates {
            l2_drain: 2.0 * drain,
            diss: self.tables.dissipation_sq(theta),
            x1w_sq: x1 * x1,
        }
    }

    pub fn initial_state(&self, theta0: &SpectralField) -> Result<RunState> {
        if theta0.grid() != self.cfg.grid {
            return Err(Error::GridMismatch {
                expected: self.cfg.grid.n(),
                found: theta0.grid().n(),
            });
        }
        theta0.check_invariants()?;
        self.tables.report(theta0)?;
        let mut ledger = EnergyLedger::new(self.tables.weight());
        ledger.push(LedgerEntry {
            t: 0.0,
            l2_sq: theta0.l2_norm_sq(),
            l2_drain: 0.0,
            hs_gevrey_sq: self.tables.gevrey_sq(theta0),
            diss_accum: 0.0,
            x1w_sq_accum: 0.0,
        });
        Ok(RunState {
            t: 0.0,
            theta: theta0.clone(),
            ledger,
        })
    }

    /// Advances by one configured `dt`.
    pub fn advance(&self, state: &mut RunState) -> Result<()> {
        self.advance_by(state, None)
    }

    /// Advances by `h` (defaults to the configured step); the ledger gains
    /// one entry.
    pub fn advance_by(&self, state: &mut RunState, h: Option<f64>) -> Result<()> {
        let (theta, rates) = match h {
            None => self.rk4(&state.theta, self.cfg.dt, &self.half, &self.full),
            Some(h) => {
                let half: Vec<f64> = self.linear.iter().map(|l| (-0.5 * h * l).exp()).collect();
                let full: Vec<f64> = self.linear.iter().map(|l| (-h * l).exp()).collect();
                self.rk4(&state.theta, h, &half, &full)
            }
        };
        let old = state.theta.l2_norm();
        let new = theta.l2_norm();
        let h = h.unwrap_or(self.cfg.dt);
        if !new.is_finite() || (old > 0.0 && new > MAX_STEP_GROWTH * old) {
            return Err(Error::StabilityViolation {
                t: state.t + h,
                growth: if old > 0.0 { new / old } else { f64::INFINITY },
            });
        }
        let prev = state.ledger.last().unwrap_or_default();
        state.t += h;
        state.ledger.push(LedgerEntry {
            t: state.t,
            l2_sq: theta.l2_norm_sq(),
            l2_drain: prev.l2_drain + rates.l2_drain,
            hs_gevrey_sq: self.tables.gevrey_sq(&theta),
            diss_accum: prev.diss_accum + rates.diss,
            x1w_sq_accum: prev.x1w_sq_accum + rates.x1w_sq,
        });
        state.theta = theta;
        Ok(())
    }

    fn rk4(
        &self,
        theta: &SpectralField,
        h: f64,
        half: &[f64],
        full: &[f64],
    ) -> (SpectralField, Rates) {
        let grid = theta.grid();
        let field = |v: Vec<Complex64>| SpectralField::from_raw_unchecked(grid, v);
        let th = theta.coeffs();

        // the nonlinearity enters with a minus sign: ∂tθ = -Lθ - u·∇θ
        let n1 = nonlinear_term(theta);
        let n1c = n1.coeffs();
        let a: Vec<Complex64> = (0..th.len())
            .map(|i| (th[i] - n1c[i] * (0.5 * h)) * half[i])
            .collect();
        let a = field(a);
        let n2 = nonlinear_term(&a);
        let n2c = n2.coeffs();
        let b: Vec<Complex64> = (0..th.len())
            .map(|i| th[i] * half[i] - n2c[i] * (0.5 * h))
            .collect();
        let b = field(b);
        let n3 = nonlinear_term(&b);
        let n3c = n3.coeffs();
        let c: Vec<Complex64> = (0..th.len())
            .map(|i| th[i] * full[i] - n3c[i] * half[i] * h)
            .collect();
        let c = field(c);
        let n4 = nonlinear_term(&c);
        let n4c = n4.coeffs();
        let next: Vec<Complex64> = (0..th.len())
            .map(|i| {
                let incr = n1c[i] * full[i] + (n2c[i] + n3c[i]) * (2.0 * half[i]) + n4c[i];
                th[i] * full[i] - incr * (h / 6.0)
            })
            .collect();
        let rates = Rates::combine(
            [
                self.rates(theta),
                self.rates(&a),
                self.rates(&b),
                self.rates(&c),
            ],
            h,
        );
        (field(next), rates)
    }

    pub fn report(&self, theta: &SpectralField) -> Result<NormReport> {
        self.tables.report(theta)
    }

    /// Runs from `theta0` to `t_end`, reporting every `output_stride` steps
    /// and at the final time.
    pub fn run(&self, theta0: &SpectralField) -> Result<RunOutput> {
        let mut reports = Vec::new();
        let state = self.run_observed(theta0, |t, theta| {
            reports.push((t, self.report(theta)?));
            Ok(())
        })?;
        Ok(RunOutput { reports, state })
    }

    /// Runs to `t_end`, calling `observe` at t = 0, every `output_stride`
    /// steps and at the final time.
    pub fn run_observed<F>(&self, theta0: &SpectralField, mut observe: F) -> Result<RunState>
    where
        F: FnMut(f64, &SpectralField) -> Result<()>,
    {
        let mut state = self.initial_state(theta0)?;
        observe(0.0, theta0)?;
        let (full, rest) = self.cfg.step_plan();
        let total = full + rest.is_some() as usize;
        for i in 0..total {
            let h = if i < full { None } else { rest };
            self.advance_by(&mut state, h)?;
            // pin times to the step grid instead of accumulating sums
            state.t = if i < full {
                (i + 1) as f64 * self.cfg.dt
            } else {
                self.cfg.t_end
            };
            let last = state.ledger.len() - 1;
            state.ledger.times[last] = state.t;
            let step = i + 1;
            if step % self.cfg.output_stride == 0 || step == total {
                observe(state.t, &state.theta)?;
            }
        }
        Ok(state)
    }
}

/// Advances `state` by one configured step.
pub fn step(state: &RunState, cfg: &SolverConfig) -> Result<RunState> {
    let integrator = Integrator::new(cfg)?;
    let mut next = state.clone();
    integrator.advance(&mut next)?;
    Ok(next)
}

pub fn run(theta0: &SpectralField, cfg: &SolverConfig) -> Result<RunOutput> {
    Integrator::new(cfg)?.run(theta0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::GevreyParams;
    use crate::spectral::{GridSpec, Wavevector};

    fn cfg(n: usize, dt: f64, t_end: f64) -> SolverConfig {
        SolverConfig::new(
            GridSpec::new(n).unwrap(),
            GevreyParams::new(0.1, 2.5, 0.25).unwrap(),
            dt,
            t_end,
        )
    }

    fn mode(g: GridSpec, k: (i32, i32), c: Complex64) -> SpectralField {
        SpectralField::from_modes(g, [(Wavevector::new(k.0, k.1), c)]).unwrap()
    }

    #[test]
    fn linear_sector_is_exact() {
        let c = cfg(16, 1e-2, 1.0).with_dissipation_order(0.5);
        let theta = mode(c.grid, (1, 0), Complex64::new(0.5, 0.0));
        let out = run(&theta, &c).unwrap();
        assert_eq!(out.reports.len(), 101);
        for (t, r) in &out.reports {
            let exact = (-t).exp() * theta.l2_norm();
            assert!((r.l2 - exact).abs() < 1e-13, "t = {t}");
        }
    }

    #[test]
    fn zero_stays_zero_and_t_end_zero_reports_once() {
        let c = cfg(16, 1e-2, 0.1);
        let z = SpectralField::zeros(c.grid);
        let out = run(&z, &c).unwrap();
        assert!(out.state.theta.is_zero());
        let once = run(&z, &c.with_t_end(0.0)).unwrap();
        assert_eq!(once.reports.len(), 1);
        assert_eq!(once.state.ledger.len(), 1);
    }

    #[test]
    fn closing_step_lands_on_t_end() {
        let c = cfg(16, 1e-2, 0.055).with_stride(2);
        let theta = mode(c.grid, (1, 1), Complex64::new(0.1, 0.2));
        let out = run(&theta, &c).unwrap();
        assert_eq!(out.state.t, 0.055);
        assert_eq!(out.reports.last().unwrap().0, 0.055);
        assert_eq!(out.reports.len(), 1 + 2 + 1);
        assert_eq!(out.state.ledger.len(), 7);
    }

    #[test]
    fn budget_closes_on_nonlinear_data() {
        let c = cfg(16, 1e-2, 0.5);
        let theta = &mode(c.grid, (1, 0), Complex64::new(0.3, 0.0))
            + &mode(c.grid, (1, 2), Complex64::new(0.0, 0.2));
        let out = run(&theta, &c).unwrap();
        out.state.theta.check_invariants().unwrap();
        assert!(out.state.ledger.max_budget_residual() < 1e-9);
    }

    #[test]
    fn stability_guard_fires() {
        let c = cfg(16, 5.0, 10.0);
        let theta = &mode(c.grid, (1, 0), Complex64::new(50.0, 0.0))
            + &mode(c.grid, (2, 3), Complex64::new(0.0, 50.0));
        assert!(matches!(
            run(&theta, &c),
            Err(Error::StabilityViolation { .. })
        ));
    }
}
