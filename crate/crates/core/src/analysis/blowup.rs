use serde::{Deserialize, Serialize};

use super::ledger::EnergyLedger;
use crate::error::{Error, Result};

/// A lower bound `B(T* − t) ≤ ‖θ(t)‖²` that any solution blowing up at `T*`
/// must obey, decreasing in the remaining time.
pub trait BlowupBound {
    fn eval(&self, remaining: f64) -> Result<f64>;

    /// Remaining time `r` with `eval(r) = value`; infinite for `value <= 0`.
    fn invert(&self, value: f64) -> f64 {
        if !(value > 0.0) {
            return f64::INFINITY;
        }
        let target = value.ln();
        let g = |log_r: f64| self.log_eval(log_r.exp()) - target;
        // g is decreasing in log r; widen until the root is bracketed
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        while g(lo) < 0.0 {
            lo *= 2.0;
            if lo < -700.0 {
                return 0.0;
            }
        }
        while g(hi) > 0.0 {
            hi *= 2.0;
            if hi > 700.0 {
                return f64::INFINITY;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).exp()
    }

    /// `ln eval(remaining)`, finite where `eval` would overflow.
    fn log_eval(&self, remaining: f64) -> f64;
}

/// `c1/r² · exp(2a·c2/r^{alpha/s})` with `r = T* − t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupEnvelope {
    pub c1: f64,
    pub c2: f64,
    pub a: f64,
    pub alpha: f64,
    pub s: f64,
}

impl BlowupEnvelope {
    pub fn new(c1: f64, c2: f64, a: f64, alpha: f64, s: f64) -> Result<Self> {
        if !(c1 > 0.0 && c2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "envelope constants must be > 0, got c1 = {c1}, c2 = {c2}"
            )));
        }
        if !(a >= 0.0 && alpha > 0.0 && s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "envelope needs a >= 0, alpha > 0, s > 0 (got {a}, {alpha}, {s})"
            )));
        }
        Ok(BlowupEnvelope {
            c1,
            c2,
            a,
            alpha,
            s,
        })
    }
}

fn check_remaining(remaining: f64) -> Result<()> {
    if remaining > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveRemaining(remaining))
    }
}

impl BlowupBound for BlowupEnvelope {
    fn eval(&self, remaining: f64) -> Result<f64> {
        check_remaining(remaining)?;
        Ok(self.log_eval(remaining).exp())
    }

    fn log_eval(&self, r: f64) -> f64 {
        self.c1.ln() - 2.0 * r.ln() + 2.0 * self.a * self.c2 * r.powf(-self.alpha / self.s)
    }
}

/// `c/r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateBound {
    pub c: f64,
}

impl BlowupBound for RateBound {
    fn eval(&self, remaining: f64) -> Result<f64> {
        check_remaining(remaining)?;
        Ok(self.c / remaining)
    }

    fn log_eval(&self, r: f64) -> f64 {
        self.c.ln() - r.ln()
    }

    fn invert(&self, value: f64) -> f64 {
        if value > 0.0 {
            self.c / value
        } else {
            f64::INFINITY
        }
    }
}

pub fn blowup_envelope_eval(env: &BlowupEnvelope, remaining: f64) -> Result<f64> {
    env.eval(remaining)
}

/// Earliest blow-up time consistent with the observed `‖θ(t)‖²` values:
/// `max_t (t + B⁻¹(‖θ(t)‖²))`. Infinite when the ledger is identically zero.
pub fn no_blowup_before(ledger: &EnergyLedger, bound: &dyn BlowupBound) -> Result<f64> {
    if ledger.is_empty() {
        return Err(Error::EmptyLedger);
    }
    Ok(ledger
        .times
        .iter()
        .zip(&ledger.hs_gevrey_sq)
        .map(|(t, v)| t + bound.invert(*v))
        .fold(f64::NEG_INFINITY, f64::max))
}
