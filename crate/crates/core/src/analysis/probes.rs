use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::init::random_band;
use crate::norms::{
    fractional_gevrey_norm_sq, gevrey_norm_sq, xsigma_norm, GevreyParams, ModeSource,
};
use crate::spectral::{GridSpec, SpectralField, Wavevector};

/// Relative slack below which a pointwise sample counts as a violation.
pub const SLACK_TOL: f64 = -1e-14;

pub type Modes = BTreeMap<Wavevector, Complex64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub inequality_id: String,
    pub trials: u64,
    pub violations: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sup_ratio: Option<f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "is_zero", default)]
    pub skipped: u64,
    /// Sample with the smallest slack, for diagnostics.
    #[serde(skip)]
    pub worst: Option<String>,
}

fn is_zero(v: &u64) -> bool {
    *v == 0
}

impl ProbeReport {
    /// `InequalityViolated` if any sample broke a pointwise inequality.
    pub fn ensure_holds(&self) -> Result<()> {
        if self.violations == 0 {
            return Ok(());
        }
        Err(Error::InequalityViolated {
            inequality: self.inequality_id.clone(),
            location: self.worst.clone().unwrap_or_default(),
            slack: self.min_slack.unwrap_or(f64::NAN),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("probe reports are plain data")
    }
}

/// Relative slack of `|ξ|^α ≤ max(|ξ−η|,|η|)^α + α·min(|ξ−η|,|η|)^α`.
pub fn power_slack(xi: [f64; 2], eta: [f64; 2], alpha: f64) -> f64 {
    let d = [xi[0] - eta[0], xi[1] - eta[1]];
    let (p, q) = (d[0].hypot(d[1]), eta[0].hypot(eta[1]));
    let lhs = xi[0].hypot(xi[1]).powf(alpha);
    let rhs = p.max(q).powf(alpha) + alpha * p.min(q).powf(alpha);
    if rhs == 0.0 {
        return if lhs == 0.0 { 0.0 } else { -1.0 };
    }
    (rhs - lhs) / rhs
}

/// Relative slack of `e^{a|ξ|^α} ≤ e^{a|ξ−η|^α}·e^{a|η|^α}`, compared in
/// log space.
pub fn exp_slack(xi: [f64; 2], eta: [f64; 2], alpha: f64, a: f64) -> f64 {
    let d = [xi[0] - eta[0], xi[1] - eta[1]];
    let lhs = a * xi[0].hypot(xi[1]).powf(alpha);
    let rhs = a * (d[0].hypot(d[1]).powf(alpha) + eta[0].hypot(eta[1]).powf(alpha));
    if rhs == 0.0 {
        return if lhs == 0.0 { 0.0 } else { -1.0 };
    }
    (rhs - lhs) / rhs
}

struct SlackTracker {
    report: ProbeReport,
}

impl SlackTracker {
    fn new(id: &str, seed: u64) -> Self {
        SlackTracker {
            report: ProbeReport {
                inequality_id: id.into(),
                trials: 0,
                violations: 0,
                min_slack: None,
                sup_ratio: None,
                seed,
                skipped: 0,
                worst: None,
            },
        }
    }

    fn record(&mut self, slack: f64, sample: impl FnOnce() -> String) {
        let r = &mut self.report;
        r.trials += 1;
        if !(slack >= SLACK_TOL) {
            r.violations += 1;
        }
        if r.min_slack.is_none_or(|m| slack < m) {
            r.min_slack = Some(slack);
            r.worst = Some(sample());
        }
    }
}

/// Samples `(ξ, η)` and checks both pointwise inequalities on each.
///
/// Half the samples are integer wavevectors from the band `|k_i| ≤ 64`, the
/// rest continuum points at log-uniform scales. `alpha = None` draws a fresh
/// order in `(0, 1)` for every sample. Degenerate cases (`η = 0`, `η = ξ`,
/// collinear pairs) are mixed in deliberately.
pub fn pointwise_inequality_probe(
    samples: u64,
    alpha: Option<f64>,
    a: f64,
    seed: u64,
) -> Result<Vec<ProbeReport>> {
    if let Some(al) = alpha {
        if !(al > 0.0 && al <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be in (0, 1], got {al}"
            )));
        }
    }
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("a must be > 0, got {a}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut power = SlackTracker::new("power_subadditivity", seed);
    let mut expo = SlackTracker::new("exponential_triangle", seed);
    for i in 0..samples {
        let al = alpha.unwrap_or_else(|| loop {
            let v: f64 = rng.random();
            if v > 0.0 {
                break v;
            }
        });
        let (xi, eta) = match i % 8 {
            0..=3 => {
                let mut lattice = || {
                    [
                        rng.random_range(-64..=64) as f64,
                        rng.random_range(-64..=64) as f64,
                    ]
                };
                (lattice(), lattice())
            }
            4 | 5 => {
                let scale = 10f64.powf(rng.random_range(-3.0..6.0));
                let mut point = || {
                    [
                        rng.random_range(-1.0..1.0) * scale,
                        rng.random_range(-1.0..1.0) * scale,
                    ]
                };
                (point(), point())
            }
            6 => {
                // collinear: η = λξ
                let x = [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
                let l: f64 = rng.random_range(-1.0..2.0);
                (x, [l * x[0], l * x[1]])
            }
            _ => {
                let x = [
                    rng.random_range(-50..=50) as f64,
                    rng.random_range(-50..=50) as f64,
                ];
                if rng.random_bool(0.5) {
                    (x, [0.0, 0.0])
                } else {
                    (x, x)
                }
            }
        };
        let describe = || format!("xi = {xi:?}, eta = {eta:?}, alpha = {al}");
        power.record(power_slack(xi, eta, al), describe);
        expo.record(exp_slack(xi, eta, al, a), describe);
    }
    Ok(vec![power.report, expo.report])
}

/// Exact product of two mode sets (no truncation).
pub fn convolve(f: &dyn ModeSource, g: &dyn ModeSource) -> Modes {
    let collect = |src: &dyn ModeSource| {
        let mut v = Vec::new();
        src.for_each_mode(&mut |k, c| v.push((k, c)));
        v
    };
    let (fv, gv) = (collect(f), collect(g));
    let mut out = Modes::new();
    for (p, a) in &fv {
        for (q, b) in &gv {
            *out.entry(*p + *q).or_default() += a * b;
        }
    }
    out
}

fn to_modes(f: &dyn ModeSource) -> Modes {
    let mut m = Modes::new();
    f.for_each_mode(&mut |k, c| {
        m.insert(k, c);
    });
    m
}

fn map_modes(f: &Modes, symbol: impl Fn(Wavevector) -> Complex64) -> Modes {
    f.iter().map(|(k, c)| (*k, c * symbol(*k))).collect()
}

/// `u_θ·∇ω` by exact convolution.
pub fn exact_transport(theta: &dyn ModeSource, omega: &dyn ModeSource) -> Modes {
    let th = to_modes(theta);
    let om = to_modes(omega);
    let i = Complex64::new(0.0, 1.0);
    let riesz = |k: Wavevector| if k.is_zero() { 0.0 } else { 1.0 / k.norm() };
    let u1 = map_modes(&th, |k| -i * k.k2 as f64 * riesz(k));
    let u2 = map_modes(&th, |k| i * k.k1 as f64 * riesz(k));
    let d1 = map_modes(&om, |k| i * k.k1 as f64);
    let d2 = map_modes(&om, |k| i * k.k2 as f64);
    let mut out = convolve(&u1, &d1);
    for (k, c) in convolve(&u2, &d2) {
        *out.entry(k).or_default() += c;
    }
    out
}

/// `Re ⟨f, g⟩` in `H^s_{a,1/alpha}`.
pub fn gevrey_inner(f: &Modes, g: &Modes, p: &GevreyParams) -> Result<f64> {
    let w = p.weight();
    let mut sum = 0.0;
    for (k, a) in f {
        if let Some(b) = g.get(k) {
            let lw = w.log_weight_sq(*k, false).unwrap_or(f64::NEG_INFINITY);
            if lw > crate::norms::LOG_MAX {
                return Err(Error::WeightOverflow {
                    k: *k,
                    exponent: lw,
                });
            }
            sum += lw.exp() * (a * b.conj()).re;
        }
    }
    Ok(sum)
}

/// Ratio of `‖fg‖_{H^s}` to `‖f‖_{H^s}‖g‖_{H^s}` (Gevrey-weighted), or
/// `None` when either factor vanishes.
pub fn algebra_ratio(
    f: &dyn ModeSource,
    g: &dyn ModeSource,
    p: &GevreyParams,
) -> Result<Option<f64>> {
    let w = p.weight();
    let nf = gevrey_norm_sq(f, &w, false)?.sqrt();
    let ng = gevrey_norm_sq(g, &w, false)?.sqrt();
    if nf == 0.0 || ng == 0.0 {
        return Ok(None);
    }
    let fg = convolve(f, g);
    Ok(Some(gevrey_norm_sq(&fg, &w, false)?.sqrt() / (nf * ng)))
}

/// The trilinear ratios, keyed by inequality id; `None` for vanishing
/// denominators.
pub fn trilinear_ratios(
    theta: &SpectralField,
    omega: &SpectralField,
    p: &GevreyParams,
) -> Result<Vec<(&'static str, Option<f64>)>> {
    let w = p.weight();
    let alpha = p.alpha();
    let norm = |f: &SpectralField| -> Result<f64> { Ok(gevrey_norm_sq(f, &w, false)?.sqrt()) };
    let dnorm = |f: &SpectralField| -> Result<f64> {
        Ok(fractional_gevrey_norm_sq(f, &w, alpha, false)?.sqrt())
    };
    let x1w = |f: &SpectralField| xsigma_norm(f, 1.0, p.a() * alpha, alpha);
    let hdot = |f: &SpectralField| -> Result<f64> { Ok(gevrey_norm_sq(f, &w, true)?.sqrt()) };

    let tri_mixed = gevrey_inner(&exact_transport(theta, omega), &to_modes(omega), p)?.abs();
    let tri_self = gevrey_inner(&exact_transport(theta, theta), &to_modes(theta), p)?.abs();
    let ratio = |num: f64, den: f64| if den > 0.0 { Some(num / den) } else { None };

    let (nt, no) = (norm(theta)?, norm(omega)?);
    let (dt, d_o) = (dnorm(theta)?, dnorm(omega)?);
    let (xt, xo) = (x1w(theta)?, x1w(omega)?);
    Ok(vec![
        (
            "trilinear_mixed",
            ratio(tri_mixed, (xt * d_o + dt * xo) * no),
        ),
        ("trilinear_x1", ratio(tri_self, xt * dt * nt)),
        (
            "trilinear_homogeneous",
            ratio(tri_self, dt * hdot(theta)?.powi(2)),
        ),
        ("trilinear_plain", ratio(tri_mixed, nt * d_o * no)),
        ("trilinear_dissipative", ratio(tri_self, nt * dt * dt)),
    ])
}

/// Monte Carlo estimate of the product and trilinear constants on an
/// `n`-grid: `f`, `g` random band-limited fields with band `[1, band_max]`.
/// Every `skip_every`-th trial (when nonzero) zeroes one factor to exercise
/// the vacuous case.
pub fn product_ratio_probe(
    trials: u64,
    p: &GevreyParams,
    n: usize,
    band_max: f64,
    seed: u64,
) -> Result<Vec<ProbeReport>> {
    let grid = GridSpec::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports: Vec<ProbeReport> = Vec::new();
    let mut upsert = |id: &str, value: Option<f64>| {
        let idx = match reports.iter().position(|r| r.inequality_id == id) {
            Some(i) => i,
            None => {
                reports.push(ProbeReport {
                    inequality_id: id.into(),
                    trials: 0,
                    violations: 0,
                    min_slack: None,
                    sup_ratio: Some(0.0),
                    seed,
                    skipped: 0,
                    worst: None,
                });
                reports.len() - 1
            }
        };
        let r = &mut reports[idx];
        match value {
            Some(v) if v.is_finite() => {
                r.trials += 1;
                r.sup_ratio = r.sup_ratio.map(|s| s.max(v));
            }
            _ => r.skipped += 1,
        }
    };
    for trial in 0..trials {
        let bmax = rng.random_range(1.0..=band_max);
        let f = random_band(grid, 1.0, bmax, 1.0, &mut rng)?;
        let bmax = rng.random_range(1.0..=band_max);
        let mut g = random_band(grid, 1.0, bmax, 1.0, &mut rng)?;
        if trial % 50 == 49 {
            g = SpectralField::zeros(grid);
        }
        upsert("algebra", algebra_ratio(&f, &g, p)?);
        for (id, v) in trilinear_ratios(&f, &g, p)? {
            upsert(id, v);
        }
    }
    Ok(reports)
}
