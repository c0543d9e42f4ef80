//! Experiment configuration documents.
//!
//! A document is TOML restricted to flat dotted keys (`solver.dt = 1e-3`).
//! Every key is listed in [`SCHEMA`]; unknown keys are rejected and missing
//! optional keys take the documented defaults. [`emit_config`] writes every
//! key in sorted order, so `emit → parse → emit` is byte-identical.
//!
//! Sweep documents may give an array for any scalar key; the sweep is the
//! cross product of all arrays, ordered by key name and then array order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use toml::Value;

use crate::error::{Error, Result};
use crate::init::{InitKind, InitialDataSpec};
use crate::norms::GevreyParams;
use crate::solver::SolverConfig;
use crate::spectral::{GridSpec, Wavevector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ty {
    Int,
    Float,
    Bool,
    Str,
}

#[derive(Clone, Copy, Debug)]
enum Fallback {
    Required,
    Optional,
    Value(&'static str),
}

struct KeySpec {
    key: &'static str,
    ty: Ty,
    default: Fallback,
}

const fn key(key: &'static str, ty: Ty, default: Fallback) -> KeySpec {
    KeySpec { key, ty, default }
}

use Fallback::{Optional, Required, Value as D};
use Ty::{Bool, Float, Int, Str};

/// Every accepted key, in emission (sorted) order.
const SCHEMA: &[KeySpec] = &[
    key("grid.n", Int, Required),
    key("init.amplitude", Float, D("0.1")),
    key("init.band_max", Float, D("8.0")),
    key("init.band_min", Float, D("1.0")),
    key("init.kind", Str, Required),
    key("init.mode2_k1", Int, D("0")),
    key("init.mode2_k2", Int, D("2")),
    key("init.mode_k1", Int, D("1")),
    key("init.mode_k2", Int, D("0")),
    key("init.seed", Int, D("0")),
    key("kato.ks", Str, D("\"10,100,1000\"")),
    key("monitors.bkm.enabled", Bool, D("true")),
    key("monitors.blowup.c1", Float, D("1.0")),
    key("monitors.blowup.c2", Float, D("1.0")),
    key("monitors.blowup.enabled", Bool, D("true")),
    key("monitors.budget.enabled", Bool, D("true")),
    key("monitors.budget.tolerance", Float, D("1e-6")),
    key("monitors.decay.enabled", Bool, D("true")),
    key("monitors.decay.eps", Float, D("0.1")),
    key("monitors.energy_audit.enabled", Bool, D("true")),
    key("monitors.energy_audit.tolerance", Float, D("1e-6")),
    key("monitors.existence.c_cal", Float, D("1e-4")),
    key("monitors.existence.enabled", Bool, D("true")),
    key("monitors.small_data.c_cal", Float, D("6.25e-6")),
    key("monitors.small_data.enabled", Bool, D("true")),
    key("output.write_field", Bool, D("true")),
    key("params.a", Float, Required),
    key("params.alpha", Float, Required),
    key("params.s", Float, Required),
    key("picard.horizon", Float, Optional),
    key("picard.iterations", Int, D("8")),
    key("picard.max_horizon", Float, D("1.0")),
    key("probes.pointwise.enabled", Bool, D("false")),
    key("probes.pointwise.samples", Int, D("100000")),
    key("probes.pointwise.seed", Int, D("0")),
    key("probes.product.band_max", Float, D("4.0")),
    key("probes.product.enabled", Bool, D("false")),
    key("probes.product.n", Int, D("16")),
    key("probes.product.seed", Int, D("0")),
    key("probes.product.trials", Int, D("200")),
    key("solver.dissipation_order", Float, Optional),
    key("solver.dt", Float, Required),
    key("solver.kappa", Float, D("1.0")),
    key("solver.kato_k", Int, Optional),
    key("solver.output_stride", Int, D("10")),
    key("solver.t_end", Float, Required),
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Toggle<T> {
    pub enabled: bool,
    pub value: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorConfig {
    /// L² budget tolerance (relative).
    pub budget: Toggle<f64>,
    /// Weighted energy inequality tolerance (relative).
    pub energy_audit: Toggle<f64>,
    pub small_data: Toggle<f64>,
    /// Decay threshold as a fraction of the initial weighted norm.
    pub decay: Toggle<f64>,
    /// `(c1, c2)` of the blow-up envelope.
    pub blowup: Toggle<(f64, f64)>,
    pub bkm: bool,
    pub existence: Toggle<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseProbeConfig {
    pub enabled: bool,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductProbeConfig {
    pub enabled: bool,
    pub trials: u64,
    pub n: usize,
    pub band_max: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    /// Fixed horizon; calibrated by bisection when absent.
    pub horizon: Option<f64>,
    pub iterations: usize,
    pub max_horizon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub solver: SolverConfig,
    pub init: InitialDataSpec,
    pub monitors: MonitorConfig,
    pub pointwise: PointwiseProbeConfig,
    pub product: ProductProbeConfig,
    pub picard: PicardConfig,
    pub kato_ks: Vec<u64>,
    pub write_field: bool,
}

impl ExperimentConfig {
    /// Replaces every seed in the document.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.init.seed = seed;
        self.pointwise.seed = seed;
        self.product.seed = seed;
        self
    }
}

fn schema(key: &str) -> Option<&'static KeySpec> {
    SCHEMA.iter().find(|k| k.key == key)
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        let full = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Table(t) => flatten(&full, t, out),
            other => {
                out.insert(full, other.clone());
            }
        }
    }
}

fn parse_document(text: &str) -> Result<BTreeMap<String, Value>> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let location = match e.span() {
            Some(span) => {
                let before = &text[..span.start.min(text.len())];
                let line = before.matches('\n').count() + 1;
                let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                format!("line {line}, column {col}")
            }
            None => "document".into(),
        };
        Error::Parse {
            location,
            message: e.message().to_string(),
        }
    })?;
    let mut flat = BTreeMap::new();
    flatten("", &table, &mut flat);
    for k in flat.keys() {
        if schema(k).is_none() {
            return Err(Error::UnknownKey(k.clone()));
        }
    }
    Ok(flat)
}

fn check_type(spec: &KeySpec, v: &Value) -> Result<Value> {
    let bad = || Error::Validation {
        key: spec.key.into(),
        message: format!("expected {:?}, got `{v}`", spec.ty).to_lowercase(),
    };
    Ok(match (spec.ty, v) {
        (Int, Value::Integer(_)) | (Bool, Value::Boolean(_)) | (Str, Value::String(_)) => v.clone(),
        (Float, Value::Float(f)) => {
            if !f.is_finite() {
                return Err(Error::Validation {
                    key: spec.key.into(),
                    message: format!("must be finite, got {f}"),
                });
            }
            v.clone()
        }
        (Float, Value::Integer(i)) => Value::Float(*i as f64),
        _ => return Err(bad()),
    })
}

struct Doc(BTreeMap<String, Value>);

impl Doc {
    fn resolve(flat: BTreeMap<String, Value>) -> Result<Doc> {
        let mut out = BTreeMap::new();
        for spec in SCHEMA {
            let v = match (flat.get(spec.key), spec.default) {
                (Some(v), _) => check_type(spec, v)?,
                (None, D(lit)) => {
                    let parsed: toml::Table =
                        format!("v = {lit}").parse().expect("schema defaults parse");
                    check_type(spec, &parsed["v"])?
                }
                (None, Optional) => continue,
                (None, Required) => {
                    return Err(Error::Validation {
                        key: spec.key.into(),
                        message: "required key is missing".into(),
                    })
                }
            };
            out.insert(spec.key.to_string(), v);
        }
        Ok(Doc(out))
    }

    fn f(&self, k: &str) -> f64 {
        self.0[k].as_float().expect("type checked")
    }

    fn opt_f(&self, k: &str) -> Option<f64> {
        self.0.get(k).and_then(Value::as_float)
    }

    fn i(&self, k: &str) -> Result<i64> {
        Ok(self.0[k].as_integer().expect("type checked"))
    }

    fn u(&self, k: &str) -> Result<u64> {
        let v = self.i(k)?;
        u64::try_from(v).map_err(|_| Error::Validation {
            key: k.into(),
            message: format!("must be >= 0, got {v}"),
        })
    }

    fn b(&self, k: &str) -> bool {
        self.0[k].as_bool().expect("type checked")
    }

    fn s(&self, k: &str) -> &str {
        self.0[k].as_str().expect("type checked")
    }

    fn wavevector(&self, k1: &str, k2: &str) -> Result<Wavevector> {
        let conv = |k: &str| -> Result<i32> {
            i32::try_from(self.i(k)?).map_err(|_| Error::Validation {
                key: k.into(),
                message: "out of range".into(),
            })
        };
        Ok(Wavevector::new(conv(k1)?, conv(k2)?))
    }
}

fn invalid(key: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        key: key.into(),
        message: message.into(),
    }
}

fn positive(doc: &Doc, k: &str) -> Result<f64> {
    let v = doc.f(k);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(k, format!("must be > 0, got {v}")))
    }
}

fn parse_ks(text: &str) -> Result<Vec<u64>> {
    let ks: Vec<u64> = text
        .split(',')
        .map(|s| s.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| invalid("kato.ks", format!("expected comma-separated integers: {e}")))?;
    if ks.is_empty() || ks.contains(&0) {
        return Err(invalid("kato.ks", "values must be >= 1"));
    }
    Ok(ks)
}

fn build(doc: &Doc) -> Result<ExperimentConfig> {
    let n = doc.u("grid.n")? as usize;
    let grid = GridSpec::new(n).map_err(|e| invalid("grid.n", e.to_string()))?;

    let alpha = doc.f("params.alpha");
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(invalid(
            "params.alpha",
            format!("alpha must be in (0, 1/2), got {alpha}"),
        ));
    }
    let s = doc.f("params.s");
    if !(s > 2.0) {
        return Err(invalid("params.s", format!("s must be > 2, got {s}")));
    }
    let a = doc.f("params.a");
    if !(a > 0.0) {
        return Err(invalid("params.a", format!("a must be > 0, got {a}")));
    }
    let params = GevreyParams::new(a, s, alpha).map_err(|e| invalid("params", e.to_string()))?;

    let mut solver = SolverConfig::new(
        grid,
        params,
        positive(doc, "solver.dt")?,
        doc.f("solver.t_end"),
    );
    if solver.t_end < 0.0 {
        return Err(invalid(
            "solver.t_end",
            format!("must be >= 0, got {}", solver.t_end),
        ));
    }
    solver.kappa = positive(doc, "solver.kappa")?;
    if let Some(order) = doc.opt_f("solver.dissipation_order") {
        if !(order > 0.0 && order <= 1.0) {
            return Err(invalid(
                "solver.dissipation_order",
                format!("must be in (0, 1], got {order}"),
            ));
        }
        solver.alpha_diss = order;
    }
    if doc.0.contains_key("solver.kato_k") {
        let k = doc.u("solver.kato_k")?;
        if k == 0 {
            return Err(invalid("solver.kato_k", "must be >= 1"));
        }
        solver.kato_k = Some(k);
    }
    solver.output_stride = doc.u("solver.output_stride")? as usize;
    if solver.output_stride == 0 {
        return Err(invalid("solver.output_stride", "must be >= 1"));
    }
    solver.validate()?;

    let kind = doc.s("init.kind");
    let init = InitialDataSpec {
        kind: InitKind::from_name(kind).ok_or_else(|| {
            invalid(
                "init.kind",
                format!("unknown kind `{kind}` (expected single_mode, x1_profile, random_band or two_mode)"),
            )
        })?,
        amplitude: doc.f("init.amplitude"),
        band_min: doc.f("init.band_min"),
        band_max: doc.f("init.band_max"),
        seed: doc.u("init.seed")?,
        mode: doc.wavevector("init.mode_k1", "init.mode_k2")?,
        mode2: doc.wavevector("init.mode2_k1", "init.mode2_k2")?,
    };
    if init.kind == InitKind::RandomBand {
        let cutoff = grid.dealias_cutoff();
        if !(init.band_min > 0.0
            && init.band_min <= init.band_max
            && init.band_max <= cutoff as f64)
        {
            return Err(invalid(
                "init.band_max",
                format!(
                    "band [{}, {}] must lie in (0, {cutoff}] for n = {n}",
                    init.band_min, init.band_max
                ),
            ));
        }
    }

    let toggle = |prefix: &str, value_key: &str| -> Result<Toggle<f64>> {
        Ok(Toggle {
            enabled: doc.b(&format!("monitors.{prefix}.enabled")),
            value: positive(doc, &format!("monitors.{prefix}.{value_key}"))?,
        })
    };
    let monitors = MonitorConfig {
        budget: toggle("budget", "tolerance")?,
        energy_audit: toggle("energy_audit", "tolerance")?,
        small_data: toggle("small_data", "c_cal")?,
        decay: toggle("decay", "eps")?,
        blowup: Toggle {
            enabled: doc.b("monitors.blowup.enabled"),
            value: (
                positive(doc, "monitors.blowup.c1")?,
                positive(doc, "monitors.blowup.c2")?,
            ),
        },
        bkm: doc.b("monitors.bkm.enabled"),
        existence: toggle("existence", "c_cal")?,
    };

    let pointwise = PointwiseProbeConfig {
        enabled: doc.b("probes.pointwise.enabled"),
        samples: doc.u("probes.pointwise.samples")?,
        seed: doc.u("probes.pointwise.seed")?,
    };
    let product_n = doc.u("probes.product.n")? as usize;
    GridSpec::new(product_n).map_err(|e| invalid("probes.product.n", e.to_string()))?;
    let product = ProductProbeConfig {
        enabled: doc.b("probes.product.enabled"),
        trials: doc.u("probes.product.trials")?,
        n: product_n,
        band_max: positive(doc, "probes.product.band_max")?,
        seed: doc.u("probes.product.seed")?,
    };

    let picard = PicardConfig {
        horizon: match doc.opt_f("picard.horizon") {
            Some(h) if !(h > 0.0 && h <= solver.t_end) => {
                return Err(invalid(
                    "picard.horizon",
                    format!("must be in (0, t_end], got {h}"),
                ))
            }
            h => h,
        },
        iterations: doc.u("picard.iterations")? as usize,
        max_horizon: positive(doc, "picard.max_horizon")?,
    };

    Ok(ExperimentConfig {
        solver,
        init,
        monitors,
        pointwise,
        product,
        picard,
        kato_ks: parse_ks(doc.s("kato.ks"))?,
        write_field: doc.b("output.write_field"),
    })
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let flat = parse_document(text)?;
    if let Some((k, _)) = flat.iter().find(|(_, v)| v.is_array()) {
        return Err(invalid(k, "arrays are only allowed in sweep documents"));
    }
    build(&Doc::resolve(flat)?)
}

fn to_document(cfg: &ExperimentConfig) -> BTreeMap<&'static str, Value> {
    let s = &cfg.solver;
    let p = &s.params;
    let m = &cfg.monitors;
    let f = Value::Float;
    let i = |v: i64| Value::Integer(v);
    let b = Value::Boolean;
    let mut d: BTreeMap<&'static str, Value> = BTreeMap::new();
    d.insert("grid.n", i(s.grid.n() as i64));
    d.insert("params.a", f(p.a()));
    d.insert("params.s", f(p.s()));
    d.insert("params.alpha", f(p.alpha()));
    d.insert("solver.dt", f(s.dt));
    d.insert("solver.t_end", f(s.t_end));
    d.insert("solver.kappa", f(s.kappa));
    if s.alpha_diss != p.alpha() {
        d.insert("solver.dissipation_order", f(s.alpha_diss));
    }
    if let Some(k) = s.kato_k {
        d.insert("solver.kato_k", i(k as i64));
    }
    d.insert("solver.output_stride", i(s.output_stride as i64));
    d.insert("init.kind", Value::String(cfg.init.kind.name().into()));
    d.insert("init.amplitude", f(cfg.init.amplitude));
    d.insert("init.band_min", f(cfg.init.band_min));
    d.insert("init.band_max", f(cfg.init.band_max));
    d.insert("init.seed", i(cfg.init.seed as i64));
    d.insert("init.mode_k1", i(cfg.init.mode.k1 as i64));
    d.insert("init.mode_k2", i(cfg.init.mode.k2 as i64));
    d.insert("init.mode2_k1", i(cfg.init.mode2.k1 as i64));
    d.insert("init.mode2_k2", i(cfg.init.mode2.k2 as i64));
    d.insert("monitors.budget.enabled", b(m.budget.enabled));
    d.insert("monitors.budget.tolerance", f(m.budget.value));
    d.insert("monitors.energy_audit.enabled", b(m.energy_audit.enabled));
    d.insert("monitors.energy_audit.tolerance", f(m.energy_audit.value));
    d.insert("monitors.small_data.enabled", b(m.small_data.enabled));
    d.insert("monitors.small_data.c_cal", f(m.small_data.value));
    d.insert("monitors.decay.enabled", b(m.decay.enabled));
    d.insert("monitors.decay.eps", f(m.decay.value));
    d.insert("monitors.blowup.enabled", b(m.blowup.enabled));
    d.insert("monitors.blowup.c1", f(m.blowup.value.0));
    d.insert("monitors.blowup.c2", f(m.blowup.value.1));
    d.insert("monitors.bkm.enabled", b(m.bkm));
    d.insert("monitors.existence.enabled", b(m.existence.enabled));
    d.insert("monitors.existence.c_cal", f(m.existence.value));
    d.insert("probes.pointwise.enabled", b(cfg.pointwise.enabled));
    d.insert("probes.pointwise.samples", i(cfg.pointwise.samples as i64));
    d.insert("probes.pointwise.seed", i(cfg.pointwise.seed as i64));
    d.insert("probes.product.enabled", b(cfg.product.enabled));
    d.insert("probes.product.trials", i(cfg.product.trials as i64));
    d.insert("probes.product.n", i(cfg.product.n as i64));
    d.insert("probes.product.band_max", f(cfg.product.band_max));
    d.insert("probes.product.seed", i(cfg.product.seed as i64));
    if let Some(h) = cfg.picard.horizon {
        d.insert("picard.horizon", f(h));
    }
    d.insert("picard.iterations", i(cfg.picard.iterations as i64));
    d.insert("picard.max_horizon", f(cfg.picard.max_horizon));
    let ks: Vec<String> = cfg.kato_ks.iter().map(u64::to_string).collect();
    d.insert("kato.ks", Value::String(ks.join(",")));
    d.insert("output.write_field", b(cfg.write_field));
    d
}

fn render(v: &Value) -> String {
    match v {
        // `{:?}` keeps a decimal point or exponent and round-trips exactly
        Value::Float(x) => format!("{x:?}"),
        other => other.to_string(),
    }
}

/// Canonical text: every key, sorted, one `key = value` per line.
pub fn emit_config(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    for (k, v) in to_document(cfg) {
        let _ = writeln!(out, "{k} = {}", render(&v));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepMember {
    /// `key=value` pairs of the swept keys, comma separated.
    pub label: String,
    pub config: ExperimentConfig,
}

/// Expands array-valued keys into their cross product.
pub fn parse_sweep(text: &str) -> Result<Vec<SweepMember>> {
    let flat = parse_document(text)?;
    let mut axes: Vec<(String, Vec<Value>)> = Vec::new();
    let mut base = BTreeMap::new();
    for (k, v) in flat {
        match v {
            Value::Array(items) => {
                if items.is_empty() {
                    return Err(invalid(&k, "sweep arrays must be nonempty"));
                }
                if items.iter().any(|x| x.is_array() || x.is_table()) {
                    return Err(invalid(&k, "sweep arrays must hold scalars"));
                }
                axes.push((k, items));
            }
            other => {
                base.insert(k, other);
            }
        }
    }
    let total: usize = axes.iter().map(|(_, v)| v.len()).product();
    let mut members = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut doc = base.clone();
        let mut label = Vec::new();
        // last axis varies fastest
        let mut picks = vec![0; axes.len()];
        for (a, (_, vals)) in axes.iter().enumerate().rev() {
            picks[a] = idx % vals.len();
            idx /= vals.len();
        }
        for ((k, vals), &p) in axes.iter().zip(&picks) {
            let spec = schema(k).expect("keys checked on parse");
            let v = check_type(spec, &vals[p])?;
            label.push(format!("{k}={}", render(&v)));
            doc.insert(k.clone(), v);
        }
        members.push(SweepMember {
            label: label.join(","),
            config: build(&Doc::resolve(doc)?)?,
        });
    }
    Ok(members)
}
