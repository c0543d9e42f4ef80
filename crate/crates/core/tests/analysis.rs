mod common;

use common::*;
use num_complex::Complex64;
use sqg_core::analysis::{
    algebra_ratio, audit_with_coefficient, bkm_integral, decay_report, no_blowup_before,
    pointwise_inequality_probe, product_ratio_probe, small_data_check, small_data_constant,
    BlowupBound, BlowupEnvelope, LedgerEntry, RateBound,
};
use sqg_core::solver::Integrator;
use sqg_core::{
    run, EnergyLedger, GevreyParams, GevreyWeight, SolverConfig, SpectralField, Wavevector,
};

fn params() -> GevreyParams {
    GevreyParams::new(0.1, 2.5, 0.25).unwrap()
}

fn single_mode(k: Wavevector, c: f64) -> SpectralField {
    SpectralField::from_modes(grid(16), [(k, Complex64::new(c, 0.0))]).unwrap()
}

#[test]
fn degenerate_audit_is_the_l2_budget() {
    let theta = random_field(16, 5.0, 4).scaled(0.5);
    let cfg = SolverConfig::new(grid(16), params(), 1e-2, 0.3);
    let w = GevreyWeight::new(0.0, 0.0, 0.25).unwrap();
    let ledger = Integrator::with_ledger_weight(&cfg, w)
        .unwrap()
        .run(&theta)
        .unwrap()
        .state
        .ledger;
    let audit = audit_with_coefficient(&ledger, 2.0 * cfg.kappa);
    let budget = (0..ledger.len())
        .map(|i| ledger.budget_residual(i))
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((audit - budget).abs() < 1e-15, "{audit:e} vs {budget:e}");
}

#[test]
fn bkm_integral_of_a_decaying_mode() {
    let k = Wavevector::new(3, 0);
    let p = params();
    let theta = single_mode(k, 0.2);
    let t_end = 0.4;
    let ledger = run(&theta, &SolverConfig::new(grid(16), p, 1e-2, t_end))
        .unwrap()
        .state
        .ledger;
    let r = k.norm();
    let lambda = r.powf(2.0 * p.alpha());
    let x0 = 2.0 * r * (p.a() * p.alpha() * r.powf(p.alpha())).exp() * 0.2;
    let exact = x0 * x0 * (1.0 - (-2.0 * lambda * t_end).exp()) / (2.0 * lambda);
    assert!((bkm_integral(&ledger) / exact - 1.0).abs() < 1e-9);
}

#[test]
fn decay_crossing_of_a_single_mode() {
    let k = Wavevector::new(4, 3);
    let theta = single_mode(k, 1.0);
    let dt = 1e-2;
    let ledger = run(&theta, &SolverConfig::new(grid(16), params(), dt, 3.0))
        .unwrap()
        .state
        .ledger;
    let n0 = ledger.hs_gevrey_sq[0].sqrt();
    let lambda = k.norm().powf(0.5);
    let exact = 10f64.ln() / lambda;
    let d = decay_report(&ledger, 0.1 * n0);
    let t = d.first_below.unwrap();
    assert!(
        t >= exact - 1e-12 && t <= exact + dt + 1e-12,
        "{t} vs {exact}"
    );
    assert!(d.monotone_tail);
}

#[test]
fn constant_ledger_inversion_matches_scan() {
    let env = BlowupEnvelope::new(2.0, 1.5, 0.1, 0.25, 2.5).unwrap();
    let v = 40.0;
    let mut ledger = EnergyLedger::new(params().weight());
    for i in 0..=10 {
        ledger.push(LedgerEntry {
            t: i as f64 * 0.1,
            hs_gevrey_sq: v,
            ..Default::default()
        });
    }
    let bound = no_blowup_before(&ledger, &env).unwrap();
    // envelope is decreasing in r: last r on a fine grid with eval(r) ≥ v
    let mut r_star = 0.0;
    for j in 1..=2_000_000 {
        let r = j as f64 * 1e-6;
        if env.eval(r).unwrap() >= v {
            r_star = r;
        }
    }
    assert!(
        (bound - (1.0 + r_star)).abs() < 2e-6,
        "{bound} vs {}",
        1.0 + r_star
    );
}

#[test]
fn rate_bound_inverts_exactly() {
    let mut ledger = EnergyLedger::new(params().weight());
    for (t, v) in [(0.0, 4.0), (0.5, 1.0), (1.0, 8.0)] {
        ledger.push(LedgerEntry {
            t,
            hs_gevrey_sq: v,
            ..Default::default()
        });
    }
    let b = no_blowup_before(&ledger, &RateBound { c: 2.0 }).unwrap();
    assert!((b - 2.5).abs() < 1e-15);
}

#[test]
fn algebra_ratio_of_a_cosine() {
    let p = params();
    let w = p.weight();
    let weight = |k: Wavevector| w.log_weight_sq(k, false).unwrap().exp();
    for k in [
        Wavevector::new(1, 0),
        Wavevector::new(2, 3),
        Wavevector::new(5, 1),
    ] {
        let f = single_mode(k, 0.5);
        let r = algebra_ratio(&f, &f, &p).unwrap().unwrap();
        let k2 = Wavevector::new(2 * k.k1, 2 * k.k2);
        let exact = (0.25 + weight(k2) / 8.0).sqrt() / (weight(k) / 2.0);
        assert!((r / exact - 1.0).abs() < 1e-13, "{k:?}");
    }
}

#[test]
fn small_data_threshold_matches_constant() {
    let theta = random_field(16, 4.0, 1);
    let check = small_data_check(&theta, &params(), small_data_constant(10.0));
    assert!((check.threshold - 10.0).abs() < 1e-12);
    assert_eq!(check.passes, check.norm < 10.0);
}

#[test]
fn probes_are_seed_stable() {
    let a = pointwise_inequality_probe(5_000, None, 0.3, 17).unwrap();
    let b = pointwise_inequality_probe(5_000, None, 0.3, 17).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|r| r.violations == 0 && r.trials == 5_000));
    let p = params();
    let c = product_ratio_probe(60, &p, 16, 4.0, 5).unwrap();
    let d = product_ratio_probe(60, &p, 16, 4.0, 5).unwrap();
    assert_eq!(c, d);
    let algebra = c.iter().find(|r| r.inequality_id == "algebra").unwrap();
    assert_eq!(algebra.skipped, 1);
    assert_eq!(algebra.trials, 59);
}

#[test]
fn probe_json_has_the_documented_keys() {
    let r = &pointwise_inequality_probe(100, Some(0.25), 0.1, 3).unwrap()[0];
    let json = r.to_json();
    for key in ["inequality_id", "trials", "violations", "min_slack", "seed"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert!(json.get("sup_ratio").is_none());
}
