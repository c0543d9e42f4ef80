mod blowup;
mod calibration;
mod ledger;
mod monitors;
mod probes;

pub use blowup::{blowup_envelope_eval, no_blowup_before, BlowupBound, BlowupEnvelope, RateBound};
pub use calibration::{
    calibrate_existence, calibrate_small_data, norm_non_increasing, ExistenceCalibration,
    SmallDataCalibration,
};
pub use ledger::{EnergyLedger, LedgerEntry};
pub use monitors::{
    audit_with_coefficient, bkm_integral, decay_report, energy_inequality_audit, small_data_check,
    small_data_constant, DecayReport, SmallDataCheck, MONOTONE_TOL,
};
pub use probes::{
    algebra_ratio, convolve, exact_transport, exp_slack, gevrey_inner, pointwise_inequality_probe,
    power_slack, product_ratio_probe, trilinear_ratios, Modes, ProbeReport, SLACK_TOL,
};
