//! Pseudo-spectral solver and diagnostics for the dissipative surface
//! quasi-geostrophic equation on the periodic square, measured in
//! Gevrey–Sobolev norms.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod init;
pub mod norms;
pub mod solver;
pub mod spectral;

pub use analysis::{EnergyLedger, ProbeReport};
pub use error::{Error, Result};
pub use experiment::{emit_config, parse_config, parse_sweep, ExperimentConfig, SweepMember};
pub use init::{generate_initial_data, InitKind, InitialDataSpec};
pub use norms::{GevreyParams, GevreyWeight, NormReport};
pub use solver::{run, RunOutput, RunState, SolverConfig};
pub use spectral::{GridSpec, SpectralField, Wavevector};
