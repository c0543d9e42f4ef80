mod config;
mod integrator;
mod kato;
mod picard;

pub use config::{default_dt, SolverConfig};
pub use integrator::{run, step, Integrator, RunOutput, RunState, MAX_STEP_GROWTH};
pub use kato::{kato_compare, KatoReport, KatoRow};
pub use picard::{
    calibrate_existence_constant, contraction_boundary, existence_time_estimate, picard_iterate,
    PicardReport, PICARD_FLOOR,
};
