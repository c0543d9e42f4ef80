//! Library side of the `sqg` command: artifact formats and drivers.

pub mod artifacts;
pub mod orchestrate;

pub use artifacts::{read_series, write_series, SeriesRow, SERIES_COLUMNS, SERIES_VERSION};
pub use orchestrate::{
    kato, picard, report, run_experiment, sweep, verify, Check, RunSummary, SeriesSummary,
    SweepSummary, VerifySummary,
};

/// Environment variable that sets the sweep worker count.
pub const THREADS_ENV: &str = "SQG_THREADS";
