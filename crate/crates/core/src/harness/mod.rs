//! Config-driven experiment runner with CSV and plot-data output.
//!
//! A run is described by an [`ExperimentConfig`] (built in code or parsed
//! from a key=value file), executed by [`run`] or one of the per-experiment
//! entry points, and written out by [`write_experiment_outputs`]. With
//! timing disabled (the default), a config plus master seed reproduces
//! every output file byte for byte.

mod config;
mod experiments;
mod output;

pub use config::{algorithm_name, DecayAxis, ExperimentConfig, ExperimentKind, ModelKind};
pub use experiments::{
    run, run_compression_sweep, run_decay_sweep, run_separation_sweep, run_single, run_snr_sweep,
    ExperimentOutcome, TrialRecord,
};
pub use output::{
    csv_string, emit_csv, emit_plotdata, parse_csv, write_experiment_outputs, SummaryTable,
    CSV_HEADER,
};
