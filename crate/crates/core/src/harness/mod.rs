//! Monte Carlo trials, parameter sweeps, IQ capture files and result tables.

mod iq;
mod report;
mod sweep;
mod trial;

pub use iq::{read_iq_capture, write_iq_capture, CaptureMeta, TrialSidecar, IQ_HEADER_LEN, IQ_MAGIC, IQ_VERSION};
pub use report::{emit_results, render_results, format_float, read_json_results, OutputFormat, CSV_HEADER};
pub use sweep::{run_sweep, trial_seed, ReceiverKind, SweepResultRow, SweepSpec};
pub use trial::{
    draw_trial, estimate_noise_floor, run_trial, DrawnTrial, TrialPoint, TrialRecord, TrialPair,
};
