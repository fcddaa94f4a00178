//! Continuous-time simulation of chase-escape with conversion.

mod config;
mod engine;
mod params;
mod per_clock;
mod snapshot;

pub use config::{
    initial_states, prepare_graph, recount, Configuration, EventKind, EventRecord, SiteState,
};
pub use engine::{run_band_experiment, run_to_fixation, RunLimits, RunOutcome, RunStatus, Simulation};
pub use params::{validate_params, ProcessParams};
pub use per_clock::per_clock_run;
pub use snapshot::{snapshot, Snapshot};
