//! Monte Carlo plumbing: reproducible replica execution, escape-probability
//! sweeps with Wilson intervals, curve-crossing estimates, and a two-sample
//! chi-squared test used by every equivalence check.

mod chi2;
mod crossing;
mod replicas;
mod sweep;

pub use chi2::{distribution_compare, ChiSquareReport, SIGNIFICANCE};
pub use crossing::{estimate_crossing, CrossingEstimate, PairCrossing};
pub use replicas::{run_replicas, run_replicas_seeded, Workers};
pub use sweep::{
    escape_probability, parse_sweep_csv, sweep, wilson, EstimateRow, SweepRow, SweepSpec, SweepTable,
    Vary, CSV_HEADER, WILSON_Z,
};
