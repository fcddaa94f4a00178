//! Exact simulation of chase-escape with conversion.
//!
//! Red sites spread to white neighbours at rate `lambda`, blue sites predate
//! red neighbours at rate 1, and every red site converts to blue at rate
//! `alpha`. The crate provides:
//!
//! * [`graph`]: graph families, row layouts for band experiments, and a
//!   plain-text graph format.
//! * [`process`]: an aggregate-rate event engine, a per-clock reference
//!   engine, and snapshots.
//! * [`reductions`]: exact alternative samplers of the damage `X` on the
//!   half-line, stars and complete graphs.
//! * [`couplings`]: monotone couplings producing dominated pairs `X' <= X`.
//! * [`bounds`]: closed-form phase-transition bounds and a good-site
//!   percolation simulator.
//! * [`harness`]: deterministic replica execution, escape-probability sweeps,
//!   curve crossing, and two-sample chi-squared comparison.

pub mod bounds;
pub mod couplings;
pub mod error;
pub mod graph;
pub mod harness;
pub mod process;
pub mod reductions;
pub mod rng;
mod union_find;

pub use error::{Error, Result};
pub use graph::{Geometry, Graph, InitSpec};
pub use process::{ProcessParams, RunLimits, RunOutcome, RunStatus};
pub use rng::RandomStream;
