//! Reference engine: after every event, draw a fresh exponential clock for
//! each active adjacency and red site and fire the earliest one.
//!
//! By memorylessness this has the same law as the aggregate-rate engine. It
//! keeps no incremental bookkeeping and rescans the whole configuration on
//! every step, so it is only meant for small graphs.

use std::cmp::Ordering;

use super::config::{initial_states, prepare_graph, EventKind, SiteState};
use super::engine::{stop_for, RunLimits, RunOutcome, RunStatus, Tally};
use super::params::ProcessParams;
use crate::error::Result;
use crate::graph::{Graph, InitSpec};
use crate::rng::{self, RandomStream};

#[derive(Clone, Copy)]
struct Clock {
    time: f64,
    source: usize,
    target: usize,
    kind: EventKind,
}

impl Clock {
    /// Earlier time first; exact ties go to the smallest (source, target).
    fn precedes(&self, other: &Clock) -> bool {
        match self.time.total_cmp(&other.time) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => (self.source, self.target) < (other.source, other.target),
        }
    }
}

pub fn per_clock_run(
    g: &Graph,
    p: &ProcessParams,
    spec: InitSpec,
    limits: &RunLimits,
    rng: &mut RandomStream,
) -> Result<RunOutcome> {
    let g = prepare_graph(g, spec);
    let mut states = initial_states(&g, spec)?;
    let marks = limits.marks(g.n())?;
    let seed = rng.seed();
    let mut tally = Tally {
        ever_red: states.iter().filter(|&&s| s == SiteState::Red).count() as u64,
        ..Tally::default()
    };
    if let Some(status) = (0..g.n())
        .filter(|&v| states[v] == SiteState::Red)
        .find_map(|v| stop_for(marks[v]))
    {
        return Ok(tally.outcome(status, None, seed));
    }
    let max_events = limits.max_events.unwrap_or(u64::MAX);
    let mut clock = 0.0;
    loop {
        if !states.contains(&SiteState::Red) {
            return Ok(tally.outcome(RunStatus::Fixated, Some(clock), seed));
        }
        if tally.events() >= max_events {
            return Ok(tally.outcome(RunStatus::StepLimitHit, None, seed));
        }
        let mut best: Option<Clock> = None;
        let mut offer = |c: Clock| {
            if best.as_ref().is_none_or(|b| c.precedes(b)) {
                best = Some(c);
            }
        };
        for u in 0..g.n() {
            match states[u] {
                SiteState::Red => {
                    if p.alpha() > 0.0 {
                        offer(Clock {
                            time: rng::exp(rng, p.alpha()),
                            source: u,
                            target: u,
                            kind: EventKind::Convert { site: u },
                        });
                    }
                    for &v in g.neighbors(u) {
                        if states[v] == SiteState::White {
                            offer(Clock {
                                time: rng::exp(rng, p.lambda()),
                                source: u,
                                target: v,
                                kind: EventKind::RedSpread { from: u, to: v },
                            });
                        }
                    }
                }
                s if s.is_blue() => {
                    for &v in g.neighbors(u) {
                        if states[v] == SiteState::Red {
                            offer(Clock {
                                time: rng::exp(rng, 1.0),
                                source: u,
                                target: v,
                                kind: EventKind::BlueSpread { from: u, to: v },
                            });
                        }
                    }
                }
                _ => {}
            }
        }
        let Some(next) = best else {
            return Ok(tally.outcome(RunStatus::Frozen, None, seed));
        };
        clock += next.time;
        match next.kind {
            EventKind::RedSpread { to, .. } => states[to] = SiteState::Red,
            EventKind::Convert { site } => states[site] = SiteState::BlueByConversion,
            EventKind::BlueSpread { to, .. } => states[to] = SiteState::BlueByPredation,
        }
        if let Some(status) = tally.record(&next.kind, &marks) {
            return Ok(tally.outcome(status, None, seed));
        }
    }
}
