use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use super::config::{prepare_graph, Configuration, EventKind, EventRecord, SiteState};
use super::params::ProcessParams;
use crate::error::{Error, Result};
use crate::graph::{Graph, InitSpec};
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RunStatus {
    /// No red sites remain.
    Fixated,
    /// A target vertex turned red.
    Escaped,
    /// A boundary vertex of a truncated graph turned red; the damage count
    /// is censored.
    TruncationHit,
    /// The event budget ran out.
    StepLimitHit,
    /// Red sites remain but no event can ever fire (only possible with
    /// `alpha = 0` once red has no white or blue neighbours).
    Frozen,
}

/// Stop conditions for a run. Vertex ids refer to the graph the run uses.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunLimits {
    pub max_events: Option<u64>,
    pub boundary: Option<Vec<usize>>,
    pub target: Option<Vec<usize>>,
}

impl RunLimits {
    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn with_max_events(mut self, max_events: u64) -> Self {
        self.max_events = Some(max_events);
        self
    }

    pub fn with_boundary(mut self, boundary: Vec<usize>) -> Self {
        self.boundary = Some(boundary);
        self
    }

    pub fn with_target(mut self, target: Vec<usize>) -> Self {
        self.target = Some(target);
        self
    }

    /// Per-vertex flags: bit 0 boundary, bit 1 target.
    pub(crate) fn marks(&self, n: usize) -> Result<Vec<u8>> {
        let mut marks = vec![0u8; n];
        for (set, bit) in [(&self.boundary, BOUNDARY), (&self.target, TARGET)] {
            for &v in set.iter().flatten() {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                marks[v] |= bit;
            }
        }
        Ok(marks)
    }
}

pub(crate) const BOUNDARY: u8 = 1;
pub(crate) const TARGET: u8 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    /// Number of sites ever red. Equals the number of sites blued during the
    /// run when the run fixated.
    pub damage: u64,
    pub status: RunStatus,
    pub fixation_time: Option<f64>,
    pub n_conversions: u64,
    pub n_predations: u64,
    pub n_red_spreads: u64,
    pub seed: u64,
}

/// Running tallies shared by both engines.
#[derive(Debug, Default)]
pub(crate) struct Tally {
    pub ever_red: u64,
    pub conversions: u64,
    pub predations: u64,
    pub red_spreads: u64,
}

impl Tally {
    pub fn events(&self) -> u64 {
        self.conversions + self.predations + self.red_spreads
    }

    /// Records an event; returns the stop status it triggers, if any.
    pub fn record(&mut self, kind: &EventKind, marks: &[u8]) -> Option<RunStatus> {
        match *kind {
            EventKind::RedSpread { to, .. } => {
                self.red_spreads += 1;
                self.ever_red += 1;
                stop_for(marks[to])
            }
            EventKind::Convert { .. } => {
                self.conversions += 1;
                None
            }
            EventKind::BlueSpread { .. } => {
                self.predations += 1;
                None
            }
        }
    }

    pub fn outcome(&self, status: RunStatus, fixation_time: Option<f64>, seed: u64) -> RunOutcome {
        RunOutcome {
            damage: self.ever_red,
            status,
            fixation_time,
            n_conversions: self.conversions,
            n_predations: self.predations,
            n_red_spreads: self.red_spreads,
            seed,
        }
    }
}

pub(crate) fn stop_for(mark: u8) -> Option<RunStatus> {
    if mark & TARGET != 0 {
        Some(RunStatus::Escaped)
    } else if mark & BOUNDARY != 0 {
        Some(RunStatus::TruncationHit)
    } else {
        None
    }
}

/// A configuration bound to the graph it lives on.
#[derive(Debug, Clone)]
pub struct Simulation<'g> {
    graph: Cow<'g, Graph>,
    config: Configuration,
}

impl<'g> Simulation<'g> {
    pub fn new(g: &'g Graph, spec: InitSpec) -> Result<Self> {
        let graph = prepare_graph(g, spec);
        let config = Configuration::new(&graph, spec)?;
        Ok(Self { graph, config })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn step(&mut self, p: &ProcessParams, rng: &mut RandomStream) -> Result<EventRecord> {
        self.config.step(&self.graph, p, rng)
    }

    /// Steps unless the next event would come after `horizon`; see
    /// [`Configuration::step_before`].
    pub fn step_before(
        &mut self,
        p: &ProcessParams,
        rng: &mut RandomStream,
        horizon: f64,
    ) -> Result<Option<EventRecord>> {
        self.config.step_before(&self.graph, p, rng, horizon)
    }

    /// Steps until fixation or until one of `limits` stops the run.
    pub fn run(
        &mut self,
        p: &ProcessParams,
        limits: &RunLimits,
        rng: &mut RandomStream,
    ) -> Result<RunOutcome> {
        let marks = limits.marks(self.graph.n())?;
        let mut tally = Tally {
            ever_red: self.config.red_count() as u64,
            ..Tally::default()
        };
        let seed = rng.seed();
        if let Some(status) = (0..self.graph.n())
            .filter(|&v| self.config.state(v) == SiteState::Red)
            .find_map(|v| stop_for(marks[v]))
        {
            return Ok(tally.outcome(status, None, seed));
        }
        let max_events = limits.max_events.unwrap_or(u64::MAX);
        loop {
            if self.config.red_count() == 0 {
                return Ok(tally.outcome(RunStatus::Fixated, Some(self.config.clock()), seed));
            }
            if tally.events() >= max_events {
                return Ok(tally.outcome(RunStatus::StepLimitHit, None, seed));
            }
            let ev = match self.config.step(&self.graph, p, rng) {
                Ok(ev) => ev,
                Err(Error::NoActiveEvents) => {
                    return Ok(tally.outcome(RunStatus::Frozen, None, seed));
                }
                Err(e) => return Err(e),
            };
            if let Some(status) = tally.record(&ev.kind, &marks) {
                return Ok(tally.outcome(status, None, seed));
            }
        }
    }
}

/// Runs the aggregate-rate engine from `spec` until fixation or a limit.
pub fn run_to_fixation(
    g: &Graph,
    p: &ProcessParams,
    spec: InitSpec,
    limits: &RunLimits,
    rng: &mut RandomStream,
) -> Result<RunOutcome> {
    Simulation::new(g, spec)?.run(p, limits, rng)
}

/// Band start on a lattice with rows; escapes when any vertex of the last
/// row turns red.
pub fn run_band_experiment(
    lattice: &Graph,
    p: &ProcessParams,
    rng: &mut RandomStream,
) -> Result<RunOutcome> {
    let rows = lattice.rows().ok_or(Error::BandOnNonTorus)?;
    let limits = RunLimits::unbounded().with_target(rows.row(rows.height - 1).collect());
    run_to_fixation(lattice, p, InitSpec::Band, &limits, rng)
}
