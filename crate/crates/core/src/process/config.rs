use std::borrow::Cow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::params::ProcessParams;
use crate::error::{Error, Result};
use crate::graph::{Graph, InitSpec};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SiteState {
    White,
    Red,
    BlueByConversion,
    BlueByPredation,
}

impl SiteState {
    pub fn is_blue(self) -> bool {
        matches!(self, SiteState::BlueByConversion | SiteState::BlueByPredation)
    }

    /// Snapshot code: 0 white, 1 red, 2 blue by predation, 3 blue by conversion.
    pub fn code(self) -> u8 {
        match self {
            SiteState::White => 0,
            SiteState::Red => 1,
            SiteState::BlueByPredation => 2,
            SiteState::BlueByConversion => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    RedSpread { from: usize, to: usize },
    Convert { site: usize },
    BlueSpread { from: usize, to: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub kind: EventKind,
    pub time: f64,
}

const ABSENT: u32 = u32::MAX;

/// Set of small integer keys with O(1) insert, remove and uniform sampling.
#[derive(Debug, Clone)]
struct IndexedSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

impl IndexedSet {
    fn new(universe: usize) -> Self {
        assert!(universe < ABSENT as usize, "key universe too large");
        Self {
            items: Vec::new(),
            pos: vec![ABSENT; universe],
        }
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn insert(&mut self, key: usize) {
        debug_assert_eq!(self.pos[key], ABSENT);
        self.pos[key] = self.items.len() as u32;
        self.items.push(key as u32);
    }

    fn remove(&mut self, key: usize) {
        let at = self.pos[key];
        debug_assert_ne!(at, ABSENT);
        let last = self.items.pop().expect("set is nonempty");
        if last as usize != key {
            self.items[at as usize] = last;
            self.pos[last as usize] = at;
        }
        self.pos[key] = ABSENT;
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.items[rng.random_range(0..self.items.len())] as usize
    }
}

/// Per-vertex states plus the eligible-event sets of the aggregate-rate
/// engine: arcs `(red, white)`, arcs `(blue, red)`, and red sites.
#[derive(Debug, Clone)]
pub struct Configuration {
    states: Vec<SiteState>,
    rw: IndexedSet,
    br: IndexedSet,
    red: IndexedSet,
    clock: f64,
}

/// Initial site states for `spec` on a graph already prepared for it (see
/// [`prepare_graph`]).
pub fn initial_states(g: &Graph, spec: InitSpec) -> Result<Vec<SiteState>> {
    let mut states = vec![SiteState::White; g.n()];
    match spec {
        InitSpec::StandardRoot => states[g.root()] = SiteState::Red,
        InitSpec::Band => {
            let rows = g.rows().ok_or(Error::BandOnNonTorus)?;
            if rows.height < 2 {
                return Err(Error::BandOnNonTorus);
            }
            // Initial blue sites carry the predation code: they are chasers.
            for v in rows.row(0) {
                states[v] = SiteState::BlueByPredation;
            }
            for v in rows.row(1) {
                states[v] = SiteState::Red;
            }
        }
        InitSpec::ClassicalWithBlueNeighbor => {
            let extra = g.n() - 1;
            states[g.root()] = SiteState::Red;
            states[extra] = SiteState::BlueByPredation;
        }
    }
    Ok(states)
}

/// The graph a run actually uses: `g` itself, or `g` plus a pendant blue
/// vertex for [`InitSpec::ClassicalWithBlueNeighbor`].
pub fn prepare_graph(g: &Graph, spec: InitSpec) -> Cow<'_, Graph> {
    match spec {
        InitSpec::ClassicalWithBlueNeighbor => Cow::Owned(g.with_pendant()),
        _ => Cow::Borrowed(g),
    }
}

impl Configuration {
    /// Builds the initial configuration on an already prepared graph.
    pub fn new(g: &Graph, spec: InitSpec) -> Result<Self> {
        let states = initial_states(g, spec)?;
        Ok(Self::from_states(g, states))
    }

    /// Builds a configuration from arbitrary states, filling the event sets
    /// by a full scan.
    pub fn from_states(g: &Graph, states: Vec<SiteState>) -> Self {
        assert_eq!(states.len(), g.n());
        let mut rw = IndexedSet::new(g.arc_count());
        let mut br = IndexedSet::new(g.arc_count());
        let mut red = IndexedSet::new(g.n());
        for u in 0..g.n() {
            match states[u] {
                SiteState::Red => {
                    red.insert(u);
                    for e in g.arcs(u) {
                        if states[g.head(e)] == SiteState::White {
                            rw.insert(e);
                        }
                    }
                }
                s if s.is_blue() => {
                    for e in g.arcs(u) {
                        if states[g.head(e)] == SiteState::Red {
                            br.insert(e);
                        }
                    }
                }
                _ => {}
            }
        }
        Self {
            states,
            rw,
            br,
            red,
            clock: 0.0,
        }
    }

    pub fn states(&self) -> &[SiteState] {
        &self.states
    }

    pub fn state(&self, v: usize) -> SiteState {
        self.states[v]
    }

    /// Ordered adjacent (red, white) pairs.
    pub fn rw_count(&self) -> usize {
        self.rw.len()
    }

    /// Ordered adjacent (blue, red) pairs.
    pub fn br_count(&self) -> usize {
        self.br.len()
    }

    pub fn red_count(&self) -> usize {
        self.red.len()
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn total_rate(&self, p: &ProcessParams) -> f64 {
        p.lambda() * self.rw.len() as f64 + self.br.len() as f64 + p.alpha() * self.red.len() as f64
    }

    /// Advances by one event: exponential holding time at the total rate,
    /// event class proportional to its aggregate rate, then a uniform member
    /// of that class.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        g: &Graph,
        p: &ProcessParams,
        rng: &mut R,
    ) -> Result<EventRecord> {
        self.step_before(g, p, rng, f64::INFINITY)
            .map(|ev| ev.expect("finite holding time"))
    }

    /// Like [`step`](Self::step), but if the next event would come after
    /// `horizon` the clock is set to `horizon` and nothing fires. Holding
    /// times are memoryless, so the result is the exact state at `horizon`.
    pub fn step_before<R: Rng + ?Sized>(
        &mut self,
        g: &Graph,
        p: &ProcessParams,
        rng: &mut R,
        horizon: f64,
    ) -> Result<Option<EventRecord>> {
        let r_rw = p.lambda() * self.rw.len() as f64;
        let r_br = self.br.len() as f64;
        let r_conv = p.alpha() * self.red.len() as f64;
        let total = r_rw + r_br + r_conv;
        if total <= 0.0 {
            return Err(Error::NoActiveEvents);
        }
        let next = self.clock + rng::exp(rng, total);
        if next > horizon {
            self.clock = horizon;
            return Ok(None);
        }
        self.clock = next;
        let x = rng.random::<f64>() * total;
        let kind = if r_rw > 0.0 && (x < r_rw || (r_br == 0.0 && r_conv == 0.0)) {
            let arc = self.rw.sample(rng);
            let (from, to) = (g.tail(arc), g.head(arc));
            self.make_red(g, to);
            EventKind::RedSpread { from, to }
        } else if r_br > 0.0 && (x < r_rw + r_br || r_conv == 0.0) {
            let arc = self.br.sample(rng);
            let (from, to) = (g.tail(arc), g.head(arc));
            self.make_blue(g, to, SiteState::BlueByPredation);
            EventKind::BlueSpread { from, to }
        } else {
            let site = self.red.sample(rng);
            self.make_blue(g, site, SiteState::BlueByConversion);
            EventKind::Convert { site }
        };
        Ok(Some(EventRecord {
            kind,
            time: self.clock,
        }))
    }

    fn make_red(&mut self, g: &Graph, v: usize) {
        debug_assert_eq!(self.states[v], SiteState::White);
        self.states[v] = SiteState::Red;
        self.red.insert(v);
        for e in g.arcs(v) {
            let x = g.head(e);
            match self.states[x] {
                SiteState::Red => self.rw.remove(g.reverse_arc(e)),
                SiteState::White => self.rw.insert(e),
                _ => self.br.insert(g.reverse_arc(e)),
            }
        }
    }

    fn make_blue(&mut self, g: &Graph, u: usize, cause: SiteState) {
        debug_assert_eq!(self.states[u], SiteState::Red);
        self.states[u] = cause;
        self.red.remove(u);
        for e in g.arcs(u) {
            let x = g.head(e);
            match self.states[x] {
                SiteState::White => self.rw.remove(e),
                SiteState::Red => self.br.insert(e),
                _ => self.br.remove(g.reverse_arc(e)),
            }
        }
    }
}

/// Recomputes `(rw_count, br_count, red_count)` from the states alone.
pub fn recount(g: &Graph, states: &[SiteState]) -> (usize, usize, usize) {
    let mut rw = 0;
    let mut br = 0;
    let mut red = 0;
    for (u, &s) in states.iter().enumerate() {
        if s == SiteState::Red {
            red += 1;
        }
        for &v in g.neighbors(u) {
            match (s, states[v]) {
                (SiteState::Red, SiteState::White) => rw += 1,
                (a, SiteState::Red) if a.is_blue() => br += 1,
                _ => {}
            }
        }
    }
    (rw, br, red)
}
