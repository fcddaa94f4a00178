//! Monotone couplings: two parameter points driven by shared randomness so
//! that the damage under the dominated point never exceeds the damage under
//! the dominant one, realization by realization.
//!
//! Exponentials are coupled by inverse transform of a shared uniform
//! (`-ln(u) / rate`), except in the jump-chain step where independent
//! "thinning" clocks are raced and the chain that has no matching clock takes
//! a flat step.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::process::ProcessParams;
use crate::reductions::{BirthDeathTrace, BirthDeathUniforms, StarRace, StarUniforms};
use crate::rng::{exp, exp_from_uniform, open01, RandomStream};

/// One side of a coupled pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingPoint {
    pub lambda: f64,
    pub alpha: f64,
    /// Leaves of the star or vertices of the complete graph, when the
    /// coupling varies the graph size.
    pub size: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledPair {
    /// Damage under the dominant point.
    pub x_large: u64,
    /// Damage under the dominated point.
    pub x_small: u64,
    pub dominant: CouplingPoint,
    pub dominated: CouplingPoint,
    pub shared_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub n_pairs: usize,
    pub n_violations: usize,
    pub pass: bool,
}

/// Counts pairs with `x_small > x_large`.
pub fn verify_dominance(pairs: &[CoupledPair]) -> Result<DominanceReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n_violations = pairs.iter().filter(|p| p.x_small > p.x_large).count();
    Ok(DominanceReport {
        n_pairs: pairs.len(),
        n_violations,
        pass: n_violations == 0,
    })
}

fn check_order(
    (lambda, lambda_p): (f64, f64),
    (alpha, alpha_p): (f64, f64),
    (n, n_p): (usize, usize),
) -> Result<()> {
    if lambda_p > lambda {
        return Err(Error::BadOrder(format!("need lambda' <= lambda, got {lambda_p} > {lambda}")));
    }
    if alpha_p < alpha {
        return Err(Error::BadOrder(format!("need alpha' >= alpha, got {alpha_p} < {alpha}")));
    }
    if n_p > n {
        return Err(Error::BadOrder(format!("need n' <= n, got {n_p} > {n}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Trees

/// Parent/children structure of a tree rooted at vertex 0, in BFS order.
#[derive(Debug, Clone)]
struct RootedTree {
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl RootedTree {
    fn new(g: &Graph) -> Result<Self> {
        if !g.is_tree() {
            return Err(Error::NotATree);
        }
        let n = g.n();
        let mut parent = vec![usize::MAX; n];
        let mut children = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        order.push(0);
        parent[0] = 0;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &v in g.neighbors(u) {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    children[u].push(v);
                    order.push(v);
                }
            }
        }
        Ok(Self {
            parent,
            children,
            order,
        })
    }
}

/// Uniforms behind the passage times of a tree: for every non-root vertex
/// `y` the edge from its parent carries red-forward, blue-forward and
/// blue-back delays; every vertex carries a conversion delay.
#[derive(Debug, Clone)]
pub struct TreeUniforms {
    red_fwd: Vec<f64>,
    blue_fwd: Vec<f64>,
    blue_back: Vec<f64>,
    conversion: Vec<f64>,
}

impl TreeUniforms {
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut draw = || (0..n).map(|_| open01(rng)).collect::<Vec<_>>();
        Self {
            red_fwd: draw(),
            blue_fwd: draw(),
            blue_back: draw(),
            conversion: draw(),
        }
    }
}

/// Passage times indexed by the child end of each edge (root entries of the
/// edge vectors are unused).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreePassageTimes {
    pub red_fwd: Vec<f64>,
    pub blue_fwd: Vec<f64>,
    pub blue_back: Vec<f64>,
    pub conversion: Vec<f64>,
}

impl TreePassageTimes {
    pub fn from_uniforms(u: &TreeUniforms, p: &ProcessParams) -> Self {
        let map = |v: &[f64], rate: f64| v.iter().map(|&x| exp_from_uniform(x, rate)).collect();
        Self {
            red_fwd: map(&u.red_fwd, p.lambda()),
            blue_fwd: map(&u.blue_fwd, 1.0),
            blue_back: map(&u.blue_back, 1.0),
            conversion: map(&u.conversion, p.alpha()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeOutcome {
    /// Vertices ever red, in BFS order.
    pub ever_red: Vec<usize>,
    pub x: u64,
    /// Time each ever-red vertex first turns blue (`None` if never reached
    /// by red; `inf` if reached but never blued).
    pub survival: Vec<Option<f64>>,
    /// Ever-red vertices by generation.
    pub levels: Vec<Vec<usize>>,
    /// Children of each vertex that are ever red.
    pub children_sets: Vec<Vec<usize>>,
}

fn tree_outcome(tree: &RootedTree, t: &TreePassageTimes) -> TreeOutcome {
    let n = tree.parent.len();
    // red arrival along the geodesic, ignoring blue
    let mut red_arrival = vec![0.0; n];
    for &v in &tree.order[1..] {
        red_arrival[v] = red_arrival[tree.parent[v]] + t.red_fwd[v];
    }
    // infection time from the earliest conversion in the subtree
    let mut infection = t.conversion.clone();
    for &x in tree.order.iter().rev() {
        for &c in &tree.children[x] {
            let via_child = t.red_fwd[c] + infection[c] + t.blue_back[c];
            if via_child < infection[x] {
                infection[x] = via_child;
            }
        }
    }

    let mut survival = vec![None; n];
    let mut children_sets = vec![Vec::new(); n];
    let mut levels = vec![vec![0usize]];
    survival[0] = Some(infection[0]);
    loop {
        let mut next = Vec::new();
        for &x in levels.last().unwrap() {
            let s_x = survival[x].expect("reached vertex has a survival time");
            for &c in &tree.children[x] {
                if red_arrival[c] <= s_x {
                    survival[c] = Some((red_arrival[c] + infection[c]).min(s_x + t.blue_fwd[c]));
                    children_sets[x].push(c);
                    next.push(c);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    let ever_red: Vec<usize> = levels.iter().flatten().copied().collect();
    TreeOutcome {
        x: ever_red.len() as u64,
        ever_red,
        survival,
        levels,
        children_sets,
    }
}

fn tree_outcome_without_conversion(tree: &RootedTree) -> TreeOutcome {
    let n = tree.parent.len();
    let mut depth = vec![0usize; n];
    let mut levels: Vec<Vec<usize>> = vec![Vec::new()];
    for &v in &tree.order {
        if v != 0 {
            depth[v] = depth[tree.parent[v]] + 1;
        }
        if levels.len() <= depth[v] {
            levels.push(Vec::new());
        }
        levels[depth[v]].push(v);
    }
    TreeOutcome {
        ever_red: tree.order.clone(),
        x: n as u64,
        survival: vec![Some(f64::INFINITY); n],
        levels,
        children_sets: tree.children.clone(),
    }
}

/// Samples the set of ever-red vertices of a finite tree from passage times.
pub fn tree_passage_sample<R: Rng + ?Sized>(
    tree: &Graph,
    p: &ProcessParams,
    rng: &mut R,
) -> Result<TreeOutcome> {
    let rooted = RootedTree::new(tree)?;
    if p.alpha() == 0.0 {
        return Ok(tree_outcome_without_conversion(&rooted));
    }
    let u = TreeUniforms::sample(tree.n(), rng);
    Ok(tree_outcome(&rooted, &TreePassageTimes::from_uniforms(&u, p)))
}

/// Both outcomes of the conversion-rate coupling on a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeCoupling {
    pub at_alpha: TreeOutcome,
    pub at_alpha_prime: TreeOutcome,
    pub pair: CoupledPair,
}

/// Couples the tree construction at `alpha` and `alpha_prime >= alpha`:
/// all red and blue delays are shared, conversion delays share a uniform.
pub fn tree_alpha_coupling(
    tree: &Graph,
    lambda: f64,
    alpha: f64,
    alpha_prime: f64,
    rng: &mut RandomStream,
) -> Result<TreeCoupling> {
    check_order((lambda, lambda), (alpha, alpha_prime), (0, 0))?;
    let p = ProcessParams::new(lambda, alpha)?;
    let p_prime = ProcessParams::new(lambda, alpha_prime)?;
    let rooted = RootedTree::new(tree)?;
    let u = TreeUniforms::sample(tree.n(), rng);
    let outcome = |q: &ProcessParams| {
        if q.alpha() == 0.0 {
            tree_outcome_without_conversion(&rooted)
        } else {
            tree_outcome(&rooted, &TreePassageTimes::from_uniforms(&u, q))
        }
    };
    let at_alpha = outcome(&p);
    let at_alpha_prime = outcome(&p_prime);
    let pair = CoupledPair {
        x_large: at_alpha.x,
        x_small: at_alpha_prime.x,
        dominant: CouplingPoint { lambda, alpha, size: None },
        dominated: CouplingPoint { lambda, alpha: alpha_prime, size: None },
        shared_seed: rng.seed(),
    };
    Ok(TreeCoupling {
        at_alpha,
        at_alpha_prime,
        pair,
    })
}

// ---------------------------------------------------------------------------
// Half-line

/// Lazily drawn uniforms for sites `1, 2, ...` of the half-line: the red
/// delay on edge `y -> y+1`, the blue delays on `y -> y+1` and `y+1 -> y`,
/// and the conversion delay of `y`.
struct HalfLineUniforms<'r> {
    rng: &'r mut RandomStream,
    sites: Vec<[f64; 4]>,
}

impl HalfLineUniforms<'_> {
    fn site(&mut self, y: usize) -> [f64; 4] {
        while self.sites.len() < y {
            let draw = [open01(self.rng), open01(self.rng), open01(self.rng), open01(self.rng)];
            self.sites.push(draw);
        }
        self.sites[y - 1]
    }

    fn red(&mut self, y: usize, lambda: f64) -> f64 {
        exp_from_uniform(self.site(y)[0], lambda)
    }

    fn blue_fwd(&mut self, y: usize) -> f64 {
        exp_from_uniform(self.site(y)[1], 1.0)
    }

    fn blue_back(&mut self, y: usize) -> f64 {
        exp_from_uniform(self.site(y)[2], 1.0)
    }

    fn conversion(&mut self, y: usize, alpha: f64) -> f64 {
        exp_from_uniform(self.site(y)[3], alpha)
    }
}

/// Red arrival times `R_1 = 0, R_{x+1} = R_x + red(x)`, extended on demand.
struct Arrivals {
    lambda: f64,
    times: Vec<f64>,
}

impl Arrivals {
    fn new(lambda: f64) -> Self {
        Self { lambda, times: vec![0.0] }
    }

    fn at(&mut self, x: usize, u: &mut HalfLineUniforms<'_>) -> f64 {
        while self.times.len() < x {
            let y = self.times.len();
            let next = self.times[y - 1] + u.red(y, self.lambda);
            self.times.push(next);
        }
        self.times[x - 1]
    }
}

/// Starting data of the two coupled jump chains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstConversionPair {
    /// Rightmost red and first converted site at the first conversion of
    /// the dominant process.
    pub n: u64,
    pub m: u64,
    /// Rightmost red and rightmost blue of the dominated process at the time
    /// site `m` would convert in it.
    pub n_prime: u64,
    pub m_prime: u64,
}

#[allow(clippy::needless_range_loop)] // y is a site index shared by several arrays
fn coupled_first_conversion(
    p: &ProcessParams,
    p_prime: &ProcessParams,
    u: &mut HalfLineUniforms<'_>,
) -> FirstConversionPair {
    // dominant process: first conversion from passage times
    let mut arr = Arrivals::new(p.lambda());
    let mut gamma = f64::INFINITY;
    let mut m = 0;
    let mut x = 1;
    loop {
        let r = arr.at(x, u);
        if r >= gamma {
            break;
        }
        let t = r + u.conversion(x, p.alpha());
        if t < gamma {
            gamma = t;
            m = x;
        }
        x += 1;
    }
    let mut n = m;
    while arr.at(n + 1, u) <= gamma {
        n += 1;
    }

    // dominated process, observed at the time site m would convert
    let mut arr_p = Arrivals::new(p_prime.lambda());
    let gamma_p = arr_p.at(m, u) + u.conversion(m, p_prime.alpha());
    let mut k = m;
    while arr_p.at(k + 1, u) <= gamma_p {
        k += 1;
    }
    // Sites beyond k are reached after gamma_p, so any blue they could send
    // back also lands after gamma_p; truncating the subtree at k is exact for
    // the state at gamma_p.
    let mut infection = vec![0.0; k + 1];
    infection[k] = u.conversion(k, p_prime.alpha());
    for y in (1..k).rev() {
        let via_next = u.red(y, p_prime.lambda()) + infection[y + 1] + u.blue_back(y);
        infection[y] = u.conversion(y, p_prime.alpha()).min(via_next);
    }
    let mut survival = infection[1];
    let mut reached = 1;
    let mut m_prime = if survival <= gamma_p { 1 } else { 0 };
    for y in 2..=k {
        let r = arr_p.at(y, u);
        if r > survival {
            break;
        }
        survival = (r + infection[y]).min(survival + u.blue_fwd(y - 1));
        reached = y;
        if survival <= gamma_p {
            m_prime = y;
        }
    }
    debug_assert!(m_prime >= 1, "blue is present at gamma'");
    FirstConversionPair {
        n: n as u64,
        m: m as u64,
        n_prime: reached as u64,
        m_prime: m_prime as u64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpChainCoupling {
    pub start: FirstConversionPair,
    /// `(Y_t, Y'_t)` from the start until both chains are absorbed.
    pub trace: Vec<(u64, u64)>,
    pub upsteps: u64,
    pub upsteps_prime: u64,
    pub pair: CoupledPair,
}

/// Runs two jump chains from `y >= y'` with the thinning-clock coupling.
/// Returns the trace and both upstep counts.
fn coupled_chains<R: Rng + ?Sized>(
    start: (u64, u64),
    p: &ProcessParams,
    p_prime: &ProcessParams,
    rng: &mut R,
) -> (Vec<(u64, u64)>, u64, u64) {
    let (mut y, mut yp) = start;
    debug_assert!(yp <= y);
    let mut trace = vec![(y, yp)];
    let (mut ups, mut ups_p) = (0, 0);
    let red_extra = p.lambda() - p_prime.lambda();
    let conv_extra = p_prime.alpha() - p.alpha();

    #[derive(Clone, Copy)]
    enum Clock {
        Blue,
        SharedRed,
        ExtraRed,
        SharedConv(u64),
        ExtraConv(u64),
    }
    while y > 0 {
        let mut best = (exp(rng, 1.0), Clock::Blue);
        let mut offer = |t: f64, c: Clock| {
            if t < best.0 {
                best = (t, c);
            }
        };
        offer(exp(rng, p_prime.lambda()), Clock::SharedRed);
        offer(exp(rng, red_extra), Clock::ExtraRed);
        for i in 1..=y {
            offer(exp(rng, p.alpha()), Clock::SharedConv(i));
        }
        for i in 1..=yp {
            offer(exp(rng, conv_extra), Clock::ExtraConv(i));
        }
        // A chain already at 0 is absorbed and ignores every clock.
        let alive_p = yp > 0;
        match best.1 {
            Clock::Blue => {
                y -= 1;
                if alive_p {
                    yp -= 1;
                }
            }
            Clock::SharedRed => {
                y += 1;
                ups += 1;
                if alive_p {
                    yp += 1;
                    ups_p += 1;
                }
            }
            Clock::ExtraRed => {
                y += 1;
                ups += 1;
            }
            Clock::SharedConv(i) => {
                y = i - 1;
                if i <= yp {
                    yp = i - 1;
                }
            }
            Clock::ExtraConv(i) => yp = i - 1,
        }
        trace.push((y, yp));
    }
    (trace, ups, ups_p)
}

/// Couples the half-line process at `(lambda, alpha)` with the one at
/// `(lambda_prime, alpha_prime)`, `lambda_prime <= lambda`,
/// `alpha_prime >= alpha`, so that `X' <= X`.
pub fn jumpchain_coupling(
    lambda: f64,
    lambda_prime: f64,
    alpha: f64,
    alpha_prime: f64,
    rng: &mut RandomStream,
) -> Result<JumpChainCoupling> {
    check_order((lambda, lambda_prime), (alpha, alpha_prime), (0, 0))?;
    let p = ProcessParams::new(lambda, alpha)?;
    let p_prime = ProcessParams::new(lambda_prime, alpha_prime)?;
    if alpha == 0.0 {
        return Err(Error::AlphaZero);
    }
    let shared_seed = rng.seed();
    let start = {
        let mut u = HalfLineUniforms { rng, sites: Vec::new() };
        coupled_first_conversion(&p, &p_prime, &mut u)
    };
    let (trace, upsteps, upsteps_prime) = coupled_chains(
        (start.n - start.m, start.n_prime - start.m_prime),
        &p,
        &p_prime,
        rng,
    );
    let pair = CoupledPair {
        x_large: start.n + upsteps,
        x_small: start.n_prime + upsteps_prime,
        dominant: CouplingPoint { lambda, alpha, size: None },
        dominated: CouplingPoint { lambda: lambda_prime, alpha: alpha_prime, size: None },
        shared_seed,
    };
    Ok(JumpChainCoupling {
        start,
        trace,
        upsteps,
        upsteps_prime,
        pair,
    })
}

// ---------------------------------------------------------------------------
// Stars and complete graphs

#[derive(Debug, Clone, PartialEq)]
pub struct StarCoupling {
    pub race: StarRace,
    pub race_prime: StarRace,
    pub pair: CoupledPair,
}

/// Couples the star races on `S_n` at `(lambda, alpha)` and `S_n'` at
/// `(lambda', alpha')` increment by increment.
pub fn star_coupling(
    n: usize,
    n_prime: usize,
    lambda: f64,
    lambda_prime: f64,
    alpha: f64,
    alpha_prime: f64,
    rng: &mut RandomStream,
) -> Result<StarCoupling> {
    check_order((lambda, lambda_prime), (alpha, alpha_prime), (n, n_prime))?;
    let p = ProcessParams::new(lambda, alpha)?;
    let p_prime = ProcessParams::new(lambda_prime, alpha_prime)?;
    let u = StarUniforms::sample(n, rng);
    let race = StarRace::from_uniforms(n, &p, &u);
    let race_prime = StarRace::from_uniforms(n_prime, &p_prime, &u);
    let pair = CoupledPair {
        x_large: race.damage(),
        x_small: race_prime.damage(),
        dominant: CouplingPoint { lambda, alpha, size: Some(n) },
        dominated: CouplingPoint { lambda: lambda_prime, alpha: alpha_prime, size: Some(n_prime) },
        shared_seed: rng.seed(),
    };
    Ok(StarCoupling {
        race,
        race_prime,
        pair,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompleteCoupling {
    pub trace: BirthDeathTrace,
    pub trace_prime: BirthDeathTrace,
    pub pair: CoupledPair,
}

/// Couples the birth-death reductions on `K_n` and `K_n'` by sharing the
/// uniforms behind every death and birth increment.
pub fn complete_coupling(
    n: usize,
    n_prime: usize,
    lambda: f64,
    lambda_prime: f64,
    alpha: f64,
    alpha_prime: f64,
    rng: &mut RandomStream,
) -> Result<CompleteCoupling> {
    check_order((lambda, lambda_prime), (alpha, alpha_prime), (n, n_prime))?;
    if n_prime == 0 {
        return Err(Error::ZeroVertices);
    }
    let p = ProcessParams::new(lambda, alpha)?;
    let p_prime = ProcessParams::new(lambda_prime, alpha_prime)?;
    let u = BirthDeathUniforms::sample(n, rng);
    let trace = BirthDeathTrace::from_uniforms(n, &p, &u)?;
    let trace_prime = BirthDeathTrace::from_uniforms(n_prime, &p_prime, &u)?;
    let pair = CoupledPair {
        x_large: trace.damage(),
        x_small: trace_prime.damage(),
        dominant: CouplingPoint { lambda, alpha, size: Some(n) },
        dominated: CouplingPoint { lambda: lambda_prime, alpha: alpha_prime, size: Some(n_prime) },
        shared_seed: rng.seed(),
    };
    Ok(CompleteCoupling {
        trace,
        trace_prime,
        pair,
    })
}
