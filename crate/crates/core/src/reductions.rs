//! Exact alternative samplers of the damage `X`.
//!
//! None of these touch the event engine in [`crate::process`]; they are
//! separate constructions with the same law, which is what makes comparing
//! them against direct simulation meaningful.
//!
//! * Half-line `{1, 2, ...}` rooted at 1: run the red front until the first
//!   conversion, then a discrete jump chain on the number of red sites in
//!   front of the rightmost blue. `X = N + U(N - M)`.
//! * Star with `n` leaves: a pure death process for leaves turning red
//!   raced against the earliest time blue reaches the root. `X = I + 1`.
//! * Complete graph `K_n`: a pure death process for white sites against a
//!   birth process with immigration for blue sites. `X = n - W_tau`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::ProcessParams;
use crate::rng::{exp, exp_from_uniform, open01};

/// A run of the jump chain from `y0` until it first hits 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpChainTrace {
    pub y0: u64,
    /// Heights after each step; the last entry is 0 unless `y0 == 0`, in
    /// which case the trace is empty.
    pub heights: Vec<u64>,
    pub upsteps: u64,
}

impl JumpChainTrace {
    /// Number of steps until absorption.
    pub fn kappa(&self) -> usize {
        self.heights.len()
    }
}

/// Transition law of the jump chain from height `k >= 1`, as
/// `(next height, probability)` pairs ordered `k+1, k-1, k-2, ..., 0`.
pub fn jump_probabilities(k: u64, p: &ProcessParams) -> Result<Vec<(u64, f64)>> {
    if k == 0 {
        return Err(Error::ZeroHeight);
    }
    let (lambda, alpha) = (p.lambda(), p.alpha());
    let denom = 1.0 + lambda + alpha * k as f64;
    let mut out = Vec::with_capacity(k as usize + 1);
    out.push((k + 1, lambda / denom));
    out.push((k - 1, (1.0 + alpha) / denom));
    out.extend((0..k.saturating_sub(1)).rev().map(|j| (j, alpha / denom)));
    Ok(out)
}

/// One step of the jump chain from height `k >= 1`.
fn jump_step<R: Rng + ?Sized>(k: u64, p: &ProcessParams, rng: &mut R) -> u64 {
    let (lambda, alpha) = (p.lambda(), p.alpha());
    let total = 1.0 + lambda + alpha * k as f64;
    let x = rng.random::<f64>() * total;
    if x < lambda {
        k + 1
    } else if x < lambda + 1.0 + alpha || k == 1 {
        k - 1
    } else {
        // conversion of one of the reds at distance 1..k-1 from the front
        ((x - lambda - 1.0 - alpha) / alpha).floor().min((k - 2) as f64) as u64
    }
}

pub fn run_jump_chain<R: Rng + ?Sized>(y0: u64, p: &ProcessParams, rng: &mut R) -> JumpChainTrace {
    let mut heights = Vec::new();
    let mut upsteps = 0;
    let mut y = y0;
    while y > 0 {
        let next = jump_step(y, p, rng);
        if next > y {
            upsteps += 1;
        }
        y = next;
        heights.push(y);
    }
    JumpChainTrace { y0, heights, upsteps }
}

/// Upstep count of the jump chain from `y0`, without storing the trace.
pub fn jump_chain_upsteps<R: Rng + ?Sized>(y0: u64, p: &ProcessParams, rng: &mut R) -> u64 {
    let mut upsteps = 0;
    let mut y = y0;
    while y > 0 {
        let next = jump_step(y, p, rng);
        upsteps += (next > y) as u64;
        y = next;
    }
    upsteps
}

/// State of the half-line process at the first conversion time `gamma`:
/// sites `1..=n` have been reached by red and site `m` has just converted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstConversion {
    pub n: u64,
    pub m: u64,
    pub gamma: f64,
}

/// Grows the red front on the half-line with a conversion clock on every
/// red site until the first conversion.
pub fn sample_first_conversion<R: Rng + ?Sized>(
    p: &ProcessParams,
    rng: &mut R,
) -> Result<FirstConversion> {
    if p.alpha() == 0.0 {
        return Err(Error::AlphaZero);
    }
    let mut front: u64 = 1;
    let mut gamma = 0.0;
    loop {
        let conv = p.alpha() * front as f64;
        let total = p.lambda() + conv;
        gamma += exp(rng, total);
        if rng.random::<f64>() * total < p.lambda() {
            front += 1;
        } else {
            let m = rng.random_range(1..=front);
            return Ok(FirstConversion { n: front, m, gamma });
        }
    }
}

/// `X` on the half-line via the first conversion and the jump chain.
pub fn sample_x_via_jump_chain<R: Rng + ?Sized>(p: &ProcessParams, rng: &mut R) -> Result<u64> {
    let fc = sample_first_conversion(p, rng)?;
    Ok(fc.n + jump_chain_upsteps(fc.n - fc.m, p, rng))
}

/// Uniform draws behind one star race, kept so couplings can reuse them.
#[derive(Debug, Clone, PartialEq)]
pub struct StarUniforms {
    /// Drives `sigma(i) - sigma(i-1)`, `i = 1..=n`.
    pub sigma: Vec<f64>,
    /// Drives the root's own conversion delay.
    pub root_conversion: f64,
    /// Drive leaf `i`'s conversion delay, `i = 1..=n`.
    pub leaf_conversion: Vec<f64>,
    /// Drive the blue passage from leaf `i` back to the root.
    pub leaf_predation: Vec<f64>,
}

impl StarUniforms {
    pub fn sample<R: Rng + ?Sized>(leaves: usize, rng: &mut R) -> Self {
        let sigma = (0..leaves).map(|_| open01(rng)).collect();
        let root_conversion = open01(rng);
        let leaf_conversion = (0..leaves).map(|_| open01(rng)).collect();
        let leaf_predation = (0..leaves).map(|_| open01(rng)).collect();
        Self {
            sigma,
            root_conversion,
            leaf_conversion,
            leaf_predation,
        }
    }
}

/// Death-process race on the star `S_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarRace {
    /// `sigma(0..=n+1)` with `sigma(0) = 0` and `sigma(n+1) = inf`.
    pub sigma: Vec<f64>,
    /// `T_0` (root conversion) and `T_i` (leaf conversion plus predation).
    pub delays: Vec<f64>,
    /// Running minima `M_i = min_{k <= i} sigma(k) + T_k`.
    pub minima: Vec<f64>,
    /// Number of leaves ever red.
    pub stop_index: usize,
}

impl StarRace {
    /// Builds the race for `leaves` leaves from the first `leaves` entries
    /// of `u`.
    pub fn from_uniforms(leaves: usize, p: &ProcessParams, u: &StarUniforms) -> Self {
        assert!(u.sigma.len() >= leaves);
        let mut sigma = Vec::with_capacity(leaves + 2);
        sigma.push(0.0);
        for i in 1..=leaves {
            let rate = (leaves - i + 1) as f64 * p.lambda();
            sigma.push(sigma[i - 1] + exp_from_uniform(u.sigma[i - 1], rate));
        }
        sigma.push(f64::INFINITY);

        let mut delays = Vec::with_capacity(leaves + 1);
        delays.push(exp_from_uniform(u.root_conversion, p.alpha()));
        for i in 0..leaves {
            delays.push(
                exp_from_uniform(u.leaf_conversion[i], p.alpha())
                    + exp_from_uniform(u.leaf_predation[i], 1.0),
            );
        }

        let mut minima = Vec::with_capacity(leaves + 1);
        let mut running = f64::INFINITY;
        for k in 0..=leaves {
            running = running.min(sigma[k] + delays[k]);
            minima.push(running);
        }

        let stop_index = (0..=leaves)
            .find(|&i| sigma[i + 1] - minima[i] > 0.0)
            .unwrap_or(leaves);
        Self {
            sigma,
            delays,
            minima,
            stop_index,
        }
    }

    pub fn damage(&self) -> u64 {
        self.stop_index as u64 + 1
    }
}

pub fn star_race<R: Rng + ?Sized>(leaves: usize, p: &ProcessParams, rng: &mut R) -> StarRace {
    StarRace::from_uniforms(leaves, p, &StarUniforms::sample(leaves, rng))
}

/// `X` on the star with `leaves` leaves.
pub fn star_sample_x<R: Rng + ?Sized>(leaves: usize, p: &ProcessParams, rng: &mut R) -> u64 {
    star_race(leaves, p, rng).damage()
}

/// Uniform draws behind one complete-graph reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathUniforms {
    /// Drives `sigma(i+1) - sigma(i)`.
    pub death: Vec<f64>,
    /// Drives `rho(i+1) - rho(i)`.
    pub birth: Vec<f64>,
}

impl BirthDeathUniforms {
    /// Enough draws for `K_n`: `n - 1` deaths and at most `n` births.
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let death = (0..n.saturating_sub(1)).map(|_| open01(rng)).collect();
        let birth = (0..n).map(|_| open01(rng)).collect();
        Self { death, birth }
    }
}

/// Death process of white sites against the birth-with-immigration process
/// of blue sites on `K_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirthDeathTrace {
    pub n: usize,
    /// `sigma(0..=n-1)`, `sigma(0) = 0`.
    pub sigma: Vec<f64>,
    /// `rho(0..=i*)` where `i*` is the first `i >= 1` with `rho(i) < sigma(i)`.
    pub rho: Vec<f64>,
    pub rho_star: f64,
    pub tau: f64,
    /// Death-process survivors (white sites never reached) at `tau`.
    pub w_tau: usize,
}

impl BirthDeathTrace {
    pub fn from_uniforms(n: usize, p: &ProcessParams, u: &BirthDeathUniforms) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroVertices);
        }
        if p.alpha() == 0.0 {
            return Err(Error::AlphaZero);
        }
        assert!(u.death.len() >= n - 1 && u.birth.len() >= n);
        let mut sigma = Vec::with_capacity(n);
        sigma.push(0.0);
        for i in 0..n - 1 {
            let rate = p.lambda() * (n - 1 - i) as f64;
            sigma.push(sigma[i] + exp_from_uniform(u.death[i], rate));
        }
        // no deaths beyond the n-1 white sites
        let sigma_at = |i: usize| if i < n { sigma[i] } else { f64::INFINITY };

        let mut rho = vec![0.0];
        let mut i = 0;
        let rho_star = loop {
            let next = rho[i] + exp_from_uniform(u.birth[i], i as f64 + p.alpha());
            rho.push(next);
            i += 1;
            if next < sigma_at(i) {
                break next;
            }
        };
        let tau = sigma[n - 1].min(rho_star);
        let reached = sigma[1..].iter().filter(|&&s| s <= tau).count();
        Ok(Self {
            n,
            sigma,
            rho,
            rho_star,
            tau,
            w_tau: n - 1 - reached,
        })
    }

    pub fn damage(&self) -> u64 {
        (self.n - self.w_tau) as u64
    }
}

pub fn complete_trace<R: Rng + ?Sized>(
    n: usize,
    p: &ProcessParams,
    rng: &mut R,
) -> Result<BirthDeathTrace> {
    if p.alpha() == 0.0 {
        return Err(Error::AlphaZero);
    }
    BirthDeathTrace::from_uniforms(n, p, &BirthDeathUniforms::sample(n, rng))
}

/// `X` on `K_n`.
pub fn complete_sample_x<R: Rng + ?Sized>(n: usize, p: &ProcessParams, rng: &mut R) -> Result<u64> {
    complete_trace(n, p, rng).map(|t| t.damage())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::validate_params;
    use crate::rng::RandomStream;
    use proptest::prelude::*;

    fn params(l: f64, a: f64) -> ProcessParams {
        validate_params(l, a).unwrap()
    }

    fn freq(hits: usize, n: usize) -> f64 {
        hits as f64 / n as f64
    }

    fn within(f: f64, p: f64, n: usize, sigmas: f64) -> bool {
        (f - p).abs() < sigmas * (p * (1.0 - p) / n as f64).sqrt()
    }

    #[test]
    fn jump_probabilities_small_cases() {
        let v = jump_probabilities(1, &params(1.0, 1.0)).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].0, 2);
        assert!((v[0].1 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(v[1].0, 0);
        assert!((v[1].1 - 2.0 / 3.0).abs() < 1e-15);

        let v = jump_probabilities(2, &params(2.0, 1.0)).unwrap();
        let expect = [(3, 0.4), (1, 0.4), (0, 0.2)];
        for ((h, p), (eh, ep)) in v.iter().zip(expect) {
            assert_eq!(*h, eh);
            assert!((p - ep).abs() < 1e-15);
        }
        assert_eq!(jump_probabilities(0, &params(1.0, 1.0)), Err(Error::ZeroHeight));
    }

    #[test]
    fn alpha_zero_has_no_multi_drops() {
        for k in 1..20 {
            let v = jump_probabilities(k, &params(1.7, 0.0)).unwrap();
            assert!((v[0].1 - 1.7 / 2.7).abs() < 1e-15);
            assert!((v[1].1 - 1.0 / 2.7).abs() < 1e-15);
            assert!(v[2..].iter().all(|&(_, p)| p == 0.0));
        }
        let mut rng = RandomStream::new(4);
        for _ in 0..500 {
            let t = run_jump_chain(5, &params(0.8, 0.0), &mut rng);
            let mut prev = t.y0;
            for &h in &t.heights {
                assert!(h == prev + 1 || h + 1 == prev);
                prev = h;
            }
        }
    }

    proptest! {
        #[test]
        fn jump_probabilities_sum_to_one(k in 1u64..200, l in 0.01f64..50.0, a in 0.0f64..20.0) {
            let v = jump_probabilities(k, &params(l, a)).unwrap();
            let s: f64 = v.iter().map(|x| x.1).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
            prop_assert_eq!(v.len() as u64, k + 1);
        }

        #[test]
        fn traces_are_well_formed(y0 in 0u64..20, seed in any::<u64>()) {
            let t = run_jump_chain(y0, &params(1.5, 0.7), &mut RandomStream::new(seed));
            let mut prev = y0;
            let mut ups = 0;
            for &h in &t.heights {
                prop_assert!(h == prev + 1 || h < prev);
                ups += (h == prev + 1) as u64;
                prev = h;
            }
            prop_assert_eq!(ups, t.upsteps);
            if y0 == 0 {
                prop_assert!(t.heights.is_empty());
            } else {
                prop_assert_eq!(*t.heights.last().unwrap(), 0);
                prop_assert!(t.heights[..t.kappa() - 1].iter().all(|&h| h > 0));
            }
        }

        #[test]
        fn reduction_supports(n in 0usize..12, seed in any::<u64>()) {
            let p = params(1.3, 0.6);
            let mut rng = RandomStream::new(seed);
            let race = star_race(n, &p, &mut rng);
            prop_assert!(race.damage() >= 1 && race.damage() <= n as u64 + 1);
            prop_assert!(race.sigma.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(race.minima.windows(2).all(|w| w[0] >= w[1]));
            let t = complete_trace(n + 1, &p, &mut rng).unwrap();
            prop_assert!(t.damage() >= 1 && t.damage() <= n as u64 + 1);
            prop_assert!(t.sigma.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(t.rho.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(t.tau, t.sigma[n].min(t.rho_star));
            let fc = sample_first_conversion(&p, &mut rng).unwrap();
            prop_assert!(fc.m >= 1 && fc.m <= fc.n && fc.gamma > 0.0);
        }
    }

    #[test]
    fn zero_start_is_empty() {
        let t = run_jump_chain(0, &params(1.0, 1.0), &mut RandomStream::new(0));
        assert_eq!((t.kappa(), t.upsteps), (0, 0));
    }

    #[test]
    fn chain_from_one_goes_down_first_two_thirds() {
        let mut rng = RandomStream::new(8);
        let trials = 60_000;
        let zero = (0..trials)
            .filter(|_| run_jump_chain(1, &params(1.0, 1.0), &mut rng).upsteps == 0)
            .count();
        assert!(within(freq(zero, trials), 2.0 / 3.0, trials, 4.0));
    }

    #[test]
    fn mean_upsteps_grow_with_lambda() {
        let mut rng = RandomStream::new(21);
        let means: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&l| {
                let p = params(l, 0.5);
                (0..20_000).map(|_| jump_chain_upsteps(3, &p, &mut rng)).sum::<u64>() as f64 / 20_000.0
            })
            .collect();
        assert!(means.windows(2).all(|w| w[0] < w[1]), "{means:?}");
    }

    #[test]
    fn first_conversion_needs_alpha() {
        let mut rng = RandomStream::new(0);
        assert_eq!(sample_first_conversion(&params(1.0, 0.0), &mut rng), Err(Error::AlphaZero));
        assert_eq!(sample_x_via_jump_chain(&params(1.0, 0.0), &mut rng), Err(Error::AlphaZero));
        assert_eq!(complete_sample_x(4, &params(1.0, 0.0), &mut rng), Err(Error::AlphaZero));
    }

    #[test]
    fn root_races() {
        let mut rng = RandomStream::new(77);
        let trials = 60_000;
        let p = params(1.0, 1.0);
        let root_first = (0..trials)
            .filter(|_| {
                let fc = sample_first_conversion(&p, &mut rng).unwrap();
                fc.m == 1 && fc.n == 1
            })
            .count();
        assert!(within(freq(root_first, trials), 0.5, trials, 4.0));
        let ones = (0..trials).filter(|_| sample_x_via_jump_chain(&p, &mut rng).unwrap() == 1).count();
        assert!(within(freq(ones, trials), 0.5, trials, 4.0));
        let ones = (0..trials).filter(|_| star_sample_x(1, &p, &mut rng) == 1).count();
        assert!(within(freq(ones, trials), 0.5, trials, 4.0));
        let ones = (0..trials).filter(|_| complete_sample_x(2, &p, &mut rng).unwrap() == 1).count();
        assert!(within(freq(ones, trials), 0.5, trials, 4.0));
    }

    #[test]
    fn tiny_lambda_converts_the_root() {
        let mut rng = RandomStream::new(3);
        let p = params(1e-9, 1.0);
        for _ in 0..1000 {
            let fc = sample_first_conversion(&p, &mut rng).unwrap();
            assert_eq!((fc.n, fc.m), (1, 1));
        }
    }

    #[test]
    fn degenerate_sizes() {
        let mut rng = RandomStream::new(1);
        let p = params(2.0, 0.3);
        for _ in 0..100 {
            assert_eq!(star_sample_x(0, &p, &mut rng), 1);
            assert_eq!(complete_sample_x(1, &p, &mut rng).unwrap(), 1);
        }
        // without conversion every leaf of the star ends up red
        assert_eq!(star_sample_x(6, &params(1.0, 0.0), &mut rng), 7);
    }

    #[test]
    fn complete_damage_is_first_birth_overtaking_death() {
        let mut rng = RandomStream::new(12);
        let p = params(1.4, 0.9);
        for _ in 0..2000 {
            let t = complete_trace(7, &p, &mut rng).unwrap();
            let i_star = t.rho.len() as u64 - 1;
            assert_eq!(t.damage(), i_star.min(7));
        }
    }
}
