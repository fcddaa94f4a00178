//! Bounds on the critical red rate `lambda_c(alpha)` for graphs of bounded
//! degree, the ingredients of their proofs, and a good-site percolation
//! simulator.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::process::ProcessParams;
use crate::rng::exp;
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub d: usize,
    pub alpha: f64,
    pub p_c: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        if self.d < 3 {
            return Err(Error::BadDegree(self.d));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::BadInputs(format!("alpha must be positive and finite, got {}", self.alpha)));
        }
        if !(self.p_c > 0.0 && self.p_c < 1.0) {
            return Err(Error::BadInputs(format!("p_c must lie in (0, 1), got {}", self.p_c)));
        }
        Ok(())
    }

    pub fn report(&self) -> Result<BoundReport> {
        Ok(BoundReport {
            lambda_lower: lambda_lower(self.d, self.alpha)?,
            lambda_upper: lambda_upper(self.d, self.alpha, self.p_c)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lambda_lower: f64,
    pub lambda_upper: f64,
}

/// `alpha / (d - 2)`: below this red rate the damage has finite mean.
pub fn lambda_lower(d: usize, alpha: f64) -> Result<f64> {
    if d < 3 {
        return Err(Error::BadDegree(d));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::BadInputs(format!("alpha must be positive and finite, got {alpha}")));
    }
    Ok(alpha / (d as f64 - 2.0))
}

/// `(d + alpha) / (1 - p_c^(1/d))`: above this red rate good sites
/// percolate and the damage is infinite with positive probability.
pub fn lambda_upper(d: usize, alpha: f64, p_c: f64) -> Result<f64> {
    BoundInputs { d, alpha, p_c }.validate()?;
    let d = d as f64;
    Ok((d + alpha) / (1.0 - p_c.powf(1.0 / d)))
}

/// Probability bound `(lambda / (lambda + alpha))^k` that red survives
/// along a fixed path of length `k`.
pub fn path_survival_bound(lambda: f64, alpha: f64, k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let ratio = if lambda.is_infinite() { 1.0 } else { lambda / (lambda + alpha) };
    ratio.powi(k as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DamageBound {
    Finite(f64),
    Infinite,
}

impl DamageBound {
    pub fn finite(self) -> Option<f64> {
        match self {
            DamageBound::Finite(v) => Some(v),
            DamageBound::Infinite => None,
        }
    }
}

/// Upper bound on `E X` from summing path-survival bounds over the
/// non-backtracking paths from the root.
pub fn expected_damage_bound(lambda: f64, alpha: f64, d: usize) -> DamageBound {
    let q = lambda / (lambda + alpha);
    let ratio = (d as f64 - 1.0) * q;
    if ratio >= 1.0 || ratio.is_nan() {
        return DamageBound::Infinite;
    }
    DamageBound::Finite(1.0 + d as f64 * q / (1.0 - ratio))
}

/// `(lambda / (lambda + d + alpha))^d`, a lower bound on the probability
/// that a vertex of degree at most `d` is good.
pub fn good_site_prob_lower(lambda: f64, alpha: f64, d: usize) -> f64 {
    if lambda.is_infinite() {
        return 1.0;
    }
    (lambda / (lambda + d as f64 + alpha)).powi(d as i32)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodSiteSample {
    pub good_mask: Vec<bool>,
    /// Size of the good cluster containing the root; 0 if the root is bad.
    pub root_cluster_size: usize,
}

/// Draws independent red and blue delays on every arc and a conversion delay
/// per vertex, marks the vertices whose red delays all beat every incoming
/// blue delay and their own conversion, and measures the root's cluster.
pub fn good_site_percolation_sim<R: Rng + ?Sized>(
    g: &Graph,
    p: &ProcessParams,
    rng: &mut R,
) -> GoodSiteSample {
    let red: Vec<f64> = (0..g.arc_count()).map(|_| exp(rng, p.lambda())).collect();
    let blue: Vec<f64> = (0..g.arc_count()).map(|_| exp(rng, 1.0)).collect();
    let conversion: Vec<f64> = (0..g.n()).map(|_| exp(rng, p.alpha())).collect();

    let good_mask: Vec<bool> = (0..g.n())
        .map(|x| {
            let slowest_red = g.arcs(x).map(|a| red[a]).fold(0.0, f64::max);
            let first_blue = g
                .arcs(x)
                .map(|a| blue[g.reverse_arc(a)])
                .fold(conversion[x], f64::min);
            slowest_red < first_blue
        })
        .collect();

    let root = g.root();
    let root_cluster_size = if good_mask[root] {
        let mut uf = UnionFind::new(g.n());
        for (u, v) in g.edges() {
            if good_mask[u] && good_mask[v] {
                uf.union(u, v);
            }
        }
        uf.set_size(root)
    } else {
        0
    };
    GoodSiteSample {
        good_mask,
        root_cluster_size,
    }
}
