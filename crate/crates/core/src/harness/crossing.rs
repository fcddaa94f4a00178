use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sweep::EstimateRow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCrossing {
    #[serde(rename = "L1")]
    pub l1: usize,
    #[serde(rename = "L2")]
    pub l2: usize,
    pub crossing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingEstimate {
    #[serde(rename = "pairs")]
    pub pairwise_crossings: Vec<PairCrossing>,
    #[serde(rename = "estimate")]
    pub point_estimate: f64,
    pub spread: f64,
}

/// Piecewise-linear interpolation of sorted points at `x` inside their hull.
fn interpolate(curve: &[(f64, f64)], x: f64) -> f64 {
    let i = curve.partition_point(|&(cx, _)| cx < x);
    if i < curve.len() && curve[i].0 == x {
        return curve[i].1;
    }
    let (x0, y0) = curve[i - 1];
    let (x1, y1) = curve[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Locates the single sign change of `a - b`, both curves piecewise linear.
fn crossing(a: &[(f64, f64)], b: &[(f64, f64)], sizes: (usize, usize)) -> Result<f64> {
    let lo = a[0].0.max(b[0].0);
    let hi = a[a.len() - 1].0.min(b[b.len() - 1].0);
    let mut xs: Vec<f64> = a.iter().chain(b).map(|p| p.0).filter(|&x| lo <= x && x <= hi).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    // the difference is linear between consecutive union-grid points
    let diffs: Vec<(f64, f64)> = xs.iter().map(|&x| (x, interpolate(a, x) - interpolate(b, x))).collect();
    let mut found = None;
    let mut changes = 0;
    let mut last_nonzero: Option<usize> = None;
    for (k, &(_, d)) in diffs.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        if let Some(j) = last_nonzero {
            let (xj, dj) = diffs[j];
            if dj.signum() != d.signum() {
                changes += 1;
                let (xk, dk) = diffs[k];
                found = Some(if k > j + 1 {
                    // curves touch on the grid points strictly between
                    let touching = &diffs[j + 1..k];
                    touching.iter().map(|p| p.0).sum::<f64>() / touching.len() as f64
                } else {
                    xj + dj * (xk - xj) / (dj - dk)
                });
            }
        }
        last_nonzero = Some(k);
    }
    match changes {
        0 => Err(Error::NoCrossing(sizes.0, sizes.1)),
        1 => Ok(found.expect("one sign change recorded")),
        _ => Err(Error::MultipleCrossings(sizes.0, sizes.1)),
    }
}

fn median(sorted: &[f64]) -> f64 {
    let m = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[m]
    } else {
        0.5 * (sorted[m - 1] + sorted[m])
    }
}

/// Intersects the escape-probability curves of consecutive sizes and
/// reports the median crossing.
pub fn estimate_crossing(rows: &[EstimateRow]) -> Result<CrossingEstimate> {
    let mut curves: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        curves.entry(r.size).or_default().push((r.value, r.p_hat));
    }
    if curves.len() < 2 {
        return Err(Error::BadSweep(format!("need at least 2 sizes, got {}", curves.len())));
    }
    for (size, c) in curves.iter_mut() {
        c.sort_by(|p, q| p.0.total_cmp(&q.0));
        if c.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::BadSweep(format!("L={size} has repeated grid values")));
        }
        if c.len() < 2 {
            return Err(Error::BadSweep(format!("L={size} needs at least 2 grid points")));
        }
    }
    let sizes: Vec<usize> = curves.keys().copied().collect();
    let mut pairwise = Vec::with_capacity(sizes.len() - 1);
    for w in sizes.windows(2) {
        let (l1, l2) = (w[0], w[1]);
        let (a, b) = (&curves[&l1], &curves[&l2]);
        if a[a.len() - 1].0 < b[0].0 || b[b.len() - 1].0 < a[0].0 {
            return Err(Error::NoCrossing(l1, l2));
        }
        pairwise.push(PairCrossing {
            l1,
            l2,
            crossing: crossing(a, b, (l1, l2))?,
        });
    }
    let mut values: Vec<f64> = pairwise.iter().map(|p| p.crossing).collect();
    values.sort_by(f64::total_cmp);
    Ok(CrossingEstimate {
        point_estimate: median(&values),
        spread: values[values.len() - 1] - values[0],
        pairwise_crossings: pairwise,
    })
}
