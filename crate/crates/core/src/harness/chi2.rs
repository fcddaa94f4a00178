use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Significance level for every equivalence test.
pub const SIGNIFICANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    pub pass: bool,
}

/// Two-sample chi-squared test of equal distributions.
///
/// Distinct values of the pooled sample are merged, in increasing order,
/// into bins whose expected count under the pooled distribution is at least
/// `min_bin` for both samples; a short tail is folded into the last bin.
pub fn distribution_compare<T: Ord + Copy>(a: &[T], b: &[T], min_bin: usize) -> Result<ChiSquareReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pooled: BTreeMap<T, (u64, u64)> = BTreeMap::new();
    for &x in a {
        pooled.entry(x).or_default().0 += 1;
    }
    for &x in b {
        pooled.entry(x).or_default().1 += 1;
    }
    if pooled.len() < 2 {
        return Err(Error::DegenerateSupport);
    }

    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    let smaller = na.min(nb);
    let needed = min_bin.max(1) as f64;
    let mut bins: Vec<(u64, u64)> = Vec::new();
    let mut open = (0u64, 0u64);
    for &(ca, cb) in pooled.values() {
        open.0 += ca;
        open.1 += cb;
        if (open.0 + open.1) as f64 * smaller / total >= needed {
            bins.push(open);
            open = (0, 0);
        }
    }
    if open.0 + open.1 > 0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += open.0;
                last.1 += open.1;
            }
            None => bins.push(open),
        }
    }
    if bins.len() < 2 {
        return Err(Error::DegenerateSupport);
    }

    let chi2: f64 = bins
        .iter()
        .map(|&(ca, cb)| {
            let c = (ca + cb) as f64;
            let (ea, eb) = (na * c / total, nb * c / total);
            (ca as f64 - ea).powi(2) / ea + (cb as f64 - eb).powi(2) / eb
        })
        .sum();
    let dof = bins.len() - 1;
    let p_value = ChiSquared::new(dof as f64)
        .map(|d| d.sf(chi2))
        .unwrap_or(f64::NAN);
    Ok(ChiSquareReport {
        chi2,
        dof,
        p_value,
        pass: p_value >= SIGNIFICANCE,
    })
}
