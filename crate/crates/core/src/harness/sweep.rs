use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::replicas::{run_replicas_seeded, Workers};
use crate::error::{Error, Result};
use crate::graph::{build_torus, Geometry};
use crate::process::{run_band_experiment, validate_params, ProcessParams, RunStatus};
use crate::rng::derive_seed;

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

pub const CSV_HEADER: &str = "vary,value,L,n,escaped,p_hat,ci_low,ci_high,seed_scheme";

/// Wilson score interval for `successes` out of `n` trials.
pub fn wilson(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    #[serde(rename = "L")]
    pub size: usize,
    pub value: f64,
    pub n: u64,
    pub escaped: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl EstimateRow {
    fn from_counts(size: usize, value: f64, escaped: u64, n: u64) -> Self {
        let (ci_low, ci_high) = wilson(escaped, n, WILSON_Z);
        Self {
            size,
            value,
            n,
            escaped,
            p_hat: escaped as f64 / n as f64,
            ci_low,
            ci_high,
        }
    }
}

fn estimate(
    size: usize,
    value: f64,
    p: &ProcessParams,
    n: u64,
    seed_base: u64,
    geometry: Geometry,
    workers: &Workers,
) -> Result<EstimateRow> {
    if n == 0 {
        return Err(Error::BadSweep("samples_per_point must be at least 1".into()));
    }
    let lattice = build_torus(size, geometry)?;
    let runs = run_replicas_seeded(
        n as usize,
        workers,
        |i| derive_seed(seed_base, &[i as u64]),
        |_, rng| run_band_experiment(&lattice, p, rng).map(|o| o.status == RunStatus::Escaped),
    );
    let mut escaped = 0;
    for r in runs {
        escaped += r? as u64;
    }
    Ok(EstimateRow::from_counts(size, value, escaped, n))
}

/// Escape frequency of the band experiment on an `L x L` lattice. The row's
/// `value` is `lambda`.
pub fn escape_probability(
    size: usize,
    p: &ProcessParams,
    n: u64,
    base_seed: u64,
    geometry: Geometry,
    workers: &Workers,
) -> Result<EstimateRow> {
    let seed_base = derive_seed(base_seed, &[size as u64, p.lambda().to_bits(), p.alpha().to_bits()]);
    estimate(size, p.lambda(), p, n, seed_base, geometry, workers)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vary {
    Lambda,
    Alpha,
}

impl Vary {
    pub fn as_str(self) -> &'static str {
        match self {
            Vary::Lambda => "lambda",
            Vary::Alpha => "alpha",
        }
    }
}

impl std::str::FromStr for Vary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(Vary::Lambda),
            "alpha" => Ok(Vary::Alpha),
            other => Err(Error::BadSweep(format!("vary must be lambda or alpha, got {other:?}"))),
        }
    }
}

fn default_family() -> String {
    "torus-band".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_family")]
    pub family: String,
    pub vary: Vary,
    pub fixed_value: f64,
    pub grid: Vec<f64>,
    pub sizes: Vec<usize>,
    pub samples_per_point: u64,
    pub base_seed: u64,
    #[serde(default)]
    pub geometry: Geometry,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.family != "torus-band" {
            return Err(Error::BadSweep(format!("family must be torus-band, got {:?}", self.family)));
        }
        if self.grid.is_empty() {
            return Err(Error::BadSweep("grid is empty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadSweep("grid values must be finite".into()));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadSweep("grid must be strictly increasing".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::BadSweep("sizes is empty".into()));
        }
        if self.samples_per_point == 0 {
            return Err(Error::BadSweep("samples_per_point must be at least 1".into()));
        }
        Ok(())
    }

    fn params_at(&self, value: f64) -> Result<ProcessParams> {
        match self.vary {
            Vary::Lambda => validate_params(value, self.fixed_value),
            Vary::Alpha => validate_params(self.fixed_value, value),
        }
    }

    /// Describes how replica streams are derived; written to every CSV row.
    pub fn seed_scheme(&self) -> String {
        format!("splitmix64({};L;value_bits;replica)+chacha8", self.base_seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub size: usize,
    pub value: f64,
    /// The estimate, or the error message of the failed row.
    pub outcome: std::result::Result<EstimateRow, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub vary: Vary,
    pub seed_scheme: String,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn estimates(&self) -> Vec<EstimateRow> {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().ok().copied()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let vary = self.vary.as_str();
            match &row.outcome {
                Ok(e) => writeln!(
                    out,
                    "{vary},{},{},{},{},{},{},{},{}",
                    row.value, row.size, e.n, e.escaped, e.p_hat, e.ci_low, e.ci_high, self.seed_scheme
                ),
                Err(_) => writeln!(out, "{vary},{},{},NA,NA,NA,NA,NA,{}", row.value, row.size, self.seed_scheme),
            }
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Runs the band experiment at every (size, grid value). Replica `i` at
/// `(L, v)` uses the stream derived from `(base_seed, L, bits(v), i)`, so
/// adding grid points or sizes leaves existing rows unchanged.
pub fn sweep(spec: &SweepSpec, workers: &Workers) -> Result<SweepTable> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.sizes.len() * spec.grid.len());
    for &size in &spec.sizes {
        for &value in &spec.grid {
            let seed_base = derive_seed(spec.base_seed, &[size as u64, value.to_bits()]);
            let outcome = spec
                .params_at(value)
                .and_then(|p| estimate(size, value, &p, spec.samples_per_point, seed_base, spec.geometry, workers))
                .map_err(|e| e.to_string());
            rows.push(SweepRow { size, value, outcome });
        }
    }
    Ok(SweepTable {
        vary: spec.vary,
        seed_scheme: spec.seed_scheme(),
        rows,
    })
}

/// Reads the estimate rows of a sweep CSV, skipping failed (`NA`) rows.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<EstimateRow>> {
    let parse_err = |line: usize, message: String| Error::Parse { line, message };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        Some((i, h)) => return Err(parse_err(i + 1, format!("expected header {CSV_HEADER:?}, got {h:?}"))),
        None => return Err(Error::EmptyInput),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 9 {
            return Err(parse_err(i + 1, format!("expected 9 fields, got {}", fields.len())));
        }
        if fields[3] == "NA" {
            continue;
        }
        let num = |k: usize| {
            fields[k]
                .parse::<f64>()
                .map_err(|_| parse_err(i + 1, format!("field {} is not a number: {:?}", k + 1, fields[k])))
        };
        let int = |k: usize| {
            fields[k]
                .parse::<u64>()
                .map_err(|_| parse_err(i + 1, format!("field {} is not an integer: {:?}", k + 1, fields[k])))
        };
        rows.push(EstimateRow {
            value: num(1)?,
            size: int(2)? as usize,
            n: int(3)?,
            escaped: int(4)?,
            p_hat: num(5)?,
            ci_low: num(6)?,
            ci_high: num(7)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(grid: Vec<f64>, sizes: Vec<usize>) -> SweepSpec {
        SweepSpec {
            family: default_family(),
            vary: Vary::Lambda,
            fixed_value: 1.0,
            grid,
            sizes,
            samples_per_point: 40,
            base_seed: 5,
            geometry: Geometry::Cylinder,
        }
    }

    #[test]
    fn wilson_at_zero() {
        let (lo, hi) = wilson(0, 100, WILSON_Z);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.037).abs() < 5e-4, "{hi}");
        let (lo, hi) = wilson(100, 100, WILSON_Z);
        assert_eq!(hi, 1.0);
        assert!((lo - 0.963).abs() < 5e-4);
    }

    #[test]
    fn wilson_coverage() {
        use crate::rng::{open01, RandomStream};
        let mut rng = RandomStream::new(12);
        for p in [0.02, 0.3, 0.5, 0.9] {
            let covered = (0..1000)
                .filter(|_| {
                    let k = (0..200).filter(|_| open01(&mut rng) < p).count() as u64;
                    let (lo, hi) = wilson(k, 200, WILSON_Z);
                    lo <= p && p <= hi
                })
                .count();
            assert!(covered >= 930, "p={p}: {covered}");
        }
    }

    #[test]
    fn extreme_rates() {
        let w = Workers::new(1);
        let hi = escape_probability(8, &validate_params(1e6, 1.0).unwrap(), 200, 1, Geometry::Cylinder, &w).unwrap();
        assert!(hi.p_hat > 0.99);
        let lo = escape_probability(8, &validate_params(1e-6, 1.0).unwrap(), 200, 1, Geometry::Cylinder, &w).unwrap();
        assert!(lo.p_hat < 0.01);
        assert!(lo.ci_low <= lo.p_hat && lo.p_hat <= lo.ci_high);
    }

    #[test]
    fn sweep_shape_and_determinism() {
        let s = spec(vec![1.5, 2.0, 2.5], vec![6, 8]);
        let a = sweep(&s, &Workers::new(1)).unwrap();
        assert_eq!(a.rows.len(), 6);
        let csv = a.to_csv();
        assert_eq!(csv, sweep(&s, &Workers::new(4)).unwrap().to_csv());
        assert_eq!(csv.lines().count(), 7);
        assert_eq!(parse_sweep_csv(&csv).unwrap(), a.estimates());

        // adding a grid point leaves existing rows untouched
        let wider = sweep(&spec(vec![1.5, 1.75, 2.0, 2.5], vec![6, 8]), &Workers::new(1)).unwrap();
        for row in &a.rows {
            assert!(wider.rows.contains(row));
        }
    }

    #[test]
    fn failed_rows_are_marked() {
        let s = spec(vec![0.0, 2.0], vec![2, 6]);
        let t = sweep(&s, &Workers::new(1)).unwrap();
        let csv = t.to_csv();
        assert_eq!(csv.matches("NA,NA,NA,NA,NA").count(), 3);
        assert_eq!(parse_sweep_csv(&csv).unwrap().len(), 1);
    }

    #[test]
    fn invalid_specs() {
        let w = Workers::new(1);
        assert!(matches!(sweep(&spec(vec![2.0, 1.0], vec![8]), &w), Err(Error::BadSweep(_))));
        assert!(matches!(sweep(&spec(vec![], vec![8]), &w), Err(Error::BadSweep(_))));
        let mut s = spec(vec![1.0], vec![8]);
        s.samples_per_point = 0;
        assert!(matches!(sweep(&s, &w), Err(Error::BadSweep(_))));
    }

    #[test]
    fn spec_json_round_trip() {
        let s = spec(vec![1.7, 1.75], vec![32, 64]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<SweepSpec>(&json).unwrap(), s);
        let minimal = r#"{"vary":"alpha","fixed_value":1,"grid":[0.2,0.3],"sizes":[8],
            "samples_per_point":10,"base_seed":3}"#;
        let m: SweepSpec = serde_json::from_str(minimal).unwrap();
        assert_eq!(m.geometry, Geometry::Cylinder);
        assert_eq!(m.vary, Vary::Alpha);
    }

    #[test]
    fn csv_parse_errors_name_the_line() {
        let bad = format!("{CSV_HEADER}\nlambda,1,8,10,x,0.1,0,1,s\n");
        assert!(matches!(parse_sweep_csv(&bad), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_sweep_csv("nope\n"), Err(Error::Parse { line: 1, .. })));
    }

    proptest! {
        #[test]
        fn wilson_brackets_estimate(n in 1u64..5000, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).floor() as u64;
            let (lo, hi) = wilson(k, n, WILSON_Z);
            let p = k as f64 / n as f64;
            prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        }
    }
}
