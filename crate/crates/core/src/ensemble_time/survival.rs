use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::events::LabEventRecord;

/// Wilson score interval `(lo, hi)` for `k` successes in `n` trials at `z` standard deviations.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Empirical survival with one-standard-deviation Wilson bars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub t: Vec<f64>,
    pub survival: Vec<f64>,
    pub err_lo: Vec<f64>,
    pub err_hi: Vec<f64>,
    /// Records surviving each grid time.
    pub counts: Vec<usize>,
    pub n: usize,
}

impl SurvivalCurve {
    /// Wilson band at `z` standard deviations for grid point `k`.
    pub fn band(&self, k: usize, z: f64) -> (f64, f64) {
        wilson_interval(self.counts[k], self.n, z)
    }

    /// CSV `t,survival,err_lo,err_hi`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "survival", "err_lo", "err_hi"]).map_err(io)?;
        for k in 0..self.t.len() {
            wr.write_record([self.t[k], self.survival[k], self.err_lo[k], self.err_hi[k]].map(|v| v.to_string()))
                .map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn sorted_times(records: &[LabEventRecord]) -> Result<Vec<f64>> {
    if records.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut ts: Vec<f64> = records.iter().map(|r| r.t_param).collect();
    ts.sort_by(f64::total_cmp);
    Ok(ts)
}

/// Number of records with `t_param > t`, or `≥ t` at `t = 0`.
fn surviving(sorted: &[f64], t: f64) -> usize {
    let k = if t == 0.0 {
        sorted.partition_point(|&x| x < t)
    } else {
        sorted.partition_point(|&x| x <= t)
    };
    sorted.len() - k
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidValue("time grid must be finite and nondecreasing".into()));
    }
    Ok(())
}

/// Fraction of records still undecayed at each grid time.
pub fn survival_curve(records: &[LabEventRecord], t_grid: &[f64]) -> Result<SurvivalCurve> {
    let ts = sorted_times(records)?;
    check_grid(t_grid)?;
    let n = ts.len();
    let counts: Vec<usize> = t_grid.iter().map(|&t| surviving(&ts, t)).collect();
    let survival: Vec<f64> = counts.iter().map(|&k| k as f64 / n as f64).collect();
    let (mut err_lo, mut err_hi) = (Vec::new(), Vec::new());
    for (&k, &s) in counts.iter().zip(&survival) {
        let (lo, hi) = wilson_interval(k, n, 1.0);
        err_lo.push((s - lo).max(0.0));
        err_hi.push((hi - s).max(0.0));
    }
    Ok(SurvivalCurve {
        t: t_grid.to_vec(),
        survival,
        err_lo,
        err_hi,
        counts,
        n,
    })
}

/// The step times of the empirical survival function: `0` and every distinct decay time.
pub fn event_grid(records: &[LabEventRecord]) -> Result<Vec<f64>> {
    let mut ts = sorted_times(records)?;
    ts.dedup();
    if ts[0] != 0.0 {
        ts.insert(0, 0.0);
    }
    Ok(ts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub t: Vec<f64>,
    pub empirical: Vec<f64>,
    /// Theory normalized by its value at `t = 0`.
    pub theory: Vec<f64>,
    pub z: Vec<f64>,
    pub max_abs_z: f64,
    pub n: usize,
}

impl ComparisonReport {
    pub fn consistent(&self, threshold: f64) -> bool {
        self.max_abs_z <= threshold
    }
}

/// Binomial z-scores of the empirical survival against a theory curve
/// sampled on `t_grid`.
///
/// The theory is normalized by its value at `t = 0` when the grid holds
/// that point, since every record is eventually registered.
pub fn compare_to_theory(records: &[LabEventRecord], theory: &[f64], t_grid: &[f64]) -> Result<ComparisonReport> {
    if t_grid.is_empty() {
        return Err(Error::GridMismatch("time grid is empty".into()));
    }
    if theory.len() != t_grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} theory values for {} grid times",
            theory.len(),
            t_grid.len()
        )));
    }
    if let Some(p) = theory.iter().find(|p| !(**p >= 0.0 && **p <= 1.0)) {
        return Err(Error::InvalidValue(format!("theory value {p} is outside [0, 1]")));
    }
    let curve = survival_curve(records, t_grid)?;
    let p0 = t_grid.iter().position(|&t| t == 0.0).map_or(1.0, |k| theory[k]);
    if !(p0 > 0.0) {
        return Err(Error::InvalidValue("theory vanishes at t = 0".into()));
    }
    let n = curve.n as f64;
    let th: Vec<f64> = theory.iter().map(|p| (p / p0).min(1.0)).collect();
    let z: Vec<f64> = curve
        .survival
        .iter()
        .zip(&th)
        .map(|(&e, &p)| {
            let sigma = (p * (1.0 - p) / n).sqrt();
            if sigma > 0.0 {
                (e - p) / sigma
            } else if e == p {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let max_abs_z = z.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(ComparisonReport {
        t: t_grid.to_vec(),
        empirical: curve.survival,
        theory: th,
        z,
        max_abs_z,
        n: curve.n,
    })
}
