use std::io::{Read, Write};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One preparation/registration pair on the lab clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabEventRecord {
    /// 1-based record index.
    pub index: usize,
    pub t_prep: f64,
    pub t_reg: f64,
    /// Parameter time `T' - T`, every preparation being `t = 0`.
    pub t_param: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum PreparationScheme {
    /// All systems prepared at the same lab time.
    Simultaneous { t0: f64 },
    /// One system at each of a strictly increasing list of lab times.
    Sequential { times: Vec<f64> },
}

impl PreparationScheme {
    pub fn validate(&self) -> Result<()> {
        match self {
            PreparationScheme::Simultaneous { t0 } if t0.is_finite() => Ok(()),
            PreparationScheme::Simultaneous { t0 } => Err(Error::InvalidValue(format!("preparation time {t0} is not finite"))),
            PreparationScheme::Sequential { times } => {
                if times.iter().any(|t| !t.is_finite()) {
                    return Err(Error::InvalidValue("preparation times must be finite".into()));
                }
                if let Some(k) = times.windows(2).position(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidValue(format!(
                        "preparation times must increase strictly (at index {})",
                        k + 2
                    )));
                }
                Ok(())
            }
        }
    }

    /// Lab preparation time of record `i` (0-based).
    fn prep_time(&self, i: usize) -> f64 {
        match self {
            PreparationScheme::Simultaneous { t0 } => *t0,
            PreparationScheme::Sequential { times } => times[i],
        }
    }

    fn check_length(&self, n: usize) -> Result<()> {
        if let PreparationScheme::Sequential { times } = self {
            if times.len() < n {
                return Err(Error::InvalidSchemeLength {
                    available: times.len(),
                    required: n,
                });
            }
        }
        Ok(())
    }
}

/// `t_i = T'_i - T_i`; fails with every index where registration precedes preparation.
pub fn map_to_parameter_time(events: &[(f64, f64)]) -> Result<Vec<LabEventRecord>> {
    let bad: Vec<usize> = events.iter().enumerate().filter(|(_, (p, r))| !(r >= p)).map(|(i, _)| i + 1).collect();
    if !bad.is_empty() {
        return Err(Error::CausalityViolation { indices: bad });
    }
    Ok(events
        .iter()
        .enumerate()
        .map(|(i, &(t_prep, t_reg))| LabEventRecord {
            index: i + 1,
            t_prep,
            t_reg,
            t_param: t_reg - t_prep,
        })
        .collect())
}

/// Uniform draw in `(0, 1]` from stream `index` of the seeded generator.
///
/// Each record owns the ChaCha20 stream numbered by its 0-based index,
/// so draws are independent of thread scheduling and of `N`.
pub fn uniform_draw(seed: u64, index: usize) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    1.0 - (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `N` exponential decay times `t_i ~ Γ e^{-Γt}` placed on the lab clock by `scheme`.
pub fn sample_decay_ensemble(rate: f64, n: usize, scheme: &PreparationScheme, seed: u64) -> Result<Vec<LabEventRecord>> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidRate(rate));
    }
    sample_with(n, scheme, seed, |u| -u.ln() / rate)
}

/// Decay times drawn by inverting a survival curve given at `ts`.
///
/// The curve is normalized by its first value and interpolated linearly;
/// draws below its last value are placed at the last grid time.
pub fn sample_from_survival(ts: &[f64], survival: &[f64], n: usize, scheme: &PreparationScheme, seed: u64) -> Result<Vec<LabEventRecord>> {
    if ts.len() != survival.len() || ts.len() < 2 {
        return Err(Error::GridMismatch(
            "survival curve needs matching t and value arrays of length >= 2".into(),
        ));
    }
    if ts[0] < 0.0 || ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidValue("survival times must be >= 0 and strictly increasing".into()));
    }
    let s0 = survival[0];
    if !(s0 > 0.0) || survival.windows(2).any(|w| w[1] > w[0]) || survival.iter().any(|s| !(*s >= 0.0)) {
        return Err(Error::InvalidValue(
            "survival curve must be positive at the start and nonincreasing".into(),
        ));
    }
    let s: Vec<f64> = survival.iter().map(|v| v / s0).collect();
    sample_with(n, scheme, seed, |u| {
        let k = s.partition_point(|&v| v > u);
        if k == 0 {
            ts[0]
        } else if k >= s.len() {
            ts[s.len() - 1]
        } else {
            let f = (s[k - 1] - u) / (s[k - 1] - s[k]);
            ts[k - 1] + f * (ts[k] - ts[k - 1])
        }
    })
}

fn sample_with(n: usize, scheme: &PreparationScheme, seed: u64, inverse: impl Fn(f64) -> f64 + Sync) -> Result<Vec<LabEventRecord>> {
    if n == 0 {
        return Err(Error::InvalidValue("ensemble size must be at least 1".into()));
    }
    scheme.validate()?;
    scheme.check_length(n)?;
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let t = inverse(uniform_draw(seed, i));
            let t_prep = scheme.prep_time(i);
            LabEventRecord {
                index: i + 1,
                t_prep,
                t_reg: t_prep + t,
                t_param: t,
            }
        })
        .collect())
}

/// CSV `i,T_prep,T_reg,t`.
pub fn write_events_csv<W: Write>(w: W, records: &[LabEventRecord]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["i", "T_prep", "T_reg", "t"]).map_err(io)?;
    for r in records {
        wr.write_record([r.index.to_string(), r.t_prep.to_string(), r.t_reg.to_string(), r.t_param.to_string()])
            .map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads an event CSV without validating causality.
pub fn read_events_csv<R: Read>(r: R) -> Result<Vec<LabEventRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if rec.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 fields, found {}", rec.len()),
            });
        }
        let num = |j: usize| {
            rec[j].trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("field {}: {e}", j + 1),
            })
        };
        let index = rec[0].trim().parse::<usize>().map_err(|e| Error::Parse {
            line,
            message: format!("index: {e}"),
        })?;
        out.push(LabEventRecord {
            index,
            t_prep: num(1)?,
            t_reg: num(2)?,
            t_param: num(3)?,
        });
    }
    Ok(out)
}

/// Re-derives parameter times from the lab-clock columns of externally
/// supplied records, reporting their own indices on violation.
pub fn validate_records(records: &[LabEventRecord]) -> Result<Vec<LabEventRecord>> {
    let pairs: Vec<(f64, f64)> = records.iter().map(|r| (r.t_prep, r.t_reg)).collect();
    match map_to_parameter_time(&pairs) {
        Ok(mapped) => Ok(mapped
            .into_iter()
            .zip(records)
            .map(|(m, r)| LabEventRecord { index: r.index, ..m })
            .collect()),
        Err(Error::CausalityViolation { indices }) => Err(Error::CausalityViolation {
            indices: indices.into_iter().map(|i| records[i - 1].index).collect(),
        }),
        Err(e) => Err(e),
    }
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
