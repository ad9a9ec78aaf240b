use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy_core::sampled::uniform_grid;
use crate::numerics::{Complex, Estimate, OscillatorySpec};
use crate::quantum_states::overlap::{half_line_product, Factor};
use crate::quantum_states::{evolve_observable, evolve_state, EnergyWaveFunction, WaveKind};

use super::smatrix::SMatrixModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmplitudeMethod {
    Quadrature,
    PoleResidue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    /// Pole residues when every factor is rational, quadrature otherwise.
    #[default]
    Auto,
    Quadrature,
    PoleResidue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AmplitudeOptions {
    pub method: MethodChoice,
    pub switch_threshold: f64,
    /// Upper end of the quadrature grid for closed-form factors.
    pub e_max: f64,
    pub points: usize,
}

impl Default for AmplitudeOptions {
    fn default() -> Self {
        AmplitudeOptions {
            method: MethodChoice::Auto,
            switch_threshold: OscillatorySpec::DEFAULT_SWITCH,
            e_max: 2000.0,
            points: 100_001,
        }
    }
}

impl AmplitudeOptions {
    pub fn quadrature() -> Self {
        AmplitudeOptions {
            method: MethodChoice::Quadrature,
            ..Default::default()
        }
    }

    pub fn pole_residue() -> Self {
        AmplitudeOptions {
            method: MethodChoice::PoleResidue,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.e_max.is_finite() && self.e_max > 0.0) || self.points < 3 {
            return Err(Error::InvalidSpec("quadrature grid needs e_max > 0 and at least 3 points".into()));
        }
        OscillatorySpec::new(0.0, self.switch_threshold).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeResult {
    pub t: f64,
    pub a: Complex,
    /// `|a|²`.
    pub p: f64,
    pub method: AmplitudeMethod,
    /// Error bound on `p`.
    pub error_estimate: f64,
}

impl AmplitudeResult {
    fn from_estimate(t: f64, est: Estimate, method: AmplitudeMethod) -> Self {
        let e = est.error;
        AmplitudeResult {
            t,
            a: est.value,
            p: est.value.norm_sqr(),
            method,
            error_estimate: 2.0 * est.value.norm() * e + e * e,
        }
    }
}

/// `a(t) = Σ_{ℓℓ₃} ∫_0^∞ e^{-iEt} conj(ψ⁻(E)) φ⁺(E) S(E) dE`.
///
/// Channels present in only one of the two functions contribute nothing.
pub fn transition_amplitude(
    obs: &EnergyWaveFunction,
    state: &EnergyWaveFunction,
    s: &SMatrixModel,
    t: f64,
    opts: &AmplitudeOptions,
) -> Result<AmplitudeResult> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    expect(obs, WaveKind::Observable)?;
    expect(state, WaveKind::State)?;
    opts.validate()?;
    let mut pairs = Vec::new();
    for eo in obs.channels() {
        if let Some(es) = state.channel(eo.channel) {
            let fs = vec![Factor::of(&eo.function).conj(), Factor::of(&es.function), s.element(eo.channel).factor()];
            pairs.push((fs, t + es.time_shift - eo.time_shift));
        }
    }
    let all_rational = pairs.iter().all(|(fs, _)| fs.iter().all(|f| matches!(f, Factor::Rational(_))));
    let method = match opts.method {
        MethodChoice::PoleResidue if !all_rational => {
            return Err(Error::InvalidSpec(
                "pole-residue evaluation needs closed-form factors in every channel".into(),
            ));
        }
        MethodChoice::PoleResidue => AmplitudeMethod::PoleResidue,
        MethodChoice::Auto if all_rational => AmplitudeMethod::PoleResidue,
        _ => AmplitudeMethod::Quadrature,
    };
    let grid = match method {
        AmplitudeMethod::Quadrature => Some(uniform_grid(0.0, opts.e_max, opts.points)),
        AmplitudeMethod::PoleResidue => None,
    };
    let mut total = Estimate::new(Complex::new(0.0, 0.0), 0.0);
    for (fs, big_t) in &pairs {
        total = total + half_line_product(fs, *big_t, opts.switch_threshold, grid.as_deref())?;
    }
    Ok(AmplitudeResult::from_estimate(t, total, method))
}

fn expect(w: &EnergyWaveFunction, kind: WaveKind) -> Result<()> {
    if w.kind() != kind {
        return Err(Error::InvalidSpec(format!("expected a {kind:?} wave function, got {:?}", w.kind())));
    }
    Ok(())
}

/// `P(t)` from the evolved state and from the evolved observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PictureResults {
    pub schrodinger: Vec<AmplitudeResult>,
    pub heisenberg: Vec<AmplitudeResult>,
}

impl PictureResults {
    pub fn max_difference(&self) -> f64 {
        self.schrodinger
            .iter()
            .zip(&self.heisenberg)
            .map(|(a, b)| (a.p - b.p).abs())
            .fold(0.0, f64::max)
    }
}

/// `P(t) = |⟨ψ⁻|φ⁺(t)⟩|² = |⟨ψ⁻(t)|φ⁺⟩|²` on a nondecreasing grid of `t ≥ 0`.
pub fn transition_probability(
    obs: &EnergyWaveFunction,
    state: &EnergyWaveFunction,
    s: &SMatrixModel,
    t_grid: &[f64],
    opts: &AmplitudeOptions,
) -> Result<PictureResults> {
    check_times(t_grid)?;
    let schrodinger = t_grid
        .par_iter()
        .map(|&t| retag(transition_amplitude(obs, &evolve_state(state, t)?, s, 0.0, opts)?, t))
        .collect::<Result<Vec<_>>>()?;
    let heisenberg = t_grid
        .par_iter()
        .map(|&t| retag(transition_amplitude(&evolve_observable(obs, t)?, state, s, 0.0, opts)?, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(PictureResults { schrodinger, heisenberg })
}

/// `a(t)` directly on a grid of times.
pub fn amplitude_curve(
    obs: &EnergyWaveFunction,
    state: &EnergyWaveFunction,
    s: &SMatrixModel,
    t_grid: &[f64],
    opts: &AmplitudeOptions,
) -> Result<Vec<AmplitudeResult>> {
    check_times(t_grid)?;
    t_grid.par_iter().map(|&t| transition_amplitude(obs, state, s, t, opts)).collect()
}

fn check_times(t_grid: &[f64]) -> Result<()> {
    if let Some(&t) = t_grid.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::NegativeTime(t));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidValue("time grid must be nondecreasing".into()));
    }
    Ok(())
}

fn retag(mut r: AmplitudeResult, t: f64) -> Result<AmplitudeResult> {
    r.t = t;
    Ok(r)
}

/// Least-squares fit of `P(t) ≈ A e^{-rt}` on `ln P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub rate: f64,
    pub amplitude: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub points: usize,
}

pub fn fit_decay_rate(ts: &[f64], ps: &[f64], t_lo: f64, t_hi: f64) -> Result<ExponentialFit> {
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(ps)
        .filter(|(t, p)| **t >= t_lo && **t <= t_hi && **p > 0.0)
        .map(|(t, p)| (*t, p.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidValue(format!("fewer than two positive points in [{t_lo}, {t_hi}]")));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidValue("fit window holds a single time".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(ExponentialFit {
        rate: -slope,
        amplitude: (my - slope * mt).exp(),
        t_lo,
        t_hi,
        points: pts.len(),
    })
}

/// CSV `t,re_a,im_a,p,err`.
pub fn write_amplitudes_csv<W: Write>(w: W, rows: &[AmplitudeResult]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["t", "re_a", "im_a", "p", "err"]).map_err(csv_err)?;
    for r in rows {
        wr.write_record([r.t, r.a.re, r.a.im, r.p, r.error_estimate].map(|v| v.to_string()))
            .map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads rows written by [`write_amplitudes_csv`]; `method` is not stored
/// and comes back as `Quadrature`.
pub fn read_amplitudes_csv<R: Read>(r: R) -> Result<Vec<AmplitudeResult>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let v: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        if v.len() != 5 {
            return Err(Error::Parse {
                line,
                message: format!("expected 5 fields, found {}", v.len()),
            });
        }
        out.push(AmplitudeResult {
            t: v[0],
            a: Complex::new(v[1], v[2]),
            p: v[3],
            method: AmplitudeMethod::Quadrature,
            error_estimate: v[4],
        });
    }
    Ok(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
