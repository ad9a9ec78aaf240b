use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::oscillatory::grid_half_line;
use crate::numerics::{tail, Complex, Estimate, OscillatorySpec, I};

use super::analytic::AnalyticModel;
use super::sampled::{SampledComplexFunction, TailModel};

/// Closed-form causal signals `f(t)`, zero for `t < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum CausalSignal {
    /// `θ(t) e^{i(a+ib)t}`.
    Exponential {
        a: f64,
        b: f64,
    },
    /// `θ(t) e^{-bt} sin(at)`.
    DampedSine {
        a: f64,
        b: f64,
    },
    Zero,
}

impl CausalSignal {
    pub fn eval(&self, t: f64) -> Complex {
        if t < 0.0 {
            return Complex::new(0.0, 0.0);
        }
        match *self {
            CausalSignal::Exponential { a, b } => (I * Complex::new(a, b) * t).exp(),
            CausalSignal::DampedSine { a, b } => Complex::new((-b * t).exp() * (a * t).sin(), 0.0),
            CausalSignal::Zero => Complex::new(0.0, 0.0),
        }
    }
}

/// `h(ω) = ∫_0^∞ e^{iωt} f(t) dt` in closed form.
pub fn causal_transform(signal: &CausalSignal) -> Result<AnalyticModel> {
    match *signal {
        CausalSignal::Exponential { a, b } => {
            if !(b > 0.0) || !a.is_finite() || !b.is_finite() {
                return Err(Error::NonIntegrableInput(format!("e^{{i(a+ib)t}} needs b > 0, got b = {b}")));
            }
            // ∫_0^∞ e^{i(ω+a+ib)t} dt = i/(ω + a + ib)
            AnalyticModel::simple_pole(I, Complex::new(-a, -b))
        }
        CausalSignal::DampedSine { a, b } => {
            if !(b > 0.0) || !a.is_finite() || !b.is_finite() {
                return Err(Error::NonIntegrableInput(format!("e^{{-bt}} sin(at) needs b > 0, got b = {b}")));
            }
            AnalyticModel::damped_sine(a, b)
        }
        CausalSignal::Zero => Ok(AnalyticModel::zero()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausalOptions {
    /// Filon switch for `|ω|·h`.
    pub switch_threshold: f64,
    /// `f(t) ≈ f(T) e^{iκ(t-T)}` beyond the last sample, `Im κ > 0`.
    #[serde(default)]
    pub exponential_tail: Option<Complex>,
}

impl Default for CausalOptions {
    fn default() -> Self {
        CausalOptions {
            switch_threshold: OscillatorySpec::DEFAULT_SWITCH,
            exponential_tail: None,
        }
    }
}

/// Sampled causal transform on the frequency grid `omegas`.
///
/// The result carries the high-frequency tail `i f(0)/ω` (or
/// `-f'(0)/ω²` when `f(0) = 0`) as its tail model.
pub fn causal_transform_sampled(f: &SampledComplexFunction, omegas: &[f64], opts: &CausalOptions) -> Result<SampledComplexFunction> {
    let (values, _) = causal_transform_sampled_report(f, omegas, opts)?;
    let tail = high_frequency_tail(f)?;
    SampledComplexFunction::new(omegas.to_vec(), values, tail)
}

/// Values and per-frequency error estimates.
pub fn causal_transform_sampled_report(f: &SampledComplexFunction, omegas: &[f64], opts: &CausalOptions) -> Result<(Vec<Complex>, Vec<f64>)> {
    let scale = f.max_abs();
    for (&t, v) in f.grid().iter().zip(f.values()) {
        if t < 0.0 && v.norm() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NonCausalInput { t, magnitude: v.norm() });
        }
    }
    if f.hi() <= 0.0 {
        return Err(Error::InvalidGrid("no samples at t > 0".into()));
    }
    let n = f.len();
    let (t_end, f_end) = (f.hi(), f.values()[n - 1]);
    if let Some(k) = opts.exponential_tail {
        if !(k.im > 0.0) {
            return Err(Error::NonIntegrableInput(format!("exponential tail rate {k} must have Im > 0")));
        }
    } else if f.tail().is_none() && f_end.norm() > 1e-8 * scale {
        return Err(Error::NonIntegrableInput(format!(
            "signal is {:e} at the last sample t = {t_end} and no tail is given",
            f_end.norm()
        )));
    }
    let out: Vec<Result<Estimate>> = omegas
        .par_iter()
        .map(|&w| {
            // e^{iωt} = e^{-i(-ω)t}
            let (mut est, _, _) = grid_half_line(f, -w, opts.switch_threshold)?;
            if let Some(k) = opts.exponential_tail {
                est.value += f_end * (I * w * t_end).exp() * I / (w + k);
            } else if let Some(tm) = f.tail() {
                let unit = if w <= 0.0 {
                    tail::fourier(tm.p, t_end, -w)
                } else {
                    tail::fourier(tm.p, t_end, w).conj()
                };
                est.value += tm.right() * unit;
                let delta = (f_end - tm.right() * t_end.powf(-tm.p)).norm();
                est.error += delta * t_end * if w != 0.0 { 2.0 / (w.abs() * t_end).max(1.0) } else { 1.0 };
            } else {
                est.error += f_end.norm() * 2.0 / w.abs().max(1.0 / t_end);
            }
            Ok(est)
        })
        .collect();
    let mut values = Vec::with_capacity(out.len());
    let mut errors = Vec::with_capacity(out.len());
    for e in out {
        let e = e?;
        values.push(e.value);
        errors.push(e.error);
    }
    Ok((values, errors))
}

fn high_frequency_tail(f: &SampledComplexFunction) -> Result<Option<TailModel>> {
    let g = f.grid();
    let v = f.values();
    let j = g.partition_point(|&t| t < 0.0);
    if g.len() - j < 3 {
        return Ok(None);
    }
    let f0 = f.interpolate(0.0).unwrap_or(v[j]);
    let scale = f.max_abs();
    if f0.norm() > 1e-10 * scale {
        return Ok(Some(TailModel::new(1.0, I * f0)?));
    }
    let xs = [0.0, g[j + 1].max(g[j]), g[j + 2]];
    let ys = [f0, v[j + 1], v[j + 2]];
    let d = super::sampled::lagrange_derivative(&xs, &ys, 0.0);
    Ok(Some(TailModel::new(2.0, -d)?))
}
