use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy_core::analytic::{AnalyticModel, HalfPlane};
use crate::hardy_core::criterion::{analytic_line_integral, hardy_criterion, CriterionConfig, CriterionReport};
use crate::hardy_core::function::ComplexFunction;
use crate::numerics::quadrature::adaptive_simpson_raw;
use crate::numerics::{Complex, QuadratureSpec, I};

use super::channel::Channel;
use super::overlap::{half_line_product, Factor};

/// Offsets of the construction-time Hardy check.
pub const CONSTRUCTION_OFFSETS: [f64; 2] = [0.1, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    /// Prepared state `φ⁺`, Hardy from below.
    State,
    /// Registered observable `ψ⁻`, Hardy from above.
    Observable,
}

impl WaveKind {
    pub fn half_plane(self) -> HalfPlane {
        match self {
            WaveKind::State => HalfPlane::Lower,
            WaveKind::Observable => HalfPlane::Upper,
        }
    }

    pub fn flipped(self) -> WaveKind {
        match self {
            WaveKind::State => WaveKind::Observable,
            WaveKind::Observable => WaveKind::State,
        }
    }
}

/// One channel of an energy wave function: `e^{-iEτ} f(E)` for `E > 0`.
///
/// Time evolution only moves `τ`; the base function is never resampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelEntry {
    #[serde(flatten)]
    pub channel: Channel,
    #[serde(flatten)]
    pub function: ComplexFunction,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub time_shift: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl ChannelEntry {
    pub fn new(channel: Channel, function: impl Into<ComplexFunction>) -> Self {
        ChannelEntry {
            channel,
            function: function.into(),
            time_shift: 0.0,
        }
    }

    /// Value at energy `e`; zero where a sampled function has no data.
    pub fn eval(&self, e: f64) -> Complex {
        let phase = (-I * e * self.time_shift).exp();
        match &self.function {
            ComplexFunction::Analytic(m) => phase * m.eval(Complex::new(e, 0.0)),
            ComplexFunction::Sampled(_) => Factor::of(&self.function).eval(e).map_or(Complex::new(0.0, 0.0), |v| phase * v),
        }
    }

    /// `∫_0^∞ |f|² dE`.
    pub fn norm_sq(&self) -> Result<f64> {
        let f = Factor::of(&self.function);
        Ok(
            half_line_product(&[f.conj(), f], 0.0, crate::numerics::OscillatorySpec::DEFAULT_SWITCH, None)?
                .value
                .re,
        )
    }

    /// Hardy check of `e^{-izτ} f(z)`: the criterion of `f` scaled by `e^{2yτ}` on `Im z = y`.
    pub fn hardy_check(&self, hp: HalfPlane, offsets: &[f64], cfg: &CriterionConfig) -> Result<CriterionReport> {
        let mut r = hardy_criterion(&self.function, hp, offsets, cfg)?;
        for (v, g) in r.values.iter_mut().zip(offsets) {
            *v *= (2.0 * hp.sign() * g * self.time_shift).exp();
        }
        Ok(r)
    }

    fn conj(&self) -> ChannelEntry {
        ChannelEntry {
            channel: self.channel,
            function: self.function.conj(),
            time_shift: -self.time_shift,
        }
    }
}

/// Channel-indexed energy wave function of a state or an observable.
///
/// An observable `ψ⁻` is expanded over the outgoing basis kets `|E ℓ ℓ₃⁻⟩`.
/// The one printed form of its expansion that carries a `+` on those kets
/// is read as a typo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWave")]
pub struct EnergyWaveFunction {
    kind: WaveKind,
    channels: Vec<ChannelEntry>,
}

#[derive(Deserialize)]
struct RawWave {
    kind: WaveKind,
    channels: Vec<ChannelEntry>,
}

impl TryFrom<RawWave> for EnergyWaveFunction {
    type Error = Error;

    fn try_from(r: RawWave) -> Result<Self> {
        EnergyWaveFunction::new(r.kind, r.channels)
    }
}

impl EnergyWaveFunction {
    /// Validates channels and runs the Hardy check at
    /// [`CONSTRUCTION_OFFSETS`] for the half-plane of `kind`.
    pub fn new(kind: WaveKind, channels: Vec<ChannelEntry>) -> Result<Self> {
        Self::with_config(kind, channels, &CriterionConfig::default())
    }

    pub fn with_config(kind: WaveKind, mut channels: Vec<ChannelEntry>, cfg: &CriterionConfig) -> Result<Self> {
        for e in &channels {
            e.channel.validate()?;
            if !e.time_shift.is_finite() {
                return Err(Error::InvalidValue("time shift is not finite".into()));
            }
        }
        channels.sort_by_key(|e| e.channel);
        if let Some(w) = channels.windows(2).find(|w| w[0].channel == w[1].channel) {
            return Err(Error::InvalidSpec(format!(
                "channel ({}, {}) is listed twice",
                w[0].channel.l, w[0].channel.l3
            )));
        }
        for e in &channels {
            let r = e.hardy_check(kind.half_plane(), &CONSTRUCTION_OFFSETS, cfg)?;
            if !r.passed {
                return Err(Error::InvalidSpec(format!(
                    "channel ({}, {}) fails the Hardy criterion: {}",
                    e.channel.l,
                    e.channel.l3,
                    r.notes.join("; ")
                )));
            }
        }
        Ok(EnergyWaveFunction { kind, channels })
    }

    /// The zero function on the given channels.
    pub fn zero(kind: WaveKind, channels: &[Channel]) -> Self {
        let mut channels: Vec<ChannelEntry> = channels.iter().map(|&c| ChannelEntry::new(c, AnalyticModel::zero())).collect();
        channels.sort_by_key(|e| e.channel);
        channels.dedup_by_key(|e| e.channel);
        EnergyWaveFunction { kind, channels }
    }

    pub fn kind(&self) -> WaveKind {
        self.kind
    }

    pub fn channels(&self) -> &[ChannelEntry] {
        &self.channels
    }

    pub fn channel(&self, c: Channel) -> Option<&ChannelEntry> {
        self.channels.iter().find(|e| e.channel == c)
    }

    pub fn is_zero(&self) -> bool {
        self.channels.iter().all(|e| e.function.is_zero())
    }

    pub fn is_analytic(&self) -> bool {
        self.channels.iter().all(|e| e.function.as_analytic().is_some())
    }

    /// Values of every channel on `grid`.
    pub fn values(&self, grid: &[f64]) -> Vec<(Channel, Vec<Complex>)> {
        self.channels
            .iter()
            .map(|e| (e.channel, grid.iter().map(|&x| e.eval(x)).collect()))
            .collect()
    }

    /// Hardy check of every channel in the half-plane of the kind.
    pub fn hardy_check(&self, offsets: &[f64], cfg: &CriterionConfig) -> Result<Vec<(Channel, CriterionReport)>> {
        self.channels
            .iter()
            .map(|e| Ok((e.channel, e.hardy_check(self.kind.half_plane(), offsets, cfg)?)))
            .collect()
    }

    fn with_shift(&self, dt: f64) -> Self {
        EnergyWaveFunction {
            kind: self.kind,
            channels: self
                .channels
                .iter()
                .map(|e| ChannelEntry {
                    time_shift: e.time_shift + dt,
                    ..e.clone()
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn expect_kind(w: &EnergyWaveFunction, kind: WaveKind) -> Result<()> {
    if w.kind != kind {
        return Err(Error::InvalidSpec(format!("expected a {kind:?} wave function, got {:?}", w.kind)));
    }
    Ok(())
}

/// `f(E) = Σ |value(E)|²` on `grid` and its integral over `(0, ∞)`.
pub fn energy_distribution(w: &EnergyWaveFunction, grid: &[f64]) -> Result<(Vec<f64>, f64)> {
    let dist = grid.iter().map(|&x| w.channels.iter().map(|e| e.eval(x).norm_sqr()).sum()).collect();
    Ok((dist, norm_sq(w)?))
}

/// `Σ ∫_0^∞ |value|² dE`.
pub fn norm_sq(w: &EnergyWaveFunction) -> Result<f64> {
    w.channels.iter().map(ChannelEntry::norm_sq).sum()
}

/// `⟨a|b⟩ = Σ ∫_0^∞ conj(a(E)) b(E) dE` over the shared channels.
pub fn inner_product(a: &EnergyWaveFunction, b: &EnergyWaveFunction) -> Result<Complex> {
    let mut total = Complex::new(0.0, 0.0);
    for ea in &a.channels {
        if let Some(eb) = b.channel(ea.channel) {
            let fs = [Factor::of(&ea.function).conj(), Factor::of(&eb.function)];
            total += half_line_product(&fs, eb.time_shift - ea.time_shift, crate::numerics::OscillatorySpec::DEFAULT_SWITCH, None)?.value;
        }
    }
    Ok(total)
}

/// `‖a - b‖` on `(0, ∞)`.
pub fn distance(a: &EnergyWaveFunction, b: &EnergyWaveFunction) -> Result<f64> {
    let d = norm_sq(a)? + norm_sq(b)? - 2.0 * inner_product(a, b)?.re;
    Ok(d.max(0.0).sqrt())
}

/// `φ⁺(t) = e^{-iEt} φ⁺`, defined for `t ≥ 0` only.
pub fn evolve_state(w: &EnergyWaveFunction, t: f64) -> Result<EnergyWaveFunction> {
    expect_kind(w, WaveKind::State)?;
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    Ok(w.with_shift(t))
}

/// `ψ⁻(t) = e^{iEt} ψ⁻`, defined for `t ≥ 0` only.
pub fn evolve_observable(w: &EnergyWaveFunction, t: f64) -> Result<EnergyWaveFunction> {
    expect_kind(w, WaveKind::Observable)?;
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    Ok(w.with_shift(-t))
}

/// `G(t) = θ(t) e^{-iHt}` applied to a state.
pub fn retarded_propagator(w: &EnergyWaveFunction, t: f64) -> Result<EnergyWaveFunction> {
    if t < 0.0 {
        expect_kind(w, WaveKind::State)?;
        let chans: Vec<Channel> = w.channels.iter().map(|e| e.channel).collect();
        return Ok(EnergyWaveFunction::zero(WaveKind::State, &chans));
    }
    evolve_state(w, t)
}

/// Complex conjugation with the kind flipped.
pub fn conjugate_wave(w: &EnergyWaveFunction) -> EnergyWaveFunction {
    EnergyWaveFunction {
        kind: w.kind.flipped(),
        channels: w.channels.iter().map(ChannelEntry::conj).collect(),
    }
}

/// The state `ψ⁺ = conj(ψ⁻)` an observable jumps into on registration.
pub fn state_jump(obs: &EnergyWaveFunction) -> Result<EnergyWaveFunction> {
    expect_kind(obs, WaveKind::Observable)?;
    Ok(conjugate_wave(obs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub t: f64,
    pub offsets: Vec<f64>,
    /// Quadrature of `∫|e^{-izt} φ⁺(z)|² dx` on `Im z = -γ`.
    pub values: Vec<f64>,
    /// Closed form `e^{2|t|γ} ∫|φ⁺(x - iγ)|² dx`.
    pub predicted: Vec<f64>,
    /// Successive growth ratios of `values`.
    pub ratios: Vec<f64>,
    pub predicted_ratios: Vec<f64>,
    pub diverges: bool,
}

/// Line integrals of the would-be evolved state `e^{-iEt} φ⁺` for `t < 0`.
///
/// The verdict is "diverges" when every successive ratio exceeds one and
/// matches the predicted exponential growth within 10%.
pub fn semigroup_divergence_check(w: &EnergyWaveFunction, t: f64, offsets: &[f64]) -> Result<DivergenceReport> {
    expect_kind(w, WaveKind::State)?;
    if !(t < 0.0) {
        return Err(Error::NonNegativeTime(t));
    }
    if !w.is_analytic() {
        return Err(Error::NonAnalyticInput);
    }
    if let Some(&g) = offsets.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::NonPositiveOffset(g));
    }
    let hp = HalfPlane::Lower;
    let spec = QuadratureSpec::adaptive(1e-300, 1e-10);
    let mut values = vec![0.0; offsets.len()];
    let mut predicted = vec![0.0; offsets.len()];
    for e in &w.channels {
        let m = e.function.as_analytic().expect("checked above");
        let tau = e.time_shift + t;
        for (k, &g) in offsets.iter().enumerate() {
            values[k] += evolved_line_integral(m, tau, g, &spec);
            predicted[k] += (-2.0 * g * tau).exp() * analytic_line_integral(m, hp, g)?;
        }
    }
    let ratio = |v: &[f64]| v.windows(2).map(|w| w[1] / w[0]).collect::<Vec<f64>>();
    let ratios = ratio(&values);
    let predicted_ratios = ratio(&predicted);
    let diverges = !w.is_zero()
        && !ratios.is_empty()
        && ratios
            .iter()
            .zip(&predicted_ratios)
            .all(|(r, p)| r.is_finite() && *r > 1.0 && ((r - p) / p).abs() <= 0.1);
    Ok(DivergenceReport {
        t,
        offsets: offsets.to_vec(),
        values,
        predicted,
        ratios,
        predicted_ratios,
        diverges,
    })
}

/// `∫ |e^{-izτ} m(z)|² dx` along `z = x - iγ`, after `x = s·tan θ`.
fn evolved_line_integral(m: &AnalyticModel, tau: f64, gamma: f64, spec: &QuadratureSpec) -> f64 {
    let s = m.poles().iter().map(|p| p.norm()).fold(1.0, f64::max);
    let f = |th: f64| {
        let (sn, cs) = th.sin_cos();
        let z = Complex::new(s * sn / cs, -gamma);
        Complex::new(((-I * z * tau).exp() * m.eval(z)).norm_sqr() * s / (cs * cs), 0.0)
    };
    let h = std::f64::consts::FRAC_PI_2;
    adaptive_simpson_raw(&f, -h, h, spec).value.re
}
