use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::ensemble_time::PreparationScheme;
use crate::error::{Error, Result};
use crate::hardy_core::analytic::{AnalyticModel, HalfPlane};
use crate::hardy_core::causal::CausalSignal;
use crate::numerics::Complex;
use crate::quantum_states::LorentzianSpec;
use crate::transition::{AmplitudeOptions, SElement, SMatrixModel};

use super::Format;

/// Reads a JSON config, filling absent fields from the defaults.
pub(crate) fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

pub(crate) fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

pub(crate) fn set_opt<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KkConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub half_plane: HalfPlane,
    /// Largest accepted round-trip residual.
    pub tolerance: f64,
    /// Absolute tolerance of the tail truncation estimate.
    pub abs_tol: f64,
}

impl Default for KkConfig {
    fn default() -> Self {
        KkConfig {
            input: None,
            output: None,
            half_plane: HalfPlane::Upper,
            tolerance: 1e-3,
            abs_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CausalConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub signal: Option<CausalSignal>,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub switch_threshold: f64,
    /// Rate `κ` of an exponential continuation `e^{iκt}` of the samples.
    pub exponential_tail: Option<Complex>,
    pub format: Format,
}

impl Default for CausalConfig {
    fn default() -> Self {
        CausalConfig {
            input: None,
            output: None,
            signal: None,
            omega_min: -20.0,
            omega_max: 20.0,
            omega_points: 81,
            switch_threshold: crate::numerics::OscillatorySpec::DEFAULT_SWITCH,
            exponential_tail: None,
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardyCheckConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub model: Option<AnalyticModel>,
    pub half_plane: HalfPlane,
    pub offsets: Vec<f64>,
}

impl Default for HardyCheckConfig {
    fn default() -> Self {
        HardyCheckConfig {
            input: None,
            output: None,
            model: None,
            half_plane: HalfPlane::Upper,
            offsets: vec![0.1, 1.0, 10.0],
        }
    }
}

fn reference_spec() -> LorentzianSpec {
    LorentzianSpec::single(2.0, 1.0, Complex::new(1.0, 0.0))
}

fn broad_spec() -> LorentzianSpec {
    LorentzianSpec::single(2.0, 5.0, Complex::new(1.0, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub output: Option<PathBuf>,
    pub spec: LorentzianSpec,
    pub observable: bool,
    pub t: f64,
    /// Points of the emitted energy distribution on `[0, e_max]`.
    pub distribution_points: Option<usize>,
    pub e_max: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            output: None,
            spec: reference_spec(),
            observable: false,
            t: 0.0,
            distribution_points: None,
            e_max: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    pub output: Option<PathBuf>,
    pub state: LorentzianSpec,
    pub observable: LorentzianSpec,
    pub smatrix: SMatrixModel,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub amplitude: AmplitudeOptions,
    pub fit: bool,
    pub fit_lo: f64,
    pub fit_hi: f64,
    pub format: Format,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            output: None,
            state: broad_spec(),
            observable: broad_spec(),
            smatrix: SMatrixModel::single(0, SElement::resonance(2.0, 0.2).expect("valid resonance")).expect("valid channel"),
            t_min: 0.0,
            t_max: 40.0,
            t_points: 161,
            amplitude: AmplitudeOptions::default(),
            fit: false,
            fit_lo: 5.0,
            fit_hi: 30.0,
            format: Format::Csv,
        }
    }
}

impl DecayConfig {
    pub fn times(&self) -> Result<Vec<f64>> {
        if let Some(&t) = [self.t_min, self.t_max].iter().find(|t| !(**t >= 0.0)) {
            return Err(Error::NegativeTime(t));
        }
        if self.t_max < self.t_min || self.t_points == 0 {
            return Err(Error::InvalidValue("time range needs t_max >= t_min and at least one point".into()));
        }
        if self.t_points == 1 || self.t_max == self.t_min {
            return Ok(vec![self.t_min]);
        }
        Ok(crate::hardy_core::sampled::uniform_grid(self.t_min, self.t_max, self.t_points))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub output: Option<PathBuf>,
    pub survival: Option<PathBuf>,
    pub rate: f64,
    /// Ensemble size; the default is single-ion scale.
    pub n: usize,
    pub scheme: PreparationScheme,
    pub seed: u64,
    pub format: Format,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            output: None,
            survival: None,
            rate: 0.2,
            n: 150,
            scheme: PreparationScheme::Simultaneous { t0: 0.0 },
            seed: 2024,
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub output: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub theory: Option<PathBuf>,
    pub rate: Option<f64>,
    /// Grid of the exponential theory.
    pub t_grid: Vec<f64>,
    pub threshold: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            output: None,
            events: None,
            theory: None,
            rate: None,
            t_grid: (0..=20).map(|k| k as f64 * 0.5).collect(),
            threshold: 3.0,
        }
    }
}
