use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy_core::analytic::AnalyticModel;
use crate::numerics::Complex;

use super::channel::Channel;
use super::wave::{ChannelEntry, EnergyWaveFunction, WaveKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub l: i64,
    pub l3: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl Coefficient {
    pub fn value(&self) -> Complex {
        Complex::new(self.re, self.im)
    }
}

/// Breit–Wigner line shape with peak `a`, width `b` and channel weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzianSpec {
    pub a: f64,
    pub b: f64,
    pub coefficients: Vec<Coefficient>,
}

impl LorentzianSpec {
    pub fn single(a: f64, b: f64, c: Complex) -> Self {
        LorentzianSpec {
            a,
            b,
            coefficients: vec![Coefficient {
                l: 0,
                l3: 0,
                re: c.re,
                im: c.im,
            }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidSpec(format!("peak energy a must be > 0, got {}", self.a)));
        }
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(Error::InvalidSpec(format!("width b must be > 0, got {}", self.b)));
        }
        if self.coefficients.is_empty() {
            return Err(Error::InvalidSpec("no channel coefficients".into()));
        }
        for c in &self.coefficients {
            Channel::new(c.l, c.l3)?;
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidSpec(format!("coefficient of ({}, {}) is not finite", c.l, c.l3)));
            }
        }
        if self.coefficients.iter().all(|c| c.value().norm() == 0.0) {
            return Err(Error::InvalidSpec("all coefficients vanish".into()));
        }
        let mut seen: Vec<(i64, i64)> = self.coefficients.iter().map(|c| (c.l, c.l3)).collect();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpec("a channel is listed twice".into()));
        }
        Ok(())
    }

    /// `∫_0^∞ dE / ((E - a)² + (b/2)²)`.
    pub fn line_shape_integral(&self) -> f64 {
        (2.0 / self.b) * (FRAC_PI_2 + (2.0 * self.a / self.b).atan())
    }

    /// Coefficients rescaled to unit total weight on `(0, ∞)`.
    pub fn normalized_coefficients(&self) -> Result<Vec<(Channel, Complex)>> {
        self.validate()?;
        let total: f64 = self.coefficients.iter().map(|c| c.value().norm_sqr()).sum::<f64>() * self.line_shape_integral();
        let s = total.sqrt();
        self.coefficients.iter().map(|c| Ok((Channel::new(c.l, c.l3)?, c.value() / s))).collect()
    }
}

/// `φ⁺(E) = C/(E - (a + ib/2))` per channel, normalized.
pub fn make_lorentzian_state(spec: &LorentzianSpec) -> Result<EnergyWaveFunction> {
    build(spec, WaveKind::State, Complex::new(spec.a, spec.b / 2.0))
}

/// `ψ⁻(E) = C'/(E - (a' - ib'/2))` per channel, normalized.
pub fn make_lorentzian_observable(spec: &LorentzianSpec) -> Result<EnergyWaveFunction> {
    build(spec, WaveKind::Observable, Complex::new(spec.a, -spec.b / 2.0))
}

fn build(spec: &LorentzianSpec, kind: WaveKind, pole: Complex) -> Result<EnergyWaveFunction> {
    let entries = spec
        .normalized_coefficients()?
        .into_iter()
        .map(|(ch, c)| Ok(ChannelEntry::new(ch, AnalyticModel::simple_pole(c, pole)?)))
        .collect::<Result<Vec<_>>>()?;
    EnergyWaveFunction::new(kind, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy_core::sampled::uniform_grid;
    use crate::quantum_states::wave::energy_distribution;

    #[test]
    fn normalization_of_the_reference_state() {
        let w = make_lorentzian_state(&LorentzianSpec::single(2.0, 1.0, Complex::new(1.0, 0.0))).unwrap();
        let c = w.channels()[0].function.as_analytic().unwrap().expansion().terms[0].coefficient;
        let expected = 1.0 / (std::f64::consts::PI + 2.0 * 4f64.atan());
        assert!((c.norm_sqr() - expected).abs() < 1e-15);
        let (_, norm) = energy_distribution(&w, &[1.0]).unwrap();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs() {
        let mut s = LorentzianSpec::single(2.0, 0.0, Complex::new(1.0, 0.0));
        assert!(matches!(make_lorentzian_state(&s), Err(Error::InvalidSpec(_))));
        s.b = 1.0;
        s.coefficients.clear();
        assert!(matches!(make_lorentzian_observable(&s), Err(Error::InvalidSpec(_))));
        s.coefficients.push(Coefficient {
            l: 1,
            l3: 3,
            re: 1.0,
            im: 0.0,
        });
        assert!(matches!(make_lorentzian_state(&s), Err(Error::IncompatibleChannels { .. })));
    }

    #[test]
    fn equal_weights_split_the_distribution() {
        let spec = LorentzianSpec {
            a: 2.0,
            b: 1.0,
            coefficients: vec![
                Coefficient {
                    l: 0,
                    l3: 0,
                    re: 1.0,
                    im: 0.0,
                },
                Coefficient {
                    l: 1,
                    l3: -1,
                    re: 0.0,
                    im: 1.0,
                },
            ],
        };
        let w = make_lorentzian_state(&spec).unwrap();
        let grid = uniform_grid(0.0, 10.0, 11);
        for e in w.channels() {
            let single = EnergyWaveFunction::new(WaveKind::State, vec![e.clone()]).unwrap();
            let (_, n) = energy_distribution(&single, &grid).unwrap();
            assert!((n - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn observable_pole_mirrors_the_state() {
        let s = LorentzianSpec::single(2.0, 1.0, Complex::new(1.0, 0.0));
        let o = make_lorentzian_observable(&s).unwrap();
        let p = o.channels()[0].function.as_analytic().unwrap().poles()[0];
        assert_eq!(p, Complex::new(2.0, -0.5));
    }

    #[test]
    fn spec_json() {
        let s: LorentzianSpec = serde_json::from_str(r#"{"a": 2, "b": 1, "coefficients": [{"l": 0, "l3": 0, "re": 1, "im": 0}]}"#).unwrap();
        assert_eq!(s, LorentzianSpec::single(2.0, 1.0, Complex::new(1.0, 0.0)));
    }
}
