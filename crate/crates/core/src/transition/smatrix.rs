use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy_core::sampled::SampledComplexFunction;
use crate::numerics::{Complex, PoleExpansion, I};
use crate::quantum_states::channel::Channel;
use crate::quantum_states::overlap::Factor;

/// Real phase shift `δ(E)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseShift {
    Constant(f64),
    /// Sampled on `E ≥ 0`; held at its last value beyond the grid.
    Sampled {
        energy: Vec<f64>,
        delta: Vec<f64>,
    },
}

/// One S-matrix element `S(E)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum SElement {
    Unit,
    /// `background + r/(E - E_R + iΓ/2)`.
    ///
    /// The residue defaults to `-iΓ·background`, which makes `|S| = 1` on
    /// the real axis.
    ResonancePole {
        e_r: f64,
        gamma: f64,
        #[serde(default = "one")]
        background: Complex,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        residue: Option<Complex>,
    },
    /// `S = e^{2iδ(E)}`.
    PhaseShift {
        delta: PhaseShift,
    },
}

fn one() -> Complex {
    Complex::new(1.0, 0.0)
}

impl SElement {
    pub fn resonance(e_r: f64, gamma: f64) -> Result<Self> {
        let s = SElement::ResonancePole {
            e_r,
            gamma,
            background: one(),
            residue: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SElement::Unit => Ok(()),
            SElement::ResonancePole {
                e_r,
                gamma,
                background,
                residue,
            } => {
                if !(e_r.is_finite() && *e_r > 0.0) {
                    return Err(Error::InvalidSpec(format!("resonance energy must be > 0, got {e_r}")));
                }
                if !(gamma.is_finite() && *gamma > 0.0) {
                    return Err(Error::InvalidSpec(format!("resonance width must be > 0, got {gamma}")));
                }
                let finite = |z: &Complex| z.re.is_finite() && z.im.is_finite();
                if !finite(background) || residue.as_ref().is_some_and(|r| !finite(r)) {
                    return Err(Error::InvalidSpec("resonance parameters must be finite".into()));
                }
                Ok(())
            }
            SElement::PhaseShift { delta } => match delta {
                PhaseShift::Constant(d) if d.is_finite() => Ok(()),
                PhaseShift::Constant(d) => Err(Error::InvalidSpec(format!("phase shift {d} is not finite"))),
                PhaseShift::Sampled { energy, delta } => {
                    if energy.len() != delta.len() {
                        return Err(Error::InvalidSpec("phase-shift grid and values differ in length".into()));
                    }
                    if delta.iter().any(|d| !d.is_finite()) {
                        return Err(Error::InvalidSpec("phase shift is not finite".into()));
                    }
                    self.sampled().map(|_| ())
                }
            },
        }
    }

    /// Closed form of `S`, when it has one.
    pub fn expansion(&self) -> Option<PoleExpansion> {
        match self {
            SElement::Unit => Some(PoleExpansion::constant(one())),
            SElement::ResonancePole {
                e_r,
                gamma,
                background,
                residue,
            } => {
                let r = residue.unwrap_or(-I * *gamma * *background);
                Some(PoleExpansion::constant(*background).add(&PoleExpansion::simple_pole(r, Complex::new(*e_r, -gamma / 2.0))))
            }
            SElement::PhaseShift {
                delta: PhaseShift::Constant(d),
            } => Some(PoleExpansion::constant((2.0 * I * *d).exp())),
            SElement::PhaseShift { .. } => None,
        }
    }

    fn sampled(&self) -> Result<Option<SampledComplexFunction>> {
        match self {
            SElement::PhaseShift {
                delta: PhaseShift::Sampled { energy, delta },
            } => {
                let vals = delta.iter().map(|d| (2.0 * I * *d).exp()).collect();
                Ok(Some(SampledComplexFunction::new(energy.clone(), vals, None)?))
            }
            _ => Ok(None),
        }
    }

    pub fn eval(&self, e: f64) -> Complex {
        match self.expansion() {
            Some(x) => x.eval(Complex::new(e, 0.0)),
            None => self.factor().eval(e).unwrap_or(Complex::new(f64::NAN, f64::NAN)),
        }
    }

    pub(crate) fn factor(&self) -> Factor {
        match self.expansion() {
            Some(x) => Factor::Rational(x),
            None => {
                let s = self.sampled().ok().flatten().expect("validated phase-shift samples");
                let limit = s.values()[s.len() - 1];
                Factor::Bounded(s, limit)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SChannel {
    pub l: i64,
    /// `None` applies the element to every `ℓ₃` of this `ℓ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l3: Option<i64>,
    #[serde(flatten)]
    pub element: SElement,
}

/// Channel-indexed S-matrix; channels not listed are `S = 1`.
///
/// Elements may depend on `ℓ₃`, although an entry without `l3` (the
/// rotationally invariant case) is the usual configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawSMatrix")]
pub struct SMatrixModel {
    channels: Vec<SChannel>,
}

#[derive(Deserialize)]
struct RawSMatrix {
    #[serde(default)]
    channels: Vec<SChannel>,
}

impl TryFrom<RawSMatrix> for SMatrixModel {
    type Error = Error;

    fn try_from(r: RawSMatrix) -> Result<Self> {
        SMatrixModel::new(r.channels)
    }
}

impl SMatrixModel {
    pub fn new(channels: Vec<SChannel>) -> Result<Self> {
        for c in &channels {
            if c.l < 0 || c.l3.is_some_and(|m| m.abs() > c.l) {
                return Err(Error::IncompatibleChannels {
                    l: c.l,
                    l3: c.l3.unwrap_or(0),
                });
            }
            c.element.validate()?;
        }
        for (i, a) in channels.iter().enumerate() {
            if channels[..i].iter().any(|b| b.l == a.l && b.l3 == a.l3) {
                return Err(Error::InvalidSpec(format!("S-matrix channel l = {} is listed twice", a.l)));
            }
        }
        Ok(SMatrixModel { channels })
    }

    pub fn unit() -> Self {
        SMatrixModel::default()
    }

    /// The same element in every channel.
    pub fn uniform(element: SElement) -> Result<Self> {
        element.validate()?;
        Ok(SMatrixModel {
            channels: (0..=64)
                .map(|l| SChannel {
                    l,
                    l3: None,
                    element: element.clone(),
                })
                .collect(),
        })
    }

    /// Single element for all `ℓ₃` of one `ℓ`.
    pub fn single(l: i64, element: SElement) -> Result<Self> {
        SMatrixModel::new(vec![SChannel { l, l3: None, element }])
    }

    pub fn channels(&self) -> &[SChannel] {
        &self.channels
    }

    pub fn element(&self, ch: Channel) -> SElement {
        self.channels
            .iter()
            .find(|c| c.l == ch.l && c.l3 == Some(ch.l3))
            .or_else(|| self.channels.iter().find(|c| c.l == ch.l && c.l3.is_none()))
            .map_or(SElement::Unit, |c| c.element.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
