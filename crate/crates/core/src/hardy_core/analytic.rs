use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Complex, PoleExpansion, I};

/// Half-plane of analyticity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfPlane {
    /// Analytic for `Im z > 0`: Hardy from above.
    Upper,
    /// Analytic for `Im z < 0`: Hardy from below.
    Lower,
}

impl HalfPlane {
    pub fn conjugate(self) -> HalfPlane {
        match self {
            HalfPlane::Upper => HalfPlane::Lower,
            HalfPlane::Lower => HalfPlane::Upper,
        }
    }

    /// `+1` for Upper, `-1` for Lower.
    pub fn sign(self) -> f64 {
        match self {
            HalfPlane::Upper => 1.0,
            HalfPlane::Lower => -1.0,
        }
    }

    pub fn contains(self, z: Complex) -> bool {
        self.sign() * z.im > 0.0
    }

    /// Class of a simple pole at `pole`: analytic on the side it avoids.
    pub fn of_pole(pole: Complex) -> Option<HalfPlane> {
        if pole.im > 0.0 {
            Some(HalfPlane::Lower)
        } else if pole.im < 0.0 {
            Some(HalfPlane::Upper)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplePole {
    pub coefficient: Complex,
    pub pole: Complex,
}

/// Closed-form Hardy-function families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum AnalyticModel {
    /// `C / (z - pole)`.
    SimplePole(SimplePole),
    /// `a / (a² + (b - iz)²)`, the causal transform of `θ(t) e^{-bt} sin(at)`.
    DampedSine {
        a: f64,
        b: f64,
    },
    RationalSum {
        terms: Vec<SimplePole>,
    },
}

impl AnalyticModel {
    pub fn simple_pole(coefficient: Complex, pole: Complex) -> Result<Self> {
        let m = AnalyticModel::SimplePole(SimplePole { coefficient, pole });
        m.validate()?;
        Ok(m)
    }

    pub fn damped_sine(a: f64, b: f64) -> Result<Self> {
        let m = AnalyticModel::DampedSine { a, b };
        m.validate()?;
        Ok(m)
    }

    pub fn rational_sum(terms: Vec<SimplePole>) -> Result<Self> {
        let m = AnalyticModel::RationalSum { terms };
        m.validate()?;
        Ok(m)
    }

    pub fn zero() -> Self {
        AnalyticModel::RationalSum { terms: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |t: &SimplePole| -> Result<()> {
            let finite = |z: Complex| z.re.is_finite() && z.im.is_finite();
            if !finite(t.coefficient) || !finite(t.pole) {
                return Err(Error::InvalidValue("pole parameters must be finite".into()));
            }
            if t.pole.im == 0.0 {
                return Err(Error::InvalidValue(format!("pole {} lies on the real axis", t.pole)));
            }
            Ok(())
        };
        match self {
            AnalyticModel::SimplePole(t) => check(t),
            AnalyticModel::DampedSine { a, b } => {
                if !(b.is_finite() && *b > 0.0) || !a.is_finite() {
                    return Err(Error::InvalidValue(format!("damped sine needs finite a and b > 0, got a = {a}, b = {b}")));
                }
                Ok(())
            }
            AnalyticModel::RationalSum { terms } => terms.iter().try_for_each(check),
        }
    }

    /// Partial-fraction form.
    pub fn expansion(&self) -> PoleExpansion {
        match self {
            AnalyticModel::SimplePole(t) => PoleExpansion::simple_pole(t.coefficient, t.pole),
            AnalyticModel::DampedSine { a, b } => {
                if *a == 0.0 {
                    return PoleExpansion::zero();
                }
                // a/(a² + (b - iz)²) = -½/(z - (a - ib)) + ½/(z - (-a - ib))
                let half = Complex::new(0.5, 0.0);
                PoleExpansion::simple_pole(-half, Complex::new(*a, -b)).add(&PoleExpansion::simple_pole(half, Complex::new(-a, -b)))
            }
            AnalyticModel::RationalSum { terms } => terms.iter().fold(PoleExpansion::zero(), |acc, t| {
                acc.add(&PoleExpansion::simple_pole(t.coefficient, t.pole))
            }),
        }
    }

    pub fn eval(&self, z: Complex) -> Complex {
        match self {
            AnalyticModel::DampedSine { a, b } => {
                let d = Complex::new(*b, 0.0) - I * z;
                *a / (a * a + d * d)
            }
            _ => self.expansion().eval(z),
        }
    }

    pub fn poles(&self) -> Vec<Complex> {
        self.expansion().poles().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.expansion().terms.is_empty()
    }

    /// True when no pole lies in the closed half-plane `hp`.
    pub fn is_analytic_in(&self, hp: HalfPlane) -> bool {
        self.poles().iter().all(|&p| hp.sign() * p.im < 0.0)
    }

    /// The half-plane of analyticity, when there is exactly one.
    pub fn half_plane(&self) -> Option<HalfPlane> {
        match (self.is_analytic_in(HalfPlane::Upper), self.is_analytic_in(HalfPlane::Lower)) {
            (true, false) => Some(HalfPlane::Upper),
            (false, true) => Some(HalfPlane::Lower),
            _ => None,
        }
    }

    /// `z ↦ conj(f(conj z))`, which conjugates the real-axis values.
    pub fn conj(&self) -> AnalyticModel {
        match self {
            AnalyticModel::SimplePole(t) => AnalyticModel::SimplePole(SimplePole {
                coefficient: t.coefficient.conj(),
                pole: t.pole.conj(),
            }),
            AnalyticModel::RationalSum { terms } => AnalyticModel::RationalSum {
                terms: terms
                    .iter()
                    .map(|t| SimplePole {
                        coefficient: t.coefficient.conj(),
                        pole: t.pole.conj(),
                    })
                    .collect(),
            },
            AnalyticModel::DampedSine { .. } => AnalyticModel::RationalSum {
                terms: self
                    .expansion()
                    .conj()
                    .terms
                    .iter()
                    .map(|t| SimplePole {
                        coefficient: t.coefficient,
                        pole: t.pole,
                    })
                    .collect(),
            },
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: AnalyticModel = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn pole_location_determines_class() {
        let lower = AnalyticModel::simple_pole(c(1.0, 0.0), c(2.0, 0.5)).unwrap();
        assert_eq!(lower.half_plane(), Some(HalfPlane::Lower));
        assert_eq!(lower.conj().half_plane(), Some(HalfPlane::Upper));
        assert_eq!(AnalyticModel::damped_sine(2.0, 1.0).unwrap().half_plane(), Some(HalfPlane::Upper));
        assert!(AnalyticModel::simple_pole(c(1.0, 0.0), c(2.0, 0.0)).is_err());
        assert!(AnalyticModel::damped_sine(2.0, 0.0).is_err());
    }

    #[test]
    fn damped_sine_expansion_matches_closed_form() {
        let m = AnalyticModel::damped_sine(2.0, 1.0).unwrap();
        let e = m.expansion();
        for w in [-3.0, 0.0, 0.7, 5.0] {
            let z = c(w, 0.3);
            assert!((e.eval(z) - m.eval(z)).norm() < 1e-14);
        }
        assert!(AnalyticModel::damped_sine(0.0, 1.0).unwrap().is_zero());
    }

    #[test]
    fn conj_conjugates_boundary_values() {
        let m = AnalyticModel::damped_sine(1.5, 0.4).unwrap();
        let mc = m.conj();
        for w in [-2.0, 0.1, 3.0] {
            assert!((mc.eval(c(w, 0.0)) - m.eval(c(w, 0.0)).conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn json_shape_and_round_trip() {
        let m = AnalyticModel::simple_pole(c(0.1, 1.0 / 3.0), c(2.0, 0.5)).unwrap();
        let s = m.to_json().unwrap();
        assert!(s.contains("\"kind\":\"SimplePole\"") && s.contains("\"params\""));
        assert_eq!(AnalyticModel::from_json(&s).unwrap(), m);
        let d = AnalyticModel::damped_sine(2.0, 1.0).unwrap();
        assert_eq!(AnalyticModel::from_json(&d.to_json().unwrap()).unwrap(), d);
    }
}
