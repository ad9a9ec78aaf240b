use serde::{Deserialize, Serialize};

use crate::numerics::Complex;

use super::analytic::{AnalyticModel, HalfPlane};
use super::sampled::SampledComplexFunction;

/// A boundary-value function, closed form or sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ComplexFunction {
    #[serde(rename = "model")]
    Analytic(AnalyticModel),
    #[serde(rename = "samples")]
    Sampled(SampledComplexFunction),
}

impl ComplexFunction {
    /// Value on the real axis; `None` outside a sampled grid.
    pub fn eval_real(&self, x: f64) -> Option<Complex> {
        match self {
            ComplexFunction::Analytic(m) => Some(m.eval(Complex::new(x, 0.0))),
            ComplexFunction::Sampled(s) => s.interpolate(x),
        }
    }

    /// Complex conjugation of the boundary values.
    pub fn conj(&self) -> ComplexFunction {
        match self {
            ComplexFunction::Analytic(m) => ComplexFunction::Analytic(m.conj()),
            ComplexFunction::Sampled(s) => ComplexFunction::Sampled(s.conj()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ComplexFunction::Analytic(m) => m.is_zero(),
            ComplexFunction::Sampled(s) => s.is_zero(),
        }
    }

    pub fn as_analytic(&self) -> Option<&AnalyticModel> {
        match self {
            ComplexFunction::Analytic(m) => Some(m),
            ComplexFunction::Sampled(_) => None,
        }
    }
}

impl From<AnalyticModel> for ComplexFunction {
    fn from(m: AnalyticModel) -> Self {
        ComplexFunction::Analytic(m)
    }
}

impl From<SampledComplexFunction> for ComplexFunction {
    fn from(s: SampledComplexFunction) -> Self {
        ComplexFunction::Sampled(s)
    }
}

/// A function tagged with the half-plane it is claimed to be Hardy in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyFunction {
    pub function: ComplexFunction,
    pub half_plane: HalfPlane,
}

impl HardyFunction {
    pub fn new(function: impl Into<ComplexFunction>, half_plane: HalfPlane) -> Self {
        HardyFunction {
            function: function.into(),
            half_plane,
        }
    }
}

/// Conjugates the values and flips the half-plane tag.
pub fn conjugate_hardy(f: &HardyFunction) -> HardyFunction {
    HardyFunction {
        function: f.function.conj(),
        half_plane: f.half_plane.conjugate(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugation_moves_the_pole_and_flips_the_tag() {
        let m = AnalyticModel::simple_pole(Complex::new(0.3, 1.2), Complex::new(2.0, -0.5)).unwrap();
        let f = HardyFunction::new(m, HalfPlane::Upper);
        let g = conjugate_hardy(&f);
        assert_eq!(g.half_plane, HalfPlane::Lower);
        assert_eq!(
            g.function,
            ComplexFunction::Analytic(AnalyticModel::simple_pole(Complex::new(0.3, -1.2), Complex::new(2.0, 0.5)).unwrap())
        );
        assert_eq!(conjugate_hardy(&g), f);
    }

    #[test]
    fn real_zero_function_is_fixed() {
        let f = HardyFunction::new(AnalyticModel::zero(), HalfPlane::Lower);
        let g = conjugate_hardy(&f);
        assert_eq!(g.function, f.function);
        assert_eq!(conjugate_hardy(&g), f);
    }
}
