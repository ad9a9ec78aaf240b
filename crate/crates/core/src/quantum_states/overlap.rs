//! Half-line integrals `∫_0^∞ e^{-iET} Π_k g_k(E) dE` of products of
//! closed-form and sampled factors.

use crate::error::{Error, Result};
use crate::hardy_core::function::ComplexFunction;
use crate::hardy_core::sampled::{SampledComplexFunction, TailModel};
use crate::numerics::oscillatory::sampled_half_line;
use crate::numerics::{Complex, Estimate, OscillatoryInput, OscillatorySpec, PoleExpansion};

/// One factor of a half-line integrand.
#[derive(Debug, Clone)]
pub enum Factor {
    Rational(PoleExpansion),
    Sampled(SampledComplexFunction),
    /// Samples continued by a constant beyond the last node.
    Bounded(SampledComplexFunction, Complex),
}

impl Factor {
    pub fn of(f: &ComplexFunction) -> Factor {
        match f {
            ComplexFunction::Analytic(m) => Factor::Rational(m.expansion()),
            ComplexFunction::Sampled(s) => Factor::Sampled(s.clone()),
        }
    }

    pub fn conj(&self) -> Factor {
        match self {
            Factor::Rational(e) => Factor::Rational(e.conj()),
            Factor::Sampled(s) => Factor::Sampled(s.conj()),
            Factor::Bounded(s, c) => Factor::Bounded(s.conj(), c.conj()),
        }
    }

    /// Value at real `x`, using the tail model beyond a sampled grid.
    pub fn eval(&self, x: f64) -> Option<Complex> {
        match self {
            Factor::Rational(e) => Some(e.eval(Complex::new(x, 0.0))),
            Factor::Sampled(s) => s.interpolate(x).or_else(|| {
                let tm = s.tail()?;
                if x > s.hi() {
                    Some(tm.right() * x.powf(-tm.p))
                } else {
                    None
                }
            }),
            Factor::Bounded(s, c) => s.interpolate(x).or(if x > s.hi() { Some(*c) } else { None }),
        }
    }

    fn asymptotic(&self) -> Option<(f64, Complex)> {
        match self {
            Factor::Rational(e) => Some(e.asymptotic()),
            Factor::Sampled(s) => s.tail().map(|t| (t.p, t.right())),
            Factor::Bounded(_, c) => Some((0.0, *c)),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Factor::Rational(e) => e.is_zero(),
            Factor::Sampled(s) => s.is_zero(),
            Factor::Bounded(s, c) => s.is_zero() && c.norm() == 0.0,
        }
    }
}

/// Product of closed-form factors.
pub fn rational_product(factors: &[PoleExpansion]) -> PoleExpansion {
    factors.iter().fold(PoleExpansion::constant(Complex::new(1.0, 0.0)), |acc, f| acc.mul(f))
}

/// Samples the product on `grid`, with the product of the tail models.
pub fn sample_product(factors: &[Factor], grid: &[f64]) -> Result<SampledComplexFunction> {
    let mut values = Vec::with_capacity(grid.len());
    for &x in grid {
        let mut v = Complex::new(1.0, 0.0);
        for f in factors {
            v *= f.eval(x).ok_or_else(|| Error::InvalidGrid(format!("factor is not defined at E = {x}")))?;
        }
        values.push(v);
    }
    let mut p = 0.0;
    let mut c = Complex::new(1.0, 0.0);
    let mut tail = true;
    for f in factors {
        match f.asymptotic() {
            Some((pk, ck)) => {
                p += pk;
                c *= ck;
            }
            None => tail = false,
        }
    }
    let tail = if tail && c.norm() > 0.0 {
        if p <= 0.5 {
            return Err(Error::NonDecayingIntegrand(format!("product decays like E^-{p}")));
        }
        Some(TailModel::new(p, c)?)
    } else {
        None
    };
    SampledComplexFunction::new(grid.to_vec(), values, tail)
}

/// `∫_0^∞ e^{-iET} Π g_k(E) dE` for real `T` of either sign.
///
/// All-rational products are integrated exactly; otherwise the product
/// is sampled on the grid of the first sampled factor. `quadrature_grid`
/// forces the sampled route for all-rational products.
pub fn half_line_product(factors: &[Factor], big_t: f64, threshold: f64, quadrature_grid: Option<&[f64]>) -> Result<Estimate> {
    if factors.iter().any(Factor::is_zero) {
        return Ok(Estimate::new(Complex::new(0.0, 0.0), 0.0));
    }
    let sampled_grid = factors.iter().find_map(|f| match f {
        Factor::Sampled(s) => Some(s.grid().to_vec()),
        Factor::Rational(_) | Factor::Bounded(..) => None,
    });
    match sampled_grid.or_else(|| quadrature_grid.map(<[f64]>::to_vec)) {
        None if factors.iter().any(|f| matches!(f, Factor::Bounded(..))) => {
            Err(Error::InvalidSpec("a sampled factor without its own grid needs a quadrature grid".into()))
        }
        None => {
            let exps: Vec<PoleExpansion> = factors
                .iter()
                .map(|f| match f {
                    Factor::Rational(e) => e.clone(),
                    _ => unreachable!("no sampled factors on this route"),
                })
                .collect();
            let e = rational_product(&exps);
            // ∫ e^{-iET} g = conj ∫ e^{-iE|T|} ḡ for T < 0
            if big_t >= 0.0 {
                crate::numerics::oscillatory_integral(OscillatoryInput::Expansion(&e), &OscillatorySpec::new(big_t, threshold)?)
            } else {
                let est = crate::numerics::oscillatory_integral(OscillatoryInput::Expansion(&e.conj()), &OscillatorySpec::new(-big_t, threshold)?)?;
                Ok(Estimate::new(est.value.conj(), est.error))
            }
        }
        Some(grid) => {
            let g = sample_product(factors, &grid)?;
            if big_t == 0.0 {
                if let Some(tm) = g.tail() {
                    if tm.p <= 1.0 {
                        return Err(Error::NonDecayingIntegrand(format!("product decays like E^-{}", tm.p)));
                    }
                }
            }
            sampled_half_line(&g, big_t, threshold)
        }
    }
}
