use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::{adaptive_simpson_raw, trapezoid};
use crate::numerics::{Complex, Estimate, QuadratureSpec, I};

use super::analytic::{AnalyticModel, HalfPlane};
use super::continuation::{titchmarsh_many, CauchyKernel};
use super::fit::{extend_to_full_line, rational_fit};
use super::function::ComplexFunction;
use super::hilbert::dispersion_residual;
use super::sampled::SampledComplexFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionConfig {
    /// Line integrals at or above this are treated as divergent.
    pub bound: f64,
    /// Largest dispersion residual accepted for sampled input.
    pub dispersion_tolerance: f64,
    /// Most poles tried when extending positive-axis data.
    pub fit_poles: usize,
    pub spec: QuadratureSpec,
}

impl Default for CriterionConfig {
    fn default() -> Self {
        CriterionConfig {
            bound: 1e12,
            dispersion_tolerance: 1e-3,
            fit_poles: 4,
            spec: QuadratureSpec::adaptive(1e-8, 1e-3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub half_plane: HalfPlane,
    pub offsets: Vec<f64>,
    /// `∫ |f(x ± iγ)|² dx` per offset.
    pub values: Vec<f64>,
    pub passed: bool,
    /// Hilbert-transform consistency of the boundary values (sampled input).
    pub dispersion_residual: Option<f64>,
    /// Residual of the rational fit used to extend positive-axis data.
    pub fit_residual: Option<f64>,
    pub notes: Vec<String>,
}

/// Line integrals of `|f|²` along `Im z = ±γ` inside `hp` and the verdict.
///
/// Closed-form models are integrated exactly; sampled boundary values are
/// continued off the axis by the Cauchy integral.
pub fn hardy_criterion(f: &ComplexFunction, hp: HalfPlane, offsets: &[f64], cfg: &CriterionConfig) -> Result<CriterionReport> {
    check_offsets(offsets)?;
    match f {
        ComplexFunction::Analytic(m) => analytic_criterion(m, hp, offsets, cfg),
        ComplexFunction::Sampled(s) => sampled_criterion(s, hp, offsets, cfg),
    }
}

fn check_offsets(offsets: &[f64]) -> Result<()> {
    if offsets.is_empty() {
        return Err(Error::InvalidValue("at least one offset is required".into()));
    }
    if let Some(&g) = offsets.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::NonPositiveOffset(g));
    }
    Ok(())
}

/// Exact line integral of an analytic model at offset `γ` inside `hp`.
pub fn analytic_line_integral(m: &AnalyticModel, hp: HalfPlane, gamma: f64) -> Result<f64> {
    if let Some(&pole) = m.poles().iter().find(|p| hp.sign() * p.im > 0.0) {
        return Err(Error::PoleOnContinuationLine { pole });
    }
    m.expansion().shifted(I * hp.sign() * gamma).line_integral_sq()
}

/// The same integral by adaptive quadrature after `x = s·tan θ`.
pub fn numeric_line_integral(m: &AnalyticModel, hp: HalfPlane, gamma: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if let Some(&pole) = m.poles().iter().find(|p| hp.sign() * p.im > 0.0) {
        return Err(Error::PoleOnContinuationLine { pole });
    }
    let y = hp.sign() * gamma;
    let s = m.poles().iter().map(|p| p.norm()).fold(1.0, f64::max);
    let f = |th: f64| {
        let (sn, cs) = th.sin_cos();
        let x = s * sn / cs;
        Complex::new(m.eval(Complex::new(x, y)).norm_sqr() * s / (cs * cs), 0.0)
    };
    let h = std::f64::consts::FRAC_PI_2;
    Ok(adaptive_simpson_raw(&f, -h, h, spec))
}

fn verdict(values: &[f64], offsets: &[f64], bound: f64, slack: f64, notes: &mut Vec<String>) -> bool {
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v < bound)) {
        notes.push(format!("line integral {v:e} is not below the bound {bound:e}"));
        return false;
    }
    let mut order: Vec<usize> = (0..offsets.len()).collect();
    order.sort_by(|&a, &b| offsets[a].total_cmp(&offsets[b]));
    for w in order.windows(2) {
        let (a, b) = (values[w[0]], values[w[1]]);
        if b > a * (1.0 + slack) + 1e-300 {
            notes.push(format!(
                "line integral grows from {a:e} at γ = {} to {b:e} at γ = {}",
                offsets[w[0]], offsets[w[1]]
            ));
            return false;
        }
    }
    true
}

fn analytic_criterion(m: &AnalyticModel, hp: HalfPlane, offsets: &[f64], cfg: &CriterionConfig) -> Result<CriterionReport> {
    let values = offsets.iter().map(|&g| analytic_line_integral(m, hp, g)).collect::<Result<Vec<f64>>>()?;
    let mut notes = Vec::new();
    let passed = verdict(&values, offsets, cfg.bound, 1e-12, &mut notes);
    Ok(CriterionReport {
        half_plane: hp,
        offsets: offsets.to_vec(),
        values,
        passed,
        dispersion_residual: None,
        fit_residual: None,
        notes,
    })
}

fn sampled_criterion(f: &SampledComplexFunction, hp: HalfPlane, offsets: &[f64], cfg: &CriterionConfig) -> Result<CriterionReport> {
    let tail = *f
        .tail()
        .ok_or_else(|| Error::MissingTailModel("continuing sampled data off the axis needs a tail model".into()))?;
    let mut notes = Vec::new();
    let mut fit_residual = None;
    let full = if f.lo() >= 0.0 {
        let fit = rational_fit(f, cfg.fit_poles, 1e-8)?;
        notes.push(format!(
            "negative axis reconstructed from a {}-pole rational fit",
            fit.model.poles().len()
        ));
        fit_residual = Some(fit.residual);
        extend_to_full_line(f, &fit)?
    } else {
        f.clone()
    };
    let kernel = CauchyKernel::new(&full)?;
    let grid = full.grid();
    let mut values = Vec::with_capacity(offsets.len());
    for &g in offsets {
        let y = hp.sign() * g;
        let zs: Vec<Complex> = grid.iter().map(|&x| Complex::new(x, y)).collect();
        let h = titchmarsh_many(&kernel, hp, &zs)?;
        let sq: Vec<Complex> = h.iter().map(|v| Complex::new(v.norm_sqr(), 0.0)).collect();
        let mut v = trapezoid(grid, &sq).re;
        let p2 = 2.0 * tail.p - 1.0;
        if full.hi() > 0.0 {
            v += tail.right().norm_sqr() * full.hi().powf(-p2) / p2;
        }
        if full.lo() < 0.0 {
            v += tail.left().norm_sqr() * (-full.lo()).powf(-p2) / p2;
        }
        values.push(v);
    }
    let mut passed = verdict(&values, offsets, cfg.bound, 1e-3, &mut notes);
    let residual = dispersion_residual(&full, hp, &cfg.spec)?;
    if residual > cfg.dispersion_tolerance {
        notes.push(format!("boundary values violate the dispersion relation (residual {residual:e})"));
        passed = false;
    }
    Ok(CriterionReport {
        half_plane: hp,
        offsets: offsets.to_vec(),
        values,
        passed,
        dispersion_residual: Some(residual),
        fit_residual,
        notes,
    })
}
