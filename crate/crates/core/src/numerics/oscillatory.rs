//! Half-line Fourier integrals `∫_0^∞ e^{-iEt} g(E) dE`.
//!
//! Sampled integrands use quadratic panels whose products with the
//! exponential are integrated exactly (Filon type) once `t·h` exceeds
//! the switch threshold, and composite Simpson below it. Rational
//! integrands are evaluated exactly by pole decomposition.

use serde::{Deserialize, Serialize};

use super::quadrature::simpson_nonuniform;
use super::{tail, Complex, Estimate, PoleExpansion, I};
use crate::error::{Error, Result};
use crate::hardy_core::analytic::AnalyticModel;
use crate::hardy_core::sampled::SampledComplexFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorySpec {
    /// The `t` in `e^{-iEt}`.
    pub frequency: f64,
    /// Value of `t·h` above which Filon weights replace Simpson.
    pub switch_threshold: f64,
}

impl OscillatorySpec {
    pub const DEFAULT_SWITCH: f64 = 0.1;

    pub fn new(frequency: f64, switch_threshold: f64) -> Result<Self> {
        if !(switch_threshold.is_finite() && switch_threshold > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "switch_threshold must be strictly positive, got {switch_threshold}"
            )));
        }
        Ok(OscillatorySpec { frequency, switch_threshold })
    }

    pub fn at(t: f64) -> Self {
        OscillatorySpec {
            frequency: t,
            switch_threshold: Self::DEFAULT_SWITCH,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum OscillatoryInput<'a> {
    Sampled(&'a SampledComplexFunction),
    Analytic(&'a AnalyticModel),
    Expansion(&'a PoleExpansion),
}

/// `∫_0^∞ e^{-iEt} g(E) dE` with `t = spec.frequency ≥ 0`.
pub fn oscillatory_integral(g: OscillatoryInput<'_>, spec: &OscillatorySpec) -> Result<Estimate> {
    let t = spec.frequency;
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if !(spec.switch_threshold > 0.0) {
        return Err(Error::InvalidSpec("switch_threshold must be strictly positive".into()));
    }
    match g {
        OscillatoryInput::Analytic(m) => rational(&m.expansion(), t),
        OscillatoryInput::Expansion(e) => rational(e, t),
        OscillatoryInput::Sampled(f) => {
            if let Some(tm) = f.tail() {
                if t == 0.0 && tm.p <= 1.0 {
                    return Err(Error::NonDecayingIntegrand(format!(
                        "tail exponent {} does not give an integrable integrand at t = 0",
                        tm.p
                    )));
                }
            }
            sampled_half_line(f, t, spec.switch_threshold)
        }
    }
}

fn rational(e: &PoleExpansion, t: f64) -> Result<Estimate> {
    let v = e.half_line_fourier(t)?;
    let scale: f64 = e
        .terms
        .iter()
        .map(|k| k.coefficient.norm() / k.pole.norm().powi(k.order as i32 - 1).max(1e-300))
        .sum();
    Ok(Estimate::new(v, 1e-13 * (v.norm() + scale)))
}

/// `∫_0^∞ e^{-iωx} g(x) dx` for either sign of `ω`, using the samples
/// at `x ≥ 0` and the tail model beyond the last node.
pub(crate) fn sampled_half_line(g: &SampledComplexFunction, omega: f64, threshold: f64) -> Result<Estimate> {
    let (mut est, x_edge, g_edge) = grid_half_line(g, omega, threshold)?;
    match g.tail() {
        Some(tm) if x_edge > 0.0 => {
            let unit = tail_fourier(tm.p, x_edge, omega);
            let model = tm.right() * x_edge.powf(-tm.p);
            let delta = (g_edge - model).norm();
            est = est + Estimate::new(tm.right() * unit, delta * x_edge.powf(tm.p) * tail_bound(tm.p, x_edge, omega));
        }
        _ => {
            // no model: the neglected tail is bounded by its boundary term
            est.error += g_edge.norm() * tail_bound(2.0, x_edge.max(1e-300), omega) * x_edge.max(1e-300).powi(2);
        }
    }
    Ok(est)
}

/// Grid part of [`sampled_half_line`]; also returns the last node and sample.
pub(crate) fn grid_half_line(g: &SampledComplexFunction, omega: f64, threshold: f64) -> Result<(Estimate, f64, Complex)> {
    let (grid, vals) = clip_to_half_line(g)?;
    let n = grid.len();
    let hmax = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let filon = omega.abs() * hmax > threshold;
    // fine against doubled spacing block by block, so that the error
    // estimate cannot cancel between distant parts of the grid
    let mut fine = Complex::new(0.0, 0.0);
    let mut error = 0.0;
    let mut k = 0;
    while k < n - 1 {
        let end = if k + 8 < n { k + 4 } else { n - 1 };
        let (g, v) = (&grid[k..=end], &vals[k..=end]);
        let f = panels(g, v, omega, filon);
        let m = g.len();
        let idx: Vec<usize> = (0..m).filter(|&j| j % 2 == 0 || j == m - 1).collect();
        let cg: Vec<f64> = idx.iter().map(|&j| g[j]).collect();
        let cv: Vec<Complex> = idx.iter().map(|&j| v[j]).collect();
        let c = if cg.len() >= 3 { panels(&cg, &cv, omega, filon) } else { f };
        fine += f;
        error += (f - c).norm();
        k = end;
    }
    Ok((Estimate::new(fine, error), grid[n - 1], vals[n - 1]))
}

fn tail_fourier(p: f64, x: f64, omega: f64) -> Complex {
    if omega >= 0.0 {
        tail::fourier(p, x, omega)
    } else {
        tail::fourier(p, x, -omega).conj()
    }
}

/// Upper bound on `|∫_X^∞ e^{-iωE} E^{-p} dE|`.
fn tail_bound(p: f64, x: f64, omega: f64) -> f64 {
    let osc = if omega != 0.0 { 2.0 * x.powf(-p) / omega.abs() } else { f64::INFINITY };
    let abs = if p > 1.0 { tail::power(p, x) } else { f64::INFINITY };
    osc.min(abs)
}

fn clip_to_half_line(g: &SampledComplexFunction) -> Result<(Vec<f64>, Vec<Complex>)> {
    let grid = g.grid();
    let vals = g.values();
    if g.lo() > 0.0 {
        return Err(Error::InvalidGrid(format!(
            "half-line integrand must be sampled from 0, grid starts at {}",
            g.lo()
        )));
    }
    let j = grid.partition_point(|&x| x < 0.0);
    if grid[j..].len() < 2 {
        return Err(Error::GridTooSparse {
            points: grid[j..].len(),
            required: 2,
        });
    }
    if grid[j] == 0.0 {
        return Ok((grid[j..].to_vec(), vals[j..].to_vec()));
    }
    let v0 = g.interpolate(0.0).expect("0 inside grid");
    let mut ng = vec![0.0];
    ng.extend_from_slice(&grid[j..]);
    let mut nv = vec![v0];
    nv.extend_from_slice(&vals[j..]);
    Ok((ng, nv))
}

fn panels(grid: &[f64], vals: &[Complex], omega: f64, filon: bool) -> Complex {
    let n = grid.len();
    if !filon {
        let w: Vec<Complex> = grid.iter().zip(vals).map(|(&x, &v)| (-I * omega * x).exp() * v).collect();
        return simpson_nonuniform(grid, &w);
    }
    let mut acc = Complex::new(0.0, 0.0);
    let mut k = 0;
    while k + 2 < n {
        acc += quadratic_panel(&grid[k..k + 3], &vals[k..k + 3], omega);
        k += 2;
    }
    if k + 1 < n {
        acc += linear_panel(grid[k], grid[k + 1], vals[k], vals[k + 1], omega);
    }
    acc
}

fn quadratic_panel(x: &[f64], g: &[Complex], omega: f64) -> Complex {
    let c = 0.5 * (x[0] + x[2]);
    let hw = 0.5 * (x[2] - x[0]);
    let (u0, u1, u2) = (x[0] - c, x[1] - c, x[2] - c);
    let d1 = (g[1] - g[0]) / (u1 - u0);
    let d2 = ((g[2] - g[1]) / (u2 - u1) - d1) / (u2 - u0);
    let gamma = d2;
    let beta = d1 - d2 * (u0 + u1);
    let alpha = g[0] - d1 * u0 + d2 * u0 * u1;
    let (m0, m1, m2) = moments(omega, hw);
    (-I * omega * c).exp() * (alpha * m0 + beta * m1 + gamma * m2)
}

fn linear_panel(x0: f64, x1: f64, g0: Complex, g1: Complex, omega: f64) -> Complex {
    let c = 0.5 * (x0 + x1);
    let hw = 0.5 * (x1 - x0);
    let (m0, m1, _) = moments(omega, hw);
    (-I * omega * c).exp() * (0.5 * (g0 + g1) * m0 + (g1 - g0) / (2.0 * hw) * m1)
}

/// `M_k = ∫_{-H}^{H} u^k e^{-iωu} du` for `k = 0, 1, 2`.
fn moments(omega: f64, hw: f64) -> (Complex, Complex, Complex) {
    let th = omega * hw;
    let (c0, s1, c2) = if th.abs() < 1.0 {
        let t2 = th * th;
        let (mut a, mut b, mut d) = (0.0, 0.0, 0.0);
        let mut even = 1.0; // θ^{2n}/(2n)! with sign
        let mut odd = th; // θ^{2n+1}/(2n+1)! with sign
        for n in 0..12 {
            let k = 2.0 * n as f64;
            a += even / (k + 1.0);
            d += even / (k + 3.0);
            b += odd / (k + 3.0);
            even *= -t2 / ((k + 1.0) * (k + 2.0));
            odd *= -t2 / ((k + 2.0) * (k + 3.0));
        }
        (2.0 * hw * a, 2.0 * hw * hw * b, 2.0 * hw.powi(3) * d)
    } else {
        let (s, c) = th.sin_cos();
        (
            2.0 * s / omega,
            2.0 * (s - th * c) / (omega * omega),
            2.0 * ((th * th - 2.0) * s + 2.0 * th * c) / omega.powi(3),
        )
    };
    (Complex::new(c0, 0.0), Complex::new(0.0, -s1), Complex::new(c2, 0.0))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::hardy_core::sampled::{uniform_grid, TailModel};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn lorentzian_samples(n: usize, emax: f64) -> SampledComplexFunction {
        let t = TailModel::new(2.0, c(1.0, 0.0)).unwrap();
        SampledComplexFunction::from_fn(uniform_grid(0.0, emax, n), |e| c(1.0 / ((e - 2.0).powi(2) + 0.25), 0.0), Some(t)).unwrap()
    }

    #[test]
    fn moments_series_and_closed_form_agree_at_switch() {
        for &(w, h) in &[(1.0, 0.999_999), (1.0, 1.000_001), (-3.0, 0.333_333)] {
            let a = moments(w, h);
            let b = moments(w, h * (1.0 + 2e-6));
            assert!((a.0 - b.0).norm() < 1e-5 && (a.1 - b.1).norm() < 1e-5 && (a.2 - b.2).norm() < 1e-5);
        }
        let (m0, m1, m2) = moments(0.0, 0.5);
        assert!((m0.re - 1.0).abs() < 1e-15 && m1.norm() == 0.0 && (m2.re - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn t_zero_lorentzian() {
        let exact = 2.0 * (PI / 2.0 + 4.0f64.atan());
        let f = lorentzian_samples(200_001, 2000.0);
        let v = oscillatory_integral(OscillatoryInput::Sampled(&f), &OscillatorySpec::at(0.0)).unwrap();
        assert!((v.value.re - exact).abs() < 1e-6, "{}", v.value);
        assert!(v.error < 1e-4);
    }

    #[test]
    fn negative_time_is_a_contract_violation() {
        let f = lorentzian_samples(101, 200.0);
        assert!(matches!(
            oscillatory_integral(OscillatoryInput::Sampled(&f), &OscillatorySpec::at(-0.1)),
            Err(Error::NegativeTime(_))
        ));
    }

    #[test]
    fn zero_integrand() {
        let f = SampledComplexFunction::from_fn(uniform_grid(0.0, 10.0, 11), |_| c(0.0, 0.0), None).unwrap();
        for t in [0.0, 1.0, 50.0] {
            let v = oscillatory_integral(OscillatoryInput::Sampled(&f), &OscillatorySpec::at(t)).unwrap();
            assert_eq!(v.value, c(0.0, 0.0));
        }
    }

    #[test]
    fn one_over_e_tail_at_t_zero_is_rejected() {
        let f = SampledComplexFunction::from_fn(
            uniform_grid(0.0, 10.0, 11),
            |e| c(1.0 / (e + 1.0), 0.0),
            Some(TailModel::new(1.0, c(1.0, 0.0)).unwrap()),
        )
        .unwrap();
        assert!(matches!(
            oscillatory_integral(OscillatoryInput::Sampled(&f), &OscillatorySpec::at(0.0)),
            Err(Error::NonDecayingIntegrand(_))
        ));
    }

    #[test]
    fn pole_path_matches_brute_force_at_t_5() {
        let m = AnalyticModel::simple_pole(c(1.0, 0.0), c(2.0, 0.5)).unwrap();
        let v = oscillatory_integral(OscillatoryInput::Analytic(&m), &OscillatorySpec::at(5.0)).unwrap();
        // 10^6-node Simpson on [0, 2000] plus the analytic 1/E tail
        let n = 1_000_000;
        let emax = 2000.0;
        let grid = uniform_grid(0.0, emax, n + 1);
        let vals: Vec<Complex> = grid.iter().map(|&e| (-I * 5.0 * e).exp() / (c(e, 0.0) - c(2.0, 0.5))).collect();
        let brute = simpson_nonuniform(&grid, &vals) + tail::fourier(1.0, emax, 5.0) + c(2.0, 0.5) * tail::fourier(2.0, emax, 5.0);
        assert!((v.value - brute).norm() < 1e-6, "{} vs {}", v.value, brute);
    }

    #[test]
    fn filon_matches_exact_at_large_t() {
        let p = c(2.0, 0.5);
        let e = PoleExpansion::simple_pole(-I, p).add(&PoleExpansion::simple_pole(I, p.conj()));
        let f = lorentzian_samples(8001, 200.0);
        for t in [3.0, 20.0, 80.0] {
            let exact = e.half_line_fourier(t).unwrap();
            let v = oscillatory_integral(OscillatoryInput::Sampled(&f), &OscillatorySpec::at(t)).unwrap();
            assert!((v.value - exact).norm() < 1e-5, "t={t}: {} vs {exact}", v.value);
            assert!((v.value - exact).norm() <= v.error + 1e-12, "t={t}: estimate {} too small", v.error);
        }
    }

    #[test]
    fn filon_and_simpson_agree_on_overlap_band() {
        let f = lorentzian_samples(40001, 200.0);
        for t in [0.5, 1.0, 2.0] {
            let simpson = oscillatory_integral(OscillatoryInput::Sampled(&f), &OscillatorySpec::new(t, 1e6).unwrap()).unwrap();
            let filon = oscillatory_integral(OscillatoryInput::Sampled(&f), &OscillatorySpec::new(t, 1e-9).unwrap()).unwrap();
            assert!((simpson.value - filon.value).norm() <= simpson.error + filon.error + 1e-9);
        }
    }
}
