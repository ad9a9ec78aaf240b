//! Quadrature rules on closed intervals and on sampled grids.

use serde::{Deserialize, Serialize};

use super::Complex;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureMethod {
    TrapezoidUniform,
    AdaptiveSimpson,
    FilonOscillatory,
}

/// Tolerances and method selection for a quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(method: QuadratureMethod, abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = QuadratureSpec {
            method,
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn adaptive(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureSpec {
            method: QuadratureMethod::AdaptiveSimpson,
            abs_tol,
            rel_tol,
            max_subdivisions: 200_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.abs_tol) || !ok(self.rel_tol) {
            return Err(Error::InvalidSpec(format!(
                "tolerances must be strictly positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidSpec("max_subdivisions must be >= 1".into()));
        }
        Ok(())
    }

    /// Absolute error allowed for a result of magnitude `scale`.
    pub fn allowed(&self, scale: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * scale)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            method: QuadratureMethod::AdaptiveSimpson,
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 100_000,
        }
    }
}

/// A quadrature value together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: Complex, error: f64) -> Self {
        Estimate { value, error }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate::new(self.value + o.value, self.error + o.error)
    }
}

/// Adaptive Simpson quadrature of a complex integrand on `[a, b]`.
///
/// Never fails: when the subdivision budget runs out the remaining
/// intervals are accepted and their error is accumulated in the estimate.
pub fn adaptive_simpson_raw<F>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Estimate
where
    F: Fn(f64) -> Complex + ?Sized,
{
    struct Panel {
        a: f64,
        b: f64,
        fa: Complex,
        fm: Complex,
        fb: Complex,
        whole: Complex,
        depth: u32,
    }
    if a == b {
        return Estimate::new(Complex::new(0.0, 0.0), 0.0);
    }
    let simpson = |a: f64, b: f64, fa: Complex, fm: Complex, fb: Complex| (b - a) / 6.0 * (fa + 4.0 * fm + fb);

    // Seed with a uniform split so narrow features are not missed.
    const SEED: usize = 8;
    let mut stack = Vec::with_capacity(64);
    let h = (b - a) / SEED as f64;
    for k in 0..SEED {
        let lo = a + h * k as f64;
        let hi = if k + 1 == SEED { b } else { lo + h };
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        stack.push(Panel {
            a: lo,
            b: hi,
            fa,
            fm,
            fb,
            whole: simpson(lo, hi, fa, fm, fb),
            depth: 0,
        });
    }
    let width = (b - a).abs();
    let mut total = Complex::new(0.0, 0.0);
    let mut error = 0.0;
    let mut scale = stack.iter().map(|p| p.whole.norm()).sum::<f64>();
    let mut budget = spec.max_subdivisions;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let diff = left + right - p.whole;
        let local_tol = spec.allowed(scale) * ((p.b - p.a).abs() / width).max(1e-300);
        let err = diff.norm() / 15.0;
        if err <= local_tol || p.depth >= 60 || budget == 0 || (m - p.a).abs() <= f64::EPSILON * m.abs() {
            total += left + right + diff / 15.0;
            error += err;
            continue;
        }
        budget -= 1;
        scale = scale.max((left + right).norm());
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            depth: p.depth + 1,
        });
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            depth: p.depth + 1,
        });
    }
    Estimate::new(total, error)
}

/// Adaptive Simpson quadrature that fails when the tolerance is not met.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64) -> Complex + ?Sized,
{
    spec.validate()?;
    let est = adaptive_simpson_raw(f, a, b, spec);
    let allowed = spec.allowed(est.value.norm());
    if !(est.error <= allowed) {
        return Err(Error::ToleranceNotMet {
            estimate: est.error,
            tolerance: allowed,
        });
    }
    Ok(est)
}

/// Composite trapezoid rule on an arbitrary grid.
pub fn trapezoid(grid: &[f64], values: &[Complex]) -> Complex {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Trapezoid-rule weights on an arbitrary grid.
pub fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut w = vec![0.0; n];
    for j in 0..n.saturating_sub(1) {
        let h = grid[j + 1] - grid[j];
        w[j] += 0.5 * h;
        w[j + 1] += 0.5 * h;
    }
    w
}

/// Integral of the piecewise-quadratic interpolant (Simpson on pairs of
/// intervals, spacing may vary); an odd final interval uses the quadratic
/// through the last three nodes.
pub fn simpson_nonuniform(grid: &[f64], values: &[Complex]) -> Complex {
    let n = grid.len();
    if n < 3 {
        return trapezoid(grid, values);
    }
    let mut sum = Complex::new(0.0, 0.0);
    let mut j = 0;
    while j + 2 < n {
        sum += quadratic_panel(&grid[j..j + 3], &values[j..j + 3], grid[j], grid[j + 2]);
        j += 2;
    }
    if j + 1 < n {
        sum += quadratic_panel(&grid[n - 3..], &values[n - 3..], grid[n - 2], grid[n - 1]);
    }
    sum
}

/// Integral over `[lo, hi]` of the quadratic through three nodes.
fn quadratic_panel(x: &[f64], y: &[Complex], lo: f64, hi: f64) -> Complex {
    // Newton form around x0
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = ((y[2] - y[1]) / (x[2] - x[1]) - d1) / (x[2] - x[0]);
    // p(x) = y0 + d1 (x-x0) + d2 (x-x0)(x-x1)
    let prim = |t: f64| {
        let u = t - x[0];
        y[0] * u + d1 * (0.5 * u * u) + d2 * (u * u * u / 3.0 - 0.5 * (x[1] - x[0]) * u * u)
    };
    prim(hi) - prim(lo)
}

/// Uniform-grid rule selected by method; `FilonOscillatory` and
/// `AdaptiveSimpson` fall back to composite Simpson on sampled data.
pub fn integrate_samples(grid: &[f64], values: &[Complex], method: QuadratureMethod) -> Complex {
    match method {
        QuadratureMethod::TrapezoidUniform => trapezoid(grid, values),
        QuadratureMethod::AdaptiveSimpson | QuadratureMethod::FilonOscillatory => simpson_nonuniform(grid, values),
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
