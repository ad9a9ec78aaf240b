use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Complex;

/// Power-law decay `f(x) ≈ c x^{-p}` as `x → +∞` and
/// `f(x) ≈ c_neg |x|^{-p}` as `x → −∞`.
///
/// When `c_neg` is absent it defaults to `c (-1)^p` for integer `p`
/// (the continuation of a rational function) and to `c` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub p: f64,
    pub c: Complex,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_neg: Option<Complex>,
}

impl TailModel {
    pub fn new(p: f64, c: Complex) -> Result<Self> {
        let t = TailModel { p, c, c_neg: None };
        t.validate()?;
        Ok(t)
    }

    pub fn with_left(mut self, c_neg: Complex) -> Self {
        self.c_neg = Some(c_neg);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p > 0.5) {
            return Err(Error::InvalidValue(format!("tail exponent must exceed 1/2, got {}", self.p)));
        }
        let finite = |c: Complex| c.re.is_finite() && c.im.is_finite();
        if !finite(self.c) || !self.c_neg.map_or(true, finite) {
            return Err(Error::InvalidValue("tail coefficient is not finite".into()));
        }
        Ok(())
    }

    pub fn right(&self) -> Complex {
        self.c
    }

    pub fn left(&self) -> Complex {
        self.c_neg.unwrap_or_else(|| {
            let r = self.p.round();
            if (self.p - r).abs() < 1e-12 && (r as i64) % 2 != 0 {
                -self.c
            } else {
                self.c
            }
        })
    }

    pub fn conj(&self) -> Self {
        TailModel {
            p: self.p,
            c: self.c.conj(),
            c_neg: self.c_neg.map(|c| c.conj()),
        }
    }

    pub fn scale(&self, s: Complex) -> Self {
        TailModel {
            p: self.p,
            c: self.c * s,
            c_neg: self.c_neg.map(|c| c * s),
        }
    }
}

/// Which part of a sampled function carries data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Re,
    Im,
}

impl Part {
    pub fn of(self, z: Complex) -> f64 {
        match self {
            Part::Re => z.re,
            Part::Im => z.im,
        }
    }

    pub fn other(self) -> Part {
        match self {
            Part::Re => Part::Im,
            Part::Im => Part::Re,
        }
    }

    pub fn embed(self, v: f64) -> Complex {
        match self {
            Part::Re => Complex::new(v, 0.0),
            Part::Im => Complex::new(0.0, v),
        }
    }
}

/// A complex function sampled on a strictly increasing real grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledComplexFunction {
    grid: Vec<f64>,
    values: Vec<Complex>,
    tail: Option<TailModel>,
}

#[derive(Serialize, Deserialize)]
struct SampledJson {
    grid: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailModel>,
}

impl Serialize for SampledComplexFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SampledJson {
            grid: self.grid.clone(),
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
            tail: self.tail,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SampledComplexFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SampledJson::deserialize(d)?;
        if j.re.len() != j.im.len() {
            return Err(serde::de::Error::custom("re and im have different lengths"));
        }
        let values = j.re.iter().zip(&j.im).map(|(&r, &i)| Complex::new(r, i)).collect();
        SampledComplexFunction::new(j.grid, values, j.tail).map_err(serde::de::Error::custom)
    }
}

impl SampledComplexFunction {
    pub fn new(grid: Vec<f64>, values: Vec<Complex>, tail: Option<TailModel>) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {}", grid.len())));
        }
        if grid.len() != values.len() {
            return Err(Error::InvalidGrid(format!("{} abscissae but {} values", grid.len(), values.len())));
        }
        if let Some(i) = grid.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid(format!("abscissa {i} is not finite")));
        }
        if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!("grid not strictly increasing at index {}", i + 1)));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidValue(format!("sample {i} is not finite")));
        }
        if let Some(t) = &tail {
            t.validate()?;
        }
        Ok(SampledComplexFunction { grid, values, tail })
    }

    pub fn from_fn(grid: Vec<f64>, f: impl Fn(f64) -> Complex, tail: Option<TailModel>) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values, tail)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn tail(&self) -> Option<&TailModel> {
        self.tail.as_ref()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lo(&self) -> f64 {
        self.grid[0]
    }

    pub fn hi(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn with_tail(mut self, tail: Option<TailModel>) -> Result<Self> {
        if let Some(t) = &tail {
            t.validate()?;
        }
        self.tail = tail;
        Ok(self)
    }

    pub fn with_values(&self, values: Vec<Complex>) -> Result<Self> {
        Self::new(self.grid.clone(), values, self.tail)
    }

    pub fn map(&self, f: impl Fn(f64, Complex) -> Complex) -> Self {
        SampledComplexFunction {
            grid: self.grid.clone(),
            values: self.grid.iter().zip(&self.values).map(|(&x, &v)| f(x, v)).collect(),
            tail: self.tail,
        }
    }

    pub fn conj(&self) -> Self {
        SampledComplexFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
            tail: self.tail.map(|t| t.conj()),
        }
    }

    pub fn part(&self, part: Part) -> Vec<f64> {
        self.values.iter().map(|&v| part.of(v)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Spacing if the grid is uniform to relative precision `1e-9`.
    pub fn uniform_spacing(&self) -> Option<f64> {
        let n = self.grid.len();
        let h = (self.hi() - self.lo()) / (n - 1) as f64;
        let tol = 1e-9 * h.max(self.hi().abs().max(self.lo().abs()) * 1e-7);
        let uniform = self.grid.iter().enumerate().all(|(i, &x)| (x - (self.lo() + i as f64 * h)).abs() <= tol);
        uniform.then_some(h)
    }

    /// Local cubic interpolation; constant extrapolation is refused.
    pub fn interpolate(&self, x: f64) -> Option<Complex> {
        let n = self.grid.len();
        if x < self.lo() || x > self.hi() || x.is_nan() {
            return None;
        }
        let k = match self.grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
            Ok(i) => return Some(self.values[i]),
            Err(i) => i - 1,
        };
        let m = 4.min(n);
        let start = k.saturating_sub(1).min(n - m);
        Some(lagrange(&self.grid[start..start + m], &self.values[start..start + m], x))
    }

    pub fn to_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        wr.write_record(["x", "re", "im"]).map_err(io)?;
        for (x, v) in self.grid.iter().zip(&self.values) {
            wr.write_record([x.to_string(), v.re.to_string(), v.im.to_string()]).map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Parses the `x,re,im` CSV layout; the tail model is supplied separately.
    pub fn from_csv<R: Read>(r: R, tail: Option<TailModel>) -> Result<Self> {
        let (grid, values) = read_xy_csv(r)?;
        match Self::new(grid, values, tail) {
            Ok(f) => Ok(f),
            Err(Error::InvalidGrid(m)) | Err(Error::InvalidValue(m)) => Err(Error::Parse { line: 0, message: m }),
            Err(e) => Err(e),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Power law `c |x|^{-p}` through two samples near one edge.
///
/// `values` are samples of a real part; `right` selects the edge.
pub fn fit_edge_power(grid: &[f64], values: &[f64], right: bool) -> Option<(f64, f64)> {
    let x_edge = if right { grid[grid.len() - 1] } else { grid[0] };
    if (right && x_edge <= 0.0) || (!right && x_edge >= 0.0) {
        return None;
    }
    let (e, k) = edge_pair(grid, right);
    let (xe, xk) = (x_edge.abs(), grid[k].abs());
    let (ve, vk) = (values[e], values[k]);
    if xk <= 0.0 || xk == xe || ve == 0.0 || vk == 0.0 || ve.signum() != vk.signum() {
        return None;
    }
    let p = (vk / ve).ln() / (xe / xk).ln();
    if !(p > 0.5 && p < 20.0) {
        return None;
    }
    Some((p, ve * xe.powf(p)))
}

/// Two-term law `c |x|^{-p} + c2 |x|^{-p-1}` near one edge.
///
/// The exponent comes from [`fit_edge_power`]; when it lies within 0.05
/// of an integer it is rounded and both coefficients are solved from the
/// same two samples, otherwise `c2 = 0` and `c` matches the edge sample.
pub fn fit_edge_series(grid: &[f64], values: &[f64], right: bool) -> Option<(f64, f64, f64)> {
    let (p, c) = fit_edge_power(grid, values, right)?;
    if (p - p.round()).abs() >= 0.05 {
        return Some((p, c, 0.0));
    }
    let p = p.round();
    let (e, k) = edge_pair(grid, right);
    let (xe, xk) = (grid[e].abs(), grid[k].abs());
    // [xe^{-p} xe^{-p-1}; xk^{-p} xk^{-p-1}] (c, c2) = (ve, vk), scaled by x^p
    let (ve, vk) = (values[e] * xe.powf(p), values[k] * xk.powf(p));
    let c2 = (ve - vk) / (1.0 / xe - 1.0 / xk);
    let c = ve - c2 / xe;
    Some((p, c, c2))
}

fn edge_pair(grid: &[f64], right: bool) -> (usize, usize) {
    let n = grid.len();
    let (e, x_edge) = if right { (n - 1, grid[n - 1]) } else { (0, grid[0]) };
    let target = 0.8 * x_edge;
    let k = if right {
        grid.partition_point(|&x| x < target).min(n - 2)
    } else {
        grid.partition_point(|&x| x <= target).saturating_sub(1).max(1)
    };
    (e, k)
}

/// Complex tail model fitted to the edge samples: the exponent from the
/// modulus, the coefficients from the last sample on each side.
pub fn fit_edge_tail(f: &SampledComplexFunction) -> Option<TailModel> {
    let g = f.grid();
    let m: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    let pr = fit_edge_power(g, &m, true).map(|x| x.0);
    let pl = fit_edge_power(g, &m, false).map(|x| x.0);
    let p = match (pr, pl) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return None,
    };
    let p = if (p - p.round()).abs() < 0.05 { p.round() } else { p };
    let n = f.len();
    let c = if f.hi() > 0.0 {
        f.values()[n - 1] * f.hi().powf(p)
    } else {
        Complex::new(0.0, 0.0)
    };
    let mut t = TailModel { p, c, c_neg: None };
    if f.lo() < 0.0 {
        t.c_neg = Some(f.values()[0] * (-f.lo()).powf(p));
    }
    t.validate().ok()?;
    Some(t)
}

fn read_xy_csv<R: Read>(r: R) -> Result<(Vec<f64>, Vec<Complex>)> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
    let header = rd.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    let cols: Vec<&str> = header.iter().collect();
    if cols != ["x", "re", "im"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `x,re,im`, found `{}`", cols.join(",")),
        });
    }
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if rec.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", rec.len()),
            });
        }
        let num = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("field {} `{}`: {e}", i + 1, &rec[i]),
            })
        };
        grid.push(num(0)?);
        values.push(Complex::new(num(1)?, num(2)?));
    }
    if grid.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no data rows".into(),
        });
    }
    Ok((grid, values))
}

/// Lagrange interpolation through a handful of nodes.
pub(crate) fn lagrange(xs: &[f64], ys: &[Complex], x: f64) -> Complex {
    let mut acc = Complex::new(0.0, 0.0);
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut w = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if j != i {
                w *= (x - xj) / (xi - xj);
            }
        }
        acc += yi * w;
    }
    acc
}

/// Derivative of the Lagrange interpolant at `x`.
pub(crate) fn lagrange_derivative(xs: &[f64], ys: &[Complex], x: f64) -> Complex {
    let n = xs.len();
    let mut acc = Complex::new(0.0, 0.0);
    for i in 0..n {
        let mut denom = 1.0;
        for j in 0..n {
            if j != i {
                denom *= xs[i] - xs[j];
            }
        }
        let mut num = 0.0;
        for k in 0..n {
            if k == i {
                continue;
            }
            let mut prod = 1.0;
            for j in 0..n {
                if j != i && j != k {
                    prod *= x - xs[j];
                }
            }
            num += prod;
        }
        acc += ys[i] * (num / denom);
    }
    acc
}

/// Uniform grid of `n` points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo + i as f64 * h }).collect()
}

/// `n` points `center + width·sinh(u)` with `u` uniform, reaching
/// `center ± span`: fine near the center, geometric in the tails.
pub fn sinh_grid(center: f64, width: f64, span: f64, n: usize) -> Vec<f64> {
    let umax = (span / width).asinh();
    uniform_grid(-umax, umax, n).into_iter().map(|u| center + width * u.sinh()).collect()
}
