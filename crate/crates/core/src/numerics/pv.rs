//! Cauchy principal-value integrals on sampled grids.
//!
//! The singular kernel is handled by subtracting the value at the
//! singularity:
//!
//! ```text
//! P∫ g(x)/(x-s) dx = ∫ (g(x)-g(s))/(x-s) dx + g(s) ln((x_N - s)/(s - x_0))
//! ```
//!
//! The regular remainder is integrated on the native grid. For uniform
//! grids the all-nodes transform is a discrete convolution and is
//! evaluated with an FFT.

use rayon::prelude::*;
use rustfft::FftPlanner;

use super::quadrature::{simpson_nonuniform, trapezoid_weights};
use super::tail;
use super::{Complex, Estimate, QuadratureSpec};
use crate::error::{Error, Result};
use crate::hardy_core::sampled::{lagrange, lagrange_derivative, SampledComplexFunction};

/// `P∫ g(x)/(x - s) dx` over the grid span, plus the tail model's
/// contribution beyond the edges when one is present.
pub fn pv_integral(g: &SampledComplexFunction, singularity: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    let (lo, hi) = (g.lo(), g.hi());
    if !(singularity > lo && singularity < hi) {
        return Err(Error::SingularityOutsideGrid { singularity, lo, hi });
    }
    if g.len() < 3 {
        return Err(Error::GridTooSparse {
            points: g.len(),
            required: 3,
        });
    }
    let (grid, values, k) = with_node(g, singularity);
    let gs = values[k];
    let dg = node_derivative(&grid, &values, k);
    let q: Vec<Complex> = grid
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(j, (&x, &v))| if j == k { dg } else { (v - gs) / (x - singularity) })
        .collect();
    let fine = simpson_nonuniform(&grid, &q);
    let coarse_idx: Vec<usize> = (0..grid.len()).filter(|&j| j % 2 == 0 || j == k || j == grid.len() - 1).collect();
    let cg: Vec<f64> = coarse_idx.iter().map(|&j| grid[j]).collect();
    let cq: Vec<Complex> = coarse_idx.iter().map(|&j| q[j]).collect();
    let coarse = simpson_nonuniform(&cg, &cq);
    let log_term = gs * ((hi - singularity) / (singularity - lo)).ln();
    let mut est = Estimate::new(fine + log_term, (fine - coarse).norm() / 15.0);
    if let Some(t) = g.tail() {
        est = est + tail_pv(g, t.p, t.right(), t.left(), Complex::new(singularity, 0.0));
    }
    let allowed = spec.allowed(est.value.norm());
    if est.error > allowed {
        return Err(Error::ToleranceNotMet {
            estimate: est.error,
            tolerance: allowed,
        });
    }
    Ok(est)
}

/// Tail contribution `∫_{|x| beyond edges} c x^{-p}/(x - z) dx` with an error
/// estimate from the mismatch between the tail model and the edge samples.
pub(crate) fn tail_pv(g: &SampledComplexFunction, p: f64, c_right: Complex, c_left: Complex, z: Complex) -> Estimate {
    let mut est = Estimate::new(Complex::new(0.0, 0.0), 0.0);
    let (lo, hi) = (g.lo(), g.hi());
    let vals = g.values();
    if hi > 0.0 {
        let model = c_right * hi.powf(-p);
        let v = c_right * tail::cauchy_right(p, hi, z);
        est = est + Estimate::new(v, mismatch_error(vals[vals.len() - 1], model, p, hi, z));
    }
    if lo < 0.0 {
        let x = -lo;
        let model = c_left * x.powf(-p);
        let v = c_left * tail::cauchy_left(p, x, z);
        est = est + Estimate::new(v, mismatch_error(vals[0], model, p, x, -z));
    }
    est
}

/// Bound on `∫_X^∞ |δ| (x/X)^{-p} / |x - z| dx` for an edge mismatch `δ`.
fn mismatch_error(sample: Complex, model: Complex, p: f64, x_edge: f64, z: Complex) -> f64 {
    let delta = (sample - model).norm();
    if delta == 0.0 {
        return 0.0;
    }
    let scale = tail::cauchy_right(p, x_edge, Complex::new(z.re.min(0.999 * x_edge), 0.0)).norm() * x_edge.powf(p);
    delta * scale
}

/// Inserts `s` as a node when it is not one already.
fn with_node(g: &SampledComplexFunction, s: f64) -> (Vec<f64>, Vec<Complex>, usize) {
    let grid = g.grid();
    let vals = g.values();
    let j = grid.partition_point(|&x| x < s);
    let h = (grid[j] - grid[j - 1]).min(grid.get(j + 1).map_or(f64::INFINITY, |x| x - grid[j]));
    if (grid[j] - s).abs() <= 1e-12 * h {
        return (grid.to_vec(), vals.to_vec(), j);
    }
    let v = g.interpolate(s).expect("singularity inside grid");
    let mut ng = Vec::with_capacity(grid.len() + 1);
    ng.extend_from_slice(&grid[..j]);
    ng.push(s);
    ng.extend_from_slice(&grid[j..]);
    let mut nv = Vec::with_capacity(vals.len() + 1);
    nv.extend_from_slice(&vals[..j]);
    nv.push(v);
    nv.extend_from_slice(&vals[j..]);
    (ng, nv, j)
}

/// Five-point derivative away from the ends, three-point next to them.
fn interior_derivative(grid: &[f64], values: &[Complex], i: usize) -> Complex {
    if i >= 2 && i + 2 < grid.len() {
        lagrange_derivative(&grid[i - 2..i + 3], &values[i - 2..i + 3], grid[i])
    } else {
        node_derivative(grid, values, i)
    }
}

fn node_derivative(grid: &[f64], values: &[Complex], k: usize) -> Complex {
    let n = grid.len();
    let start = k.saturating_sub(1).min(n - 3);
    lagrange_derivative(&grid[start..start + 3], &values[start..start + 3], grid[k])
}

/// Finite-interval principal value `P∫_{x_0}^{x_N} g(x)/(x - x_i) dx` at
/// every node (end nodes by quadratic extrapolation), trapezoid rule on
/// the subtracted integrand. Uniform grids use the FFT path.
pub fn pv_at_nodes(grid: &[f64], values: &[Complex]) -> Result<Vec<Complex>> {
    check_nodes(grid, values)?;
    let n = grid.len();
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let uniform = grid.iter().enumerate().all(|(i, &x)| (x - (grid[0] + i as f64 * h)).abs() <= 1e-9 * h);
    if uniform && n >= 64 {
        Ok(pv_at_nodes_fft(h, values))
    } else {
        Ok(pv_at_nodes_direct(grid, values))
    }
}

fn check_nodes(grid: &[f64], values: &[Complex]) -> Result<()> {
    if grid.len() != values.len() {
        return Err(Error::InvalidGrid("grid and values differ in length".into()));
    }
    if grid.len() < 5 {
        return Err(Error::GridTooSparse {
            points: grid.len(),
            required: 5,
        });
    }
    Ok(())
}

/// Direct `O(N²)` evaluation on an arbitrary grid.
pub fn pv_at_nodes_direct(grid: &[f64], values: &[Complex]) -> Vec<Complex> {
    let n = grid.len();
    let w = trapezoid_weights(grid);
    let (lo, hi) = (grid[0], grid[n - 1]);
    let mut out: Vec<Complex> = (0..n)
        .into_par_iter()
        .map(|i| {
            if i == 0 || i == n - 1 {
                return Complex::new(0.0, 0.0);
            }
            let (xi, gi) = (grid[i], values[i]);
            let mut acc = w[i] * interior_derivative(grid, values, i);
            for j in 0..n {
                if j != i {
                    acc += w[j] * (values[j] - gi) / (grid[j] - xi);
                }
            }
            acc + gi * ((hi - xi) / (xi - lo)).ln()
        })
        .collect();
    fill_ends(grid, &mut out);
    out
}

/// FFT evaluation on a uniform grid of spacing `h`; equal to
/// [`pv_at_nodes_direct`] up to round-off.
pub fn pv_at_nodes_fft(h: f64, values: &[Complex]) -> Vec<Complex> {
    let n = values.len();
    let m = (2 * n - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);

    let mut u = vec![Complex::new(0.0, 0.0); m];
    for (j, &v) in values.iter().enumerate() {
        let wj = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        u[j] = v * wj;
    }
    // kernel k(d) = -1/d for d ≠ 0, wrapped for circular convolution
    let mut k = vec![Complex::new(0.0, 0.0); m];
    for d in 1..n {
        k[d] = Complex::new(-1.0 / d as f64, 0.0);
        k[m - d] = Complex::new(1.0 / d as f64, 0.0);
    }
    fwd.process(&mut u);
    fwd.process(&mut k);
    let mut a: Vec<Complex> = u.iter().zip(&k).map(|(x, y)| x * y).collect();
    inv.process(&mut a);
    let scale = 1.0 / m as f64;

    let mut harmonic = vec![0.0; n];
    for i in 1..n {
        harmonic[i] = harmonic[i - 1] + 1.0 / i as f64;
    }
    let mut out = vec![Complex::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        let r = n - 1 - i;
        let b = harmonic[r] - harmonic[i] + 0.5 / i as f64 - 0.5 / r as f64;
        let dg = if i >= 2 && i + 2 < n {
            (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2]) / (12.0 * h)
        } else {
            (values[i + 1] - values[i - 1]) / (2.0 * h)
        };
        out[i] = a[i] * scale - values[i] * b + dg * h + values[i] * (r as f64 / i as f64).ln();
    }
    let grid: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
    fill_ends(&grid, &mut out);
    out
}

fn fill_ends(grid: &[f64], out: &mut [Complex]) {
    let n = grid.len();
    out[0] = lagrange(&grid[1..4], &out[1..4], grid[0]);
    out[n - 1] = lagrange(&grid[n - 4..n - 1], &out[n - 4..n - 1], grid[n - 1]);
}
