use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::pv::pv_at_nodes;
use crate::numerics::{tail, Complex, QuadratureSpec};

use super::analytic::HalfPlane;
use super::sampled::{fit_edge_series, lagrange, Part, SampledComplexFunction, TailModel};

/// Minimum grid size for the principal-value scheme.
pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone)]
pub struct HilbertReport {
    /// The given part unchanged, the partner reconstructed.
    pub function: SampledComplexFunction,
    /// Largest tail-truncation error estimate over the nodes.
    pub truncation_error: f64,
}

/// Fills in the partner of `given` from the dispersion relation of `hp`:
/// for `Upper`, `Re = (1/π) P∫ Im/(x'-x)` and `Im = -(1/π) P∫ Re/(x'-x)`;
/// `Lower` flips both signs.
pub fn hilbert_transform(f: &SampledComplexFunction, given: Part, hp: HalfPlane, spec: &QuadratureSpec) -> Result<SampledComplexFunction> {
    Ok(hilbert_transform_report(f, given, hp, spec)?.function)
}

pub fn hilbert_transform_report(f: &SampledComplexFunction, given: Part, hp: HalfPlane, spec: &QuadratureSpec) -> Result<HilbertReport> {
    spec.validate()?;
    let n = f.len();
    if n < MIN_POINTS {
        return Err(Error::GridTooSparse {
            points: n,
            required: MIN_POINTS,
        });
    }
    let grid = f.grid();
    let part = f.part(given);
    let vals: Vec<Complex> = part.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let pv = pv_at_nodes(grid, &vals)?;

    let (right, left) = part_tails(f, given, &part);
    let scale = part.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0f64;
    let mut transformed = Vec::with_capacity(n);
    for (i, &x) in grid.iter().enumerate() {
        if i == 0 || i == n - 1 {
            // the edge logarithms of grid and tail cancel; filled below
            transformed.push(0.0);
            continue;
        }
        let z = Complex::new(x, 0.0);
        let mut v = pv[i].re;
        let mut err = 0.0;
        match right {
            Some(law) => {
                v += law.cauchy(f.hi(), z);
                err += law.error(f.hi(), x);
            }
            None => err += untailed(part[n - 1], f.hi() - x),
        }
        match left {
            Some(law) => {
                v -= law.cauchy(-f.lo(), -z);
                err += law.error(-f.lo(), -x);
            }
            None => err += untailed(part[0], x - f.lo()),
        }
        worst = worst.max(err / PI);
        transformed.push(v / PI);
    }

    let ends = |t: &[f64], idx: [usize; 3], at: usize| {
        let xs: Vec<f64> = idx.iter().map(|&j| grid[j]).collect();
        let ys: Vec<Complex> = idx.iter().map(|&j| Complex::new(t[j], 0.0)).collect();
        lagrange(&xs, &ys, grid[at]).re
    };
    transformed[0] = ends(&transformed, [1, 2, 3], 0);
    transformed[n - 1] = ends(&transformed, [n - 4, n - 3, n - 2], n - 1);

    let allowed = spec.allowed(scale);
    if worst > allowed {
        return Err(Error::MissingTailModel(format!(
            "tail truncation error {worst:e} exceeds tolerance {allowed:e}"
        )));
    }
    // Upper: Re = +H[Im], Im = -H[Re]
    let sign = hp.sign() * if given == Part::Im { 1.0 } else { -1.0 };
    let values: Vec<Complex> = part
        .iter()
        .zip(&transformed)
        .map(|(&g, &t)| match given {
            Part::Im => Complex::new(sign * t, g),
            Part::Re => Complex::new(g, sign * t),
        })
        .collect();
    let tail = right.map(|r| {
        let c_neg = left.filter(|l| (l.p - r.p).abs() < 1e-9).map(|l| given.embed(l.c));
        TailModel {
            p: r.p,
            c: given.embed(r.c),
            c_neg,
        }
    });
    Ok(HilbertReport {
        function: SampledComplexFunction::new(grid.to_vec(), values, tail)?,
        truncation_error: worst,
    })
}

/// Tail model for dispersion checks of data without one: fitted to the
/// imaginary part (or the real part if that fails), so that the other
/// part gets its own edge fit inside [`hilbert_transform`].
pub fn fit_dispersion_tail(f: &SampledComplexFunction) -> Option<TailModel> {
    let g = f.grid();
    for part in [Part::Im, Part::Re] {
        let v = f.part(part);
        let right = fit_edge_series(g, &v, true);
        let left = fit_edge_series(g, &v, false);
        let (p, c, c_neg) = match (right, left) {
            (Some((p, c, _)), Some((pl, cl, _))) if (p - pl).abs() < 0.05 * p => (p, c, Some((pl, cl))),
            (Some((p, c, _)), _) => (p, c, None),
            (None, Some((p, cl, _))) => (p, 0.0, Some((p, cl))),
            (None, None) => continue,
        };
        // the left coefficient is moved onto the right-hand exponent
        let c_neg = c_neg.map(|(pl, cl)| cl * f.lo().abs().powf(p - pl));
        let mut t = TailModel {
            p,
            c: part.embed(c),
            c_neg: c_neg.map(|c| part.embed(c)),
        };
        if c_neg.is_none() && f.lo() < 0.0 {
            t.c_neg = Some(Complex::new(0.0, 0.0));
        }
        if t.validate().is_ok() {
            return Some(t);
        }
    }
    None
}

/// `c |x|^{-p} + c2 |x|^{-p-1}` beyond one edge of one part.
#[derive(Debug, Clone, Copy)]
struct EdgeLaw {
    p: f64,
    c: f64,
    c2: f64,
}

impl EdgeLaw {
    /// Leading term from the tail model, correction through the edge sample.
    fn through(p: f64, c: f64, sample: f64, x_edge: f64) -> Self {
        EdgeLaw {
            p,
            c,
            c2: (sample - c * x_edge.powf(-p)) * x_edge.powf(p + 1.0),
        }
    }

    fn cauchy(&self, x_edge: f64, z: Complex) -> f64 {
        let mut v = self.c * tail::cauchy_right(self.p, x_edge, z).re;
        if self.c2 != 0.0 {
            v += self.c2 * tail::cauchy_right(self.p + 1.0, x_edge, z).re;
        }
        v
    }

    /// The correction term once more, damped by its ratio to the leading term.
    fn error(&self, x_edge: f64, x: f64) -> f64 {
        if self.c2 == 0.0 {
            return 0.0;
        }
        let z = Complex::new(x.min(x_edge * (1.0 - 1e-6)), 0.0);
        let term = (self.c2 * tail::cauchy_right(self.p + 1.0, x_edge, z).re).abs();
        if self.c == 0.0 {
            term
        } else {
            term * (self.c2 / (self.c * x_edge)).abs().min(1.0)
        }
    }
}

/// Power-law tails of one part: leading terms from the tail model when it
/// carries a nonzero component for this part, otherwise fitted to the
/// edges; the next order comes from the edge samples.
fn part_tails(f: &SampledComplexFunction, given: Part, part: &[f64]) -> (Option<EdgeLaw>, Option<EdgeLaw>) {
    let Some(t) = f.tail() else {
        return (None, None);
    };
    let grid = f.grid();
    let (cr, cl) = (given.of(t.right()), given.of(t.left()));
    let n = part.len();
    let fitted = |right: bool, x_edge: f64, sample: f64| {
        fit_edge_series(grid, part, right)
            .map(|(p, c, c2)| EdgeLaw { p, c, c2 })
            .unwrap_or_else(|| EdgeLaw::through(t.p, 0.0, sample, x_edge))
    };
    let right = if f.hi() <= 0.0 {
        None
    } else if cr != 0.0 {
        Some(EdgeLaw::through(t.p, cr, part[n - 1], f.hi()))
    } else {
        Some(fitted(true, f.hi(), part[n - 1]))
    };
    let left = if f.lo() >= 0.0 {
        None
    } else if cl != 0.0 {
        Some(EdgeLaw::through(t.p, cl, part[0], -f.lo()))
    } else {
        Some(fitted(false, -f.lo(), part[0]))
    };
    (right, left)
}

/// Neglected tail with no model: a `1/x` continuation of the edge sample.
fn untailed(sample: f64, dist_to_edge: f64) -> f64 {
    sample.abs() * (1.0 + (1.0 + 1.0 / dist_to_edge.max(1e-12)).ln())
}

/// Pointwise residual between a reconstructed and a reference part over
/// the central half of the grid, relative with a floor of `1e-3` times
/// the larger of the reference maximum and `scale`.
pub fn central_residual(grid: &[f64], reference: &[f64], reconstructed: &[f64], scale: f64) -> f64 {
    let n = grid.len();
    let (lo, hi) = (grid[0], grid[n - 1]);
    let (c, hw) = (0.5 * (lo + hi), 0.25 * (hi - lo));
    let max_ref = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-3 * max_ref.max(scale);
    if floor == 0.0 {
        return reconstructed.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    grid.iter()
        .zip(reference.iter().zip(reconstructed))
        .filter(|(&x, _)| (x - c).abs() <= hw)
        .map(|(_, (&r, &q))| (q - r).abs() / r.abs().max(floor))
        .fold(0.0, f64::max)
}

/// Reconstructs the real part from the imaginary part (and the reverse)
/// and returns the larger central residual.
pub fn dispersion_residual(f: &SampledComplexFunction, hp: HalfPlane, spec: &QuadratureSpec) -> Result<f64> {
    let scale = f.max_abs();
    let mut worst = 0.0f64;
    for given in [Part::Im, Part::Re] {
        let only = f.map(|_, v| given.embed(given.of(v)));
        let rec = hilbert_transform(&only, given, hp, spec)?;
        let other = given.other();
        worst = worst.max(central_residual(f.grid(), &f.part(other), &rec.part(other), scale));
    }
    Ok(worst)
}
