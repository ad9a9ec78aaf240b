use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::Complex;

use super::analytic::{AnalyticModel, SimplePole};
use super::sampled::SampledComplexFunction;

/// Least-squares rational approximation `Σ r_j / (x - p_j)` of sampled data.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFit {
    pub model: AnalyticModel,
    /// Relative root-mean-square residual on the samples.
    pub residual: f64,
}

/// Fits with `1..=max_poles` poles and keeps the first whose residual
/// is below `target`, or the best one.
pub fn rational_fit(f: &SampledComplexFunction, max_poles: usize, target: f64) -> Result<RationalFit> {
    if max_poles == 0 {
        return Err(Error::InvalidValue("at least one pole is required".into()));
    }
    if f.is_zero() {
        return Ok(RationalFit {
            model: AnalyticModel::zero(),
            residual: 0.0,
        });
    }
    let mut best: Option<RationalFit> = None;
    for m in 1..=max_poles.min(f.len() / 3) {
        let Ok(fit) = fit_order(f, m) else { continue };
        let better = best.as_ref().map_or(true, |b| fit.residual < b.residual);
        let done = fit.residual <= target;
        if better {
            best = Some(fit);
        }
        if done {
            break;
        }
    }
    best.ok_or_else(|| Error::InvalidValue("rational fit failed for every order".into()))
}

/// Sanathanan–Koerner iteration at fixed order, then residues by least squares.
fn fit_order(f: &SampledComplexFunction, m: usize) -> Result<RationalFit> {
    let x = f.grid();
    let y = f.values();
    let center = 0.5 * (f.lo() + f.hi());
    let scale = 0.5 * (f.hi() - f.lo());
    let u: Vec<Complex> = x.iter().map(|&xi| Complex::new((xi - center) / scale, 0.0)).collect();
    let k = x.len();
    let mut weight = vec![1.0; k];
    let mut denom = vec![Complex::new(0.0, 0.0); m];
    for _ in 0..30 {
        // N(u) - y D~(u) = y u^m,  N of degree m-1, D = u^m + D~
        let mut a = DMatrix::<Complex>::zeros(k, 2 * m);
        let mut b = DVector::<Complex>::zeros(k);
        for i in 0..k {
            let w = weight[i];
            let mut up = Complex::new(1.0, 0.0);
            for j in 0..m {
                a[(i, j)] = up * w;
                a[(i, m + j)] = -y[i] * up * w;
                up *= u[i];
            }
            b[i] = y[i] * up * w;
        }
        let sol = a
            .svd(true, true)
            .solve(&b, 1e-14)
            .map_err(|e| Error::InvalidValue(format!("least squares failed: {e}")))?;
        let next: Vec<Complex> = (0..m).map(|j| sol[m + j]).collect();
        let change: f64 = next.iter().zip(&denom).map(|(a, b)| (a - b).norm()).sum();
        denom = next;
        for i in 0..k {
            let d = eval_monic(&denom, u[i]).norm();
            weight[i] = if d > 0.0 { 1.0 / d } else { 1.0 };
        }
        if change < 1e-12 {
            break;
        }
    }
    let roots = monic_roots(&denom)?;
    let poles: Vec<Complex> = roots.iter().map(|r| center + scale * r).collect();
    if poles.iter().any(|p| p.im == 0.0 || !p.re.is_finite()) {
        return Err(Error::InvalidValue("fit produced a pole on the real axis".into()));
    }
    // residues
    let mut a = DMatrix::<Complex>::zeros(k, m);
    let b = DVector::<Complex>::from_iterator(k, y.iter().copied());
    for i in 0..k {
        for (j, p) in poles.iter().enumerate() {
            a[(i, j)] = 1.0 / (x[i] - p);
        }
    }
    let r = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidValue(format!("least squares failed: {e}")))?;
    let terms: Vec<SimplePole> = poles
        .iter()
        .zip(r.iter())
        .map(|(&pole, &coefficient)| SimplePole { coefficient, pole })
        .collect();
    let model = AnalyticModel::rational_sum(terms)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        num += (model.eval(Complex::new(*xi, 0.0)) - yi).norm_sqr();
        den += yi.norm_sqr();
    }
    Ok(RationalFit {
        model,
        residual: (num / den).sqrt(),
    })
}

fn eval_monic(c: &[Complex], z: Complex) -> Complex {
    c.iter().rev().fold(Complex::new(1.0, 0.0), |acc, &cj| acc * z + cj)
}

/// Roots of `z^m + Σ c_j z^j` by Aberth–Ehrlich iteration.
fn monic_roots(c: &[Complex]) -> Result<Vec<Complex>> {
    let m = c.len();
    let deriv = |z: Complex| {
        let mut d = Complex::new(m as f64, 0.0);
        for j in (1..m).rev() {
            d = d * z + c[j] * j as f64;
        }
        d
    };
    let radius = 1.0 + c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex> = (0..m)
        .map(|k| Complex::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / m as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..m {
            let ratio = eval_monic(c, z[k]) / deriv(z[k]);
            let rep: Complex = (0..m).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (1.0 - ratio * rep);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    if z.iter().all(|r| eval_monic(c, *r).norm() < 1e-8 * radius.powi(m as i32)) {
        Ok(z)
    } else {
        Err(Error::InvalidValue("root finder did not converge".into()))
    }
}

/// Adds the fitted model's values on the mirror image of a positive-axis
/// grid, giving samples on both half-lines.
pub fn extend_to_full_line(f: &SampledComplexFunction, fit: &RationalFit) -> Result<SampledComplexFunction> {
    if f.lo() < 0.0 {
        return Ok(f.clone());
    }
    let mirrored: Vec<f64> = f.grid().iter().rev().filter(|&&x| x > 0.0).map(|&x| -x).collect();
    let mut grid = mirrored.clone();
    let mut values: Vec<Complex> = mirrored.iter().map(|&x| fit.model.eval(Complex::new(x, 0.0))).collect();
    grid.extend_from_slice(f.grid());
    values.extend_from_slice(f.values());
    SampledComplexFunction::new(grid, values, f.tail().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy_core::sampled::{uniform_grid, TailModel};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn aberth_finds_known_roots() {
        // (z - 1)(z + 2i)(z - 0.5 + 0.5i)
        let r = [c(1.0, 0.0), c(0.0, -2.0), c(0.5, -0.5)];
        let c2 = -(r[0] + r[1] + r[2]);
        let c1 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
        let c0 = -(r[0] * r[1] * r[2]);
        let mut found = monic_roots(&[c0, c1, c2]).unwrap();
        for want in r {
            let (i, d) = found
                .iter()
                .enumerate()
                .map(|(i, z)| (i, (z - want).norm()))
                .fold((0, f64::MAX), |a, b| if b.1 < a.1 { b } else { a });
            assert!(d < 1e-12);
            found.remove(i);
        }
    }

    #[test]
    fn recovers_two_pole_model_from_positive_axis() {
        let truth = AnalyticModel::rational_sum(vec![
            SimplePole {
                coefficient: c(1.0, 0.0),
                pole: c(2.0, 0.5),
            },
            SimplePole {
                coefficient: c(0.0, 0.4),
                pole: c(5.0, 1.5),
            },
        ])
        .unwrap();
        let f = SampledComplexFunction::from_fn(
            uniform_grid(0.0, 40.0, 801),
            |x| truth.eval(c(x, 0.0)),
            Some(TailModel::new(1.0, c(1.0, 0.4)).unwrap()),
        )
        .unwrap();
        let fit = rational_fit(&f, 4, 1e-9).unwrap();
        assert!(fit.residual < 1e-9, "{}", fit.residual);
        for x in [-30.0, -5.0, -0.5] {
            let z = c(x, 0.0);
            assert!((fit.model.eval(z) - truth.eval(z)).norm() < 1e-6);
        }
        let full = extend_to_full_line(&f, &fit).unwrap();
        assert_eq!(full.lo(), -40.0);
        assert_eq!(full.len(), 1601);
    }
}
