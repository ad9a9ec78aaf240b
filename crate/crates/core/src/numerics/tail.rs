//! Closed-form and quadrature evaluation of power-law tail integrals.
//!
//! All functions integrate the pure power `x^{-p}` beyond an edge
//! `x_edge > 0` of a sampled grid; callers multiply by the tail
//! coefficient.

use super::quadrature::{adaptive_simpson_raw, QuadratureSpec};
use super::{Complex, I};

fn tail_spec() -> QuadratureSpec {
    QuadratureSpec::adaptive(1e-300, 1e-13)
}

/// `∫_X^∞ x^{-p} dx` for `p > 1`.
pub fn power(p: f64, x_edge: f64) -> f64 {
    x_edge.powf(1.0 - p) / (p - 1.0)
}

/// `∫_X^∞ x^{-p} / (x - z) dx` for any `z` off the ray `[X, ∞)`.
///
/// Real `z` with `z < X` gives the ordinary (non-singular) integral.
pub fn cauchy_right(p: f64, x_edge: f64, z: Complex) -> Complex {
    let x = x_edge;
    if z.norm() <= 0.5 * x {
        // 1/(x-z) = Σ z^k / x^{k+1}
        let mut sum = Complex::new(0.0, 0.0);
        let mut zk = Complex::new(1.0, 0.0);
        let mut xp = x.powf(-p);
        for k in 0..200 {
            let term = zk * (xp / (p + k as f64));
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
            zk *= z;
            xp /= x;
        }
        return sum;
    }
    if p == p.round() && (1.0..=8.0).contains(&p) {
        // 1/(x^p (x-z)) = (1/(x^{p-1}(x-z)) - 1/x^p)/z
        let mut v = (x / (x - z)).ln() / z;
        for k in 2..=p as i32 {
            v = (v - x.powi(1 - k) / (k - 1) as f64) / z;
        }
        return v;
    }
    // x = X u^{-1/p}:  (X^{1-p}/p) ∫_0^1 du / (X - z u^{1/p})
    let pref = x.powf(1.0 - p) / p;
    let inv_p = 1.0 / p;
    let f = |u: f64| 1.0 / (x - z * u.powf(inv_p));
    pref * adaptive_simpson_raw(&f, 0.0, 1.0, &tail_spec()).value
}

/// `∫_{-∞}^{-X} |x|^{-p} / (x - z) dx`.
pub fn cauchy_left(p: f64, x_edge: f64, z: Complex) -> Complex {
    -cauchy_right(p, x_edge, -z)
}

/// `∫_X^∞ e^{-iEt} E^{-p} dE` for `t ≥ 0` (`p > 1` when `t = 0`).
pub fn fourier(p: f64, x_edge: f64, t: f64) -> Complex {
    if t == 0.0 {
        return Complex::new(power(p, x_edge), 0.0);
    }
    const ASYMPTOTIC_START: f64 = 40.0;
    let tx = t * x_edge;
    if tx >= ASYMPTOTIC_START {
        return fourier_asymptotic(p, x_edge, t);
    }
    // E = X e^s on [X, Y], then the asymptotic series from Y = 40/t.
    let y = ASYMPTOTIC_START / t;
    let smax = (y / x_edge).ln();
    let f = |s: f64| {
        let e = x_edge * s.exp();
        (-I * (e * t)).exp() * e.powf(1.0 - p)
    };
    let near = adaptive_simpson_raw(&f, 0.0, smax, &tail_spec()).value;
    near + fourier_asymptotic(p, y, t)
}

/// Integration-by-parts series, truncated at its smallest term.
fn fourier_asymptotic(p: f64, x_edge: f64, t: f64) -> Complex {
    let itx = I * (t * x_edge);
    let lead = (-I * (x_edge * t)).exp() * x_edge.powf(-p) / (I * t);
    let mut sum = Complex::new(1.0, 0.0);
    let mut term = Complex::new(1.0, 0.0);
    let mut last = 1.0;
    for k in 0..200 {
        let next = term * (-(p + k as f64)) / itx;
        let n = next.norm();
        if n >= last || n < 1e-18 {
            if n < 1e-18 {
                sum += next;
            }
            break;
        }
        sum += next;
        term = next;
        last = n;
    }
    lead * sum
}
