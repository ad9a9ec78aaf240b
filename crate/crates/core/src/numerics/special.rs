//! Special functions needed by the pole path of half-line Fourier integrals.

use super::Complex;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Scaled exponential integral `e^z E1(z)` on the principal branch.
///
/// Equivalent to `∫_0^∞ e^{-s} / (s + z) ds` for `z` off the closed
/// negative real axis. On the cut the value approached from above
/// (`Im z -> 0+`) is returned.
pub fn exp_e1(z: Complex) -> Complex {
    let r = z.norm();
    if r == 0.0 {
        return Complex::new(f64::INFINITY, 0.0);
    }
    // Near the negative real axis the series loses at most e^{|z|+Re z}
    // to cancellation, while the continued fraction converges slowly there.
    let use_series = r <= 2.0 || (z.re < 0.0 && r <= 40.0 && r + z.re <= 6.0);
    if use_series {
        let z = if z.im == 0.0 && z.re < 0.0 { Complex::new(z.re, 0.0) } else { z };
        z.exp() * e1_series(z)
    } else {
        exp_e1_continued_fraction(z)
    }
}

fn e1_series(z: Complex) -> Complex {
    // E1(z) = -γ - ln z - Σ_{k≥1} (-z)^k / (k k!)
    let mut sum = Complex::new(0.0, 0.0);
    let mut term = Complex::new(1.0, 0.0);
    for k in 1..400 {
        let kf = k as f64;
        term *= -z / kf;
        let add = term / kf;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    let ln = if z.im == 0.0 && z.re < 0.0 {
        // upper side of the cut
        Complex::new((-z.re).ln(), std::f64::consts::PI)
    } else {
        z.ln()
    };
    -EULER_GAMMA - ln - sum
}

fn exp_e1_continued_fraction(z: Complex) -> Complex {
    // e^z E1(z) = 1/(z+1- 1/(z+3- 4/(z+5- ...))), modified Lentz.
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut cc = Complex::new(1.0 / tiny, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..20_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        cc = b + an / cc;
        if cc.norm() < tiny {
            cc = Complex::new(tiny, 0.0);
        }
        let del = cc * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h
}
