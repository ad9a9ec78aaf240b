//! Rational functions in partial-fraction form and their exact
//! half-line Fourier integrals.
//!
//! A [`PoleExpansion`] is `constant + Σ c_k / (E - p_k)^{n_k}`. Products
//! are decomposed back into partial fractions, so every product of pole
//! models (wave functions times S-matrix elements) stays in this form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::special::exp_e1;
use super::{Complex, I};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    pub coefficient: Complex,
    pub pole: Complex,
    pub order: u32,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PoleExpansion {
    pub constant: Complex,
    pub terms: Vec<PoleTerm>,
}

/// Relative distance under which two poles are merged.
const POLE_MERGE_TOL: f64 = 1e-12;

fn same_pole(a: Complex, b: Complex) -> bool {
    (a - b).norm() <= POLE_MERGE_TOL * (1.0 + a.norm().max(b.norm()))
}

impl PoleExpansion {
    pub fn zero() -> Self {
        PoleExpansion::default()
    }

    pub fn constant(c: Complex) -> Self {
        PoleExpansion {
            constant: c,
            terms: Vec::new(),
        }
    }

    pub fn simple_pole(coefficient: Complex, pole: Complex) -> Self {
        PoleExpansion {
            constant: Complex::new(0.0, 0.0),
            terms: vec![PoleTerm { coefficient, pole, order: 1 }],
        }
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.constant + self.terms.iter().map(|t| t.coefficient / (z - t.pole).powu(t.order)).sum::<Complex>()
    }

    pub fn is_zero(&self) -> bool {
        self.constant == Complex::new(0.0, 0.0) && self.terms.iter().all(|t| t.coefficient == Complex::new(0.0, 0.0))
    }

    pub fn poles(&self) -> impl Iterator<Item = Complex> + '_ {
        self.terms.iter().map(|t| t.pole)
    }

    /// The function `E ↦ conj(f(conj E))`, i.e. the analytic continuation
    /// of the complex conjugate of the real-axis values.
    pub fn conj(&self) -> Self {
        PoleExpansion {
            constant: self.constant.conj(),
            terms: self
                .terms
                .iter()
                .map(|t| PoleTerm {
                    coefficient: t.coefficient.conj(),
                    pole: t.pole.conj(),
                    order: t.order,
                })
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex) -> Self {
        PoleExpansion {
            constant: self.constant * s,
            terms: self
                .terms
                .iter()
                .map(|t| PoleTerm {
                    coefficient: t.coefficient * s,
                    ..*t
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &PoleExpansion) -> Self {
        let mut out = self.clone();
        out.constant += other.constant;
        out.terms.extend_from_slice(&other.terms);
        out.simplified()
    }

    /// `f(z) -> f(z + shift)`: poles move by `-shift`.
    pub fn shifted(&self, shift: Complex) -> Self {
        PoleExpansion {
            constant: self.constant,
            terms: self.terms.iter().map(|t| PoleTerm { pole: t.pole - shift, ..*t }).collect(),
        }
    }

    /// Merge terms sharing pole and order; drop exact zeros.
    pub fn simplified(mut self) -> Self {
        let mut merged: Vec<PoleTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            if let Some(m) = merged.iter_mut().find(|m| m.order == t.order && same_pole(m.pole, t.pole)) {
                m.coefficient += t.coefficient;
            } else {
                merged.push(t);
            }
        }
        merged.retain(|t| t.coefficient != Complex::new(0.0, 0.0));
        self.terms = merged;
        self
    }

    pub fn mul(&self, other: &PoleExpansion) -> Self {
        let mut out = PoleExpansion::constant(self.constant * other.constant);
        for t in &self.terms {
            out.terms.push(PoleTerm {
                coefficient: t.coefficient * other.constant,
                ..*t
            });
        }
        for t in &other.terms {
            out.terms.push(PoleTerm {
                coefficient: t.coefficient * self.constant,
                ..*t
            });
        }
        for a in &self.terms {
            for b in &other.terms {
                let k = a.coefficient * b.coefficient;
                if same_pole(a.pole, b.pole) {
                    out.terms.push(PoleTerm {
                        coefficient: k,
                        pole: a.pole,
                        order: a.order + b.order,
                    });
                } else {
                    for t in split_pair(a.pole, a.order, b.pole, b.order) {
                        out.terms.push(PoleTerm {
                            coefficient: t.coefficient * k,
                            ..t
                        });
                    }
                }
            }
        }
        out.simplified()
    }

    /// Sum of the simple-pole coefficients: the `1/E` asymptotic coefficient.
    pub fn simple_residue_sum(&self) -> Complex {
        self.terms.iter().filter(|t| t.order == 1).map(|t| t.coefficient).sum()
    }

    /// Leading asymptotic behaviour `f(E) ≈ c E^{-p}` as `|E| → ∞`.
    pub fn asymptotic(&self) -> (f64, Complex) {
        if self.constant.norm() > 0.0 {
            return (0.0, self.constant);
        }
        let scale: f64 = self.terms.iter().map(|t| t.coefficient.norm()).sum::<f64>().max(1e-300);
        // coefficient of E^{-m}: Σ over terms of order n ≤ m  c * binom(m-1, n-1) p^{m-n}
        for m in 1..=8u32 {
            let mut cm = Complex::new(0.0, 0.0);
            for t in &self.terms {
                if t.order <= m {
                    cm += t.coefficient * binom(m - 1, t.order - 1) * t.pole.powu(m - t.order);
                }
            }
            let pscale = self.terms.iter().map(|t| t.pole.norm()).fold(1.0, f64::max).powi((m - 1) as i32);
            if cm.norm() > 1e-12 * scale * pscale {
                return (m as f64, cm);
            }
        }
        (8.0, Complex::new(0.0, 0.0))
    }

    /// Exact `∫_0^∞ e^{-iEt} f(E) dE` for `t ≥ 0`.
    ///
    /// For `t > 0` the contour is rotated onto the negative imaginary
    /// axis; poles in the fourth quadrant contribute `-2πi` residues and
    /// the rotated integral gives scaled exponential integrals.
    pub fn half_line_fourier(&self, t: f64) -> Result<Complex> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        if self.constant.norm() > 0.0 {
            return Err(Error::NonDecayingIntegrand("rational integrand tends to a nonzero constant".into()));
        }
        let scale: f64 = self.terms.iter().map(|t| t.coefficient.norm()).sum();
        if t == 0.0 && self.simple_residue_sum().norm() > 1e-12 * scale.max(1e-300) {
            return Err(Error::NonDecayingIntegrand(
                "integrand decays like 1/E, the t = 0 integral diverges".into(),
            ));
        }
        let mut total = Complex::new(0.0, 0.0);
        for term in &self.terms {
            let p = term.pole;
            if p.im == 0.0 && p.re >= 0.0 {
                return Err(Error::InvalidValue(format!("pole {p} lies on the integration path")));
            }
            if t > 0.0 && p.re == 0.0 && p.im < 0.0 {
                return Err(Error::InvalidValue(format!("pole {p} lies on the rotated contour")));
            }
            total += term.coefficient * half_line_moment(p, term.order, t);
        }
        Ok(total)
    }
}

impl PoleExpansion {
    /// Exact `∫_{-∞}^{∞} |f(x)|² dx` for a sum of simple poles off the real axis.
    pub fn line_integral_sq(&self) -> Result<f64> {
        if self.constant.norm() > 0.0 {
            return Err(Error::NonIntegrableInput("nonzero constant term".into()));
        }
        if let Some(t) = self.terms.iter().find(|t| t.order != 1) {
            return Err(Error::InvalidValue(format!("pole of order {} not supported", t.order)));
        }
        if let Some(t) = self.terms.iter().find(|t| t.pole.im == 0.0) {
            return Err(Error::NonIntegrableInput(format!("pole {} on the real axis", t.pole)));
        }
        // ∫ dx / ((x - a)(x - conj b)) = 2πi/(a - conj b) if Im a > 0 > Im conj b, etc.
        let mut total = Complex::new(0.0, 0.0);
        for j in &self.terms {
            for k in &self.terms {
                let a = j.pole;
                let b = k.pole.conj();
                let v = if a.im > 0.0 && b.im < 0.0 {
                    2.0 * PI * I / (a - b)
                } else if a.im < 0.0 && b.im > 0.0 {
                    2.0 * PI * I / (b - a)
                } else {
                    continue;
                };
                total += j.coefficient * k.coefficient.conj() * v;
            }
        }
        Ok(total.re.max(0.0))
    }
}

/// `J_n(p, t) = ∫_0^∞ e^{-iEt} (E - p)^{-n} dE`; for `n = 1, t = 0` only
/// the finite part `-Log(-p)` is returned (it cancels across a sum whose
/// simple residues add to zero).
fn half_line_moment(p: Complex, order: u32, t: f64) -> Complex {
    let mut j = if t == 0.0 {
        -(-p).ln()
    } else {
        let z = -I * p * t;
        let mut v = exp_e1(z);
        if p.re > 0.0 && p.im < 0.0 {
            v += -2.0 * PI * I * (-I * p * t).exp();
        }
        v
    };
    // J_k = (-p)^{1-k}/(k-1) - (i t/(k-1)) J_{k-1}
    for k in 2..=order {
        let km1 = (k - 1) as f64;
        j = (-p).powi(1 - k as i32) / km1 - I * t / km1 * j;
    }
    j
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Partial fractions of `1 / ((E - p)^m (E - q)^n)` for `p ≠ q`.
fn split_pair(p: Complex, m: u32, q: Complex, n: u32) -> Vec<PoleTerm> {
    // 1/((E-p)^m (E-q)^n) = Σ_{k=1}^m A_k/(E-p)^k + Σ_{k=1}^n B_k/(E-q)^k
    // A_k = (1/(m-k)!) d^{m-k}/dE^{m-k} (E-q)^{-n} at E = p
    //     = binom(n+m-k-1, m-k) (-1)^{m-k} (p-q)^{-(n+m-k)}
    let mut out = Vec::with_capacity((m + n) as usize);
    for k in 1..=m {
        let j = m - k;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.push(PoleTerm {
            coefficient: sign * binom(n + j - 1, j) * (p - q).powi(-((n + j) as i32)),
            pole: p,
            order: k,
        });
    }
    for k in 1..=n {
        let j = n - k;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.push(PoleTerm {
            coefficient: sign * binom(m + j - 1, j) * (q - p).powi(-((m + j) as i32)),
            pole: q,
            order: k,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::simpson_nonuniform;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn line_integral_of_single_pole() {
        let f = PoleExpansion::simple_pole(c(2.0, -1.0), c(1.0, 0.7));
        let v = f.line_integral_sq().unwrap();
        assert!((v - PI * 5.0 / 0.7).abs() < 1e-12);
    }

    #[test]
    fn line_integral_against_quadrature() {
        let f = PoleExpansion::simple_pole(c(1.0, 0.5), c(1.0, 0.7))
            .add(&PoleExpansion::simple_pole(c(-0.3, 0.2), c(-2.0, -0.4)))
            .add(&PoleExpansion::simple_pole(c(0.8, 0.0), c(0.5, 1.5)));
        let exact = f.line_integral_sq().unwrap();
        let n = 2_000_000;
        let (lo, hi) = (-2000.0, 2000.0);
        let grid: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
        let vals: Vec<Complex> = grid.iter().map(|&x| c(f.eval(c(x, 0.0)).norm_sqr(), 0.0)).collect();
        let approx = simpson_nonuniform(&grid, &vals).re;
        // tail beyond ±2000 of |Σc|²/x²
        let tail = 2.0 * f.simple_residue_sum().norm_sqr() / hi;
        assert!((exact - approx - tail).abs() < 1e-6, "{exact} vs {}", approx + tail);
    }

    #[test]
    fn split_pair_reconstructs_product() {
        let (p, q) = (c(1.0, 0.5), c(-0.3, -2.0));
        for (m, n) in [(1, 1), (2, 1), (1, 3), (3, 2)] {
            let terms = split_pair(p, m, q, n);
            for z in [c(0.3, 0.1), c(4.0, -1.0), c(-2.0, 3.0)] {
                let direct = 1.0 / ((z - p).powu(m) * (z - q).powu(n));
                let sum: Complex = terms.iter().map(|t| t.coefficient / (z - t.pole).powu(t.order)).sum();
                assert!((direct - sum).norm() < 1e-12 * direct.norm(), "m={m} n={n}");
            }
        }
    }

    #[test]
    fn product_matches_pointwise_product() {
        let a = PoleExpansion::simple_pole(c(1.0, 2.0), c(2.0, 0.5)).add(&PoleExpansion::simple_pole(c(-0.5, 0.0), c(1.0, 1.0)));
        let b = PoleExpansion::simple_pole(c(0.3, -1.0), c(2.0, 0.5)).add(&PoleExpansion::constant(c(1.0, 0.0)));
        let ab = a.mul(&b);
        for z in [c(0.0, 0.0), c(3.0, -1.0), c(-1.0, 5.0)] {
            assert!((ab.eval(z) - a.eval(z) * b.eval(z)).norm() < 1e-12);
        }
        assert!(ab.terms.iter().any(|t| t.order == 2));
    }

    #[test]
    fn asymptotic_of_lorentzian_product() {
        let p = c(2.0, 0.5);
        let f = PoleExpansion::simple_pole(c(1.0, 0.0), p).mul(&PoleExpansion::simple_pole(c(1.0, 0.0), p.conj()));
        let (order, coeff) = f.asymptotic();
        assert_eq!(order, 2.0);
        assert!((coeff - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn t_zero_lorentzian_closed_form() {
        // 1/((E-2)^2+0.25) = -i/(E-p) + i/(E-conj p), p = 2 + 0.5i
        let p = c(2.0, 0.5);
        let f = PoleExpansion::simple_pole(-I, p).add(&PoleExpansion::simple_pole(I, p.conj()));
        let v = f.half_line_fourier(0.0).unwrap();
        let exact = 2.0 * (PI / 2.0 + 4.0f64.atan());
        assert!((v - exact).norm() < 1e-13, "{v} vs {exact}");
    }

    #[test]
    fn one_over_e_at_t_zero_is_rejected() {
        let f = PoleExpansion::simple_pole(c(1.0, 0.0), c(2.0, 0.5));
        assert!(matches!(f.half_line_fourier(0.0), Err(Error::NonDecayingIntegrand(_))));
        assert!(matches!(f.half_line_fourier(-1.0), Err(Error::NegativeTime(_))));
    }

    fn dense_oracle(f: &PoleExpansion, t: f64, emax: f64, n: usize) -> Complex {
        let grid: Vec<f64> = (0..=n).map(|k| emax * k as f64 / n as f64).collect();
        let vals: Vec<Complex> = grid.iter().map(|&e| (-I * e * t).exp() * f.eval(c(e, 0.0))).collect();
        simpson_nonuniform(&grid, &vals)
    }

    #[test]
    fn higher_order_poles_against_dense_quadrature() {
        // decays like E^-3 so truncation at 2000 costs < 1e-7
        let p = c(1.5, 1.2);
        let s = c(2.0, -0.3);
        let f = PoleExpansion::simple_pole(c(1.0, 0.0), p)
            .mul(&PoleExpansion::simple_pole(c(1.0, 0.0), p))
            .mul(&PoleExpansion::simple_pole(c(0.7, -0.2), s));
        for t in [0.0, 0.7, 3.0] {
            let exact = f.half_line_fourier(t).unwrap();
            let approx = dense_oracle(&f, t, 2000.0, 2_000_000);
            assert!((exact - approx).norm() < 2e-6, "t={t}: {exact} vs {approx}");
        }
    }
}
