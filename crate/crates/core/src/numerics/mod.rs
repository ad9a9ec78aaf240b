//! Shared quadrature engines.
//!
//! Principal-value integration on sampled grids, adaptive and
//! tail-corrected quadrature, Filon-type evaluation of `e^{-iEt}`
//! integrals and exact pole/residue evaluation of rational integrands.

pub mod oscillatory;
pub mod pv;
pub mod quadrature;
pub mod rational;
pub mod special;
pub mod tail;

pub use num_complex::Complex64 as Complex;

pub use oscillatory::{oscillatory_integral, OscillatoryInput, OscillatorySpec};
pub use pv::pv_integral;
pub use quadrature::{Estimate, QuadratureMethod, QuadratureSpec};
pub use rational::{PoleExpansion, PoleTerm};

/// Imaginary unit.
pub const I: Complex = Complex::new(0.0, 1.0);
