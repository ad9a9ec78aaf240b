//! Numerical toolkit for time-asymmetric quantum mechanics in the
//! Hardy-space formulation.
//!
//! Hardy-class energy wave functions are built, verified and
//! transformed in [`hardy_core`], evolved under the `t ≥ 0` semigroup in
//! [`quantum_states`], paired through S-matrix models in [`transition`],
//! and confronted with simulated lab-clock event ensembles in
//! [`ensemble_time`].

pub mod cli;
pub mod ensemble_time;
pub mod error;
pub mod hardy_core;
pub mod numerics;
pub mod quantum_states;
pub mod transition;

pub use error::{Error, Result};
