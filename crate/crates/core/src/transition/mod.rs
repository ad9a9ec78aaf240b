//! S-matrix models and the transition amplitude `a(t)` and Born
//! probability `P(t) = |a(t)|²` between a prepared state and a
//! registered observable.

pub mod amplitude;
pub mod smatrix;

#[cfg(test)]
mod tests;

pub use amplitude::{
    amplitude_curve, fit_decay_rate, read_amplitudes_csv, transition_amplitude, transition_probability, write_amplitudes_csv, AmplitudeMethod,
    AmplitudeOptions, AmplitudeResult, ExponentialFit, MethodChoice, PictureResults,
};
pub use smatrix::{PhaseShift, SChannel, SElement, SMatrixModel};
