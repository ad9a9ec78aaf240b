//! Energy wave functions of prepared states and registered observables,
//! their semigroup evolution, the measurement-induced state jump and the
//! retarded propagator. Evolution acts spectrally, as phases `e^{∓iEt}`.

pub mod channel;
pub mod lorentzian;
pub mod overlap;
pub mod wave;

pub use channel::Channel;
pub use lorentzian::{make_lorentzian_observable, make_lorentzian_state, Coefficient, LorentzianSpec};
pub use wave::{
    conjugate_wave, distance, energy_distribution, evolve_observable, evolve_state, inner_product, norm_sq, retarded_propagator,
    semigroup_divergence_check, state_jump, ChannelEntry, DivergenceReport, EnergyWaveFunction, WaveKind,
};
