//! The ensemble of beginnings of time: lab-clock preparation and
//! registration events, their mapping onto the parameter time `t ≥ 0`,
//! seeded decay ensembles and their survival statistics.
//!
//! Registrations are idealized as instantaneous; no dead time is modelled.

pub mod events;
pub mod survival;

pub use events::{
    map_to_parameter_time, read_events_csv, sample_decay_ensemble, sample_from_survival, uniform_draw, validate_records, write_events_csv,
    LabEventRecord, PreparationScheme,
};
pub use survival::{compare_to_theory, event_grid, survival_curve, wilson_interval, ComparisonReport, SurvivalCurve};
