//! Hardy-class functions of both half-planes: the criterion test, the
//! dispersion relations, the causal transform, analytic continuation and
//! conjugation duality.

pub mod analytic;
pub mod causal;
pub mod continuation;
pub mod criterion;
pub mod fit;
pub mod function;
pub mod hilbert;
pub mod sampled;

pub use analytic::{AnalyticModel, HalfPlane, SimplePole};
pub use causal::{causal_transform, causal_transform_sampled, CausalOptions, CausalSignal};
pub use continuation::titchmarsh_continuation;
pub use criterion::{hardy_criterion, CriterionConfig, CriterionReport};
pub use fit::{rational_fit, RationalFit};
pub use function::{conjugate_hardy, ComplexFunction, HardyFunction};
pub use hilbert::hilbert_transform;
pub use sampled::{Part, SampledComplexFunction, TailModel};
