//! Exact, numerical and rigorously bounded one-dimensional scattering.
//!
//! The crate computes transmission and reflection probabilities for the
//! stationary Schrödinger equation, Bogoliubov coefficients for parametric
//! oscillators, and Schwarzschild greybody factors, together with upper and
//! lower bounds on all of these.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod comparison;
pub mod error;
pub mod exact;
pub mod greybody;
pub mod millergood;
pub mod model;
pub mod ode;
pub mod optimize;
pub mod quadrature;
pub mod registry;
pub mod solver;

pub use bounds::{AuxiliaryChoice, BoundKind, BoundResult, BoundSet, TimeProfile};
pub use comparison::{ReferenceSolution, ThetaBudget};
pub use error::{Error, Result};
pub use exact::{exact_amplitudes, exact_reflection, exact_transmission, ExactAmplitudes, QnmFrequency};
pub use greybody::GreybodyQuery;
pub use millergood::{MgBoundChoice, MgForm, MgMap};
pub use model::{
    asymptotic_wavenumbers, build_dispersion, canonicalize_mobius, find_extrema, Dispersion, ExtremumKind,
    ExtremumRecord, Mobius, NamedPotential, Perturbation, PotentialSpec, SampledProfile, UnitsConvention,
};
pub use quadrature::QuadratureConfig;
pub use solver::{solve_scattering, ScatteringResult, SolverConfig};
