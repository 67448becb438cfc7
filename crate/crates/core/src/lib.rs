//! Conditional photon statistics for imperfect single-photon sources sent
//! through passive linear-optical networks with photodetection.
//!
//! Sources are modeled as incoherent mixtures of photon-number states (or, for
//! the coherent scheme, pure superpositions). A network is an `N x N` unitary
//! acting on creation operators as `a_i^dagger -> sum_k L[k][i] a_k^dagger`.
//! Modes `2..N` are measured and the photon statistics of mode 1 are returned
//! conditioned on the detection pattern.
//!
//! Modes are indexed from 0 in the API; "mode 1" in user-facing output is
//! index 0.

pub mod conditioner;
pub mod detectors;
pub mod error;
pub mod fock;
pub mod interferometer;
pub mod merit;
pub mod permanent;
pub mod schemes;
pub mod search;

pub use conditioner::{
    condition_mixed, condition_mixed_bs_closed_form, condition_pure, propagate_pure, ConditionalResult,
    DetectionPattern, PureState,
};
pub use error::{Error, Result};
pub use fock::{distribution_moments, enumerate_inputs, InputSpec, ModeDistribution, PhotonConfig};
pub use interferometer::Interferometer;
pub use merit::{figures_of_merit, Figure, MeritReport};
pub use permanent::{permanent, permanent_with_multiplicity, ComplexMatrix};
