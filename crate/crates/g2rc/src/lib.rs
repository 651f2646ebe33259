//! The rigged-configuration bijection for the adjoint crystal B(2,1) of
//! type G2(1), with exhaustive verification tooling.
//!
//! * [`crystal`]: the fifteen-element crystal, its operators and weights.
//! * [`paths`]: tensor products, highest-weight paths and the energy `D`.
//! * [`rigged_config`]: configurations, vacancy numbers, riggings, charge.
//! * [`bijection`]: the step `δ` and the map `Φ`.
//! * [`inverse`]: the box-adding step and `Φ⁻¹`.
//! * [`harness`]: verification reports, sweeps and example fixtures.

pub mod bijection;
pub mod crystal;
pub mod error;
pub mod harness;
pub mod inverse;
pub mod paths;
pub mod rigged_config;

pub use bijection::{delta_theta, phi, DeltaOutcome, MarkingState};
pub use crystal::{Letter, Weight};
pub use error::{BoundError, InverseError, ParseError, StepError, ValidationError};
pub use inverse::{delta_theta_inv, phi_inv, phi_inv_with_fallback};
pub use paths::{energy, enumerate_paths, local_energy, Path};
pub use rigged_config::{enumerate_rc, Configuration, RcString, RiggedConfiguration};
