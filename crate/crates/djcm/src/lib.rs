//! Driven Jaynes-Cummings model: a two-level atom and a quantized cavity
//! mode, both driven by an external classical field.
//!
//! The library provides the exact closed-form solution obtained through an
//! invariant-guided chain of unitary transformations (rotating frame,
//! displacement, second rotating frame), together with independent
//! brute-force propagators used to validate every observable:
//!
//! - [`hilbert`]: truncated Fock-space operators, states, partial traces,
//!   Hermitian eigendecomposition.
//! - [`model`]: physical parameters with the invariant-existence constraint,
//!   all Hamiltonians of the transformation chain, the invariant operator.
//! - [`analytic`]: closed-form evolution blocks, the full solution, and the
//!   explicit series for atomic inversion and mean photon number.
//! - [`oracle`]: frame-exact and RK4 reference propagators.
//! - [`observables`]: inversion, photon statistics, Mandel Q, reduced
//!   density matrices, von Neumann entropy.
//! - [`dispersive`]: large-detuning effective dynamics and the entangled
//!   cat state.
//! - [`validate`]: the acceptance suite driven by `djcm validate`.

pub mod analytic;
pub mod dispersive;
pub mod error;
pub mod hilbert;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod validate;

pub use error::{Error, Result};
