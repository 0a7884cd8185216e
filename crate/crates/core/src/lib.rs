//! Threshold-changeable secret sharing, classical and quantum.
//!
//! * [`field`]: GF(p) arithmetic, polynomials, interpolation and linear solves.
//! * [`classical`]: bivariate-polynomial sharing with truncation-based
//!   threshold changes, and the retained-share attack that defeats them.
//! * [`quantum`]: dense and closed-form GHZ simulation (CNOT, partial trace,
//!   purity, fidelity, measurement).
//! * [`protocol`]: the GHZ sharing session, where splitting a share raises
//!   the threshold for everyone.

pub mod classical;
pub mod field;
pub mod protocol;
pub mod quantum;

pub use classical::{ClassicalShare, TruncatedShare};
pub use field::{BivariatePoly, FieldElement, PrimeField, UnivariatePoly};
pub use protocol::{ShareHandle, SharingSession};
pub use quantum::{DensityMatrix, GhzForm, SecretQubit, StateVector};
