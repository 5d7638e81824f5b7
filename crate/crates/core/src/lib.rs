//! Exact state-vector simulation and closed-form analysis of probabilistic
//! protocols that implement the nonlocal gate `exp(iξ σ_nA ⊗ σ_nB)` from one
//! shared, non-maximally entangled three-qubit state.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense few-qubit linear algebra (gates, Kraus maps, partial
//!   measurement, partial trace, entropies, PPT test).
//! * [`protocol`]: the stator construction with its three fixed regimes
//!   (deterministic, FPT, small-ξ) and the POVM-assisted improved technique.
//! * [`analysis`]: fidelity/entanglement trade-off, optimal ξ, curve
//!   generation and crossing detection.
//! * [`multiparty`]: quasi-GHZ resource states and the Charlie-mediated
//!   N-party gate.
//! * [`verify`]: the end-to-end verification checks shared by the CLI and the
//!   acceptance test target.

pub mod analysis;
pub mod error;
pub mod linalg;
pub mod multiparty;
pub mod protocol;
pub mod report;
pub mod rng;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{
    binary_entropy, distance_up_to_phase, pauli_axis_matrix, ppt_min_eigenvalue,
    von_neumann_entropy, Basis, DensityMatrix, MeasurementOutcome, Operator, PauliAxis,
    StateVector, C64,
};
pub use protocol::{
    BasisOutcome, BranchRecord, GateSpec, ImprovedParams, MeasurementAngles, ProtocolReport,
    ResourceSpec,
};
