//! Informational power of finite-dimensional quantum measurements.
//!
//! The informational power `W(Π)` of a POVM is the largest mutual information
//! between a classical message, encoded into an ensemble of quantum states,
//! and the outcome of measuring `Π`. It coincides with the one-shot classical
//! capacity of the quantum-classical channel `ρ ↦ Σ_j Tr[ρΠ_j] |j⟩⟨j|`.
//!
//! - [`linalg`]: Hermitian eigendecomposition, operator square roots, tensor products.
//! - [`objects`]: states, ensembles, POVMs and their named constructors.
//! - [`info`]: entropy, mutual information, Blahut–Arimoto.
//! - [`duality`]: the ensemble ↔ POVM maps `Π(S)` and `R(Λ, σ)`.
//! - [`solver`]: the multistart see-saw search and the commuting fast path.

pub mod duality;
pub mod error;
pub mod info;
pub mod linalg;
pub mod objects;
pub mod solver;

pub use error::{Error, Result};
pub use info::{ClassicalChannel, Distribution, LogBase};
pub use linalg::HermitianMatrix;
pub use objects::{DensityOperator, Ensemble, Povm, PureState};
pub use solver::{informational_power, PowerReport, SolverConfig};
