//! Circulant entanglement witnesses for two qudits.
//!
//! Operators live on ℂ^d ⊗ ℂ^d with |i⟩⊗|k⟩ at row i·d + k. The crate builds
//! the Σ_n block decomposition of circulant operators, the W_α witness
//! family, the β family of circulant states, see-saw product minimization
//! and local Gell-Mann decompositions.

pub mod circulant;
pub mod cli;
pub mod detect;
pub mod error;
pub mod gellmann;
pub mod linalg;
pub mod scalar;
pub mod selftest;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Tolerance, C64};
pub use scalar::Scalar;
