//! Numerics for the Zak representation of a bosonic mode and the GKP code.
//!
//! * [`modular_arith`]: centered fractional parts and Zak-point canonicalization.
//! * [`zak_core`]: patches, grids, modular wavefunctions and the Zak transform.
//! * [`operators`]: modular phases and translations, `X(t)` and `Z(t)`.
//! * [`gkp`]: GKP codewords, stabilizers, ideal error correction and logical qubits.
//! * [`ssd`]: the qubit ⊗ gauge-mode decomposition and its gauge traces.
//! * [`cli`]: the `zakgkp` command-line front end.

pub mod cli;
pub mod error;
pub mod gkp;
pub mod modular_arith;
pub mod operators;
pub mod ssd;
pub mod zak_core;

pub use error::{Result, ZakError};
