//! Laboratory for conjugate-coding probabilistic private-key encryption.
//!
//! A plaintext bit `m` is encrypted as `k` qubits `|r_1⟩_{s_1} ⊗ … ⊗ |r_k⟩_{s_k}`, where `s` is
//! the shared key (a basis per qubit) and `r` is a fresh random string whose parity equals
//! `m`. The crate implements the protocol, builds the cipher-state density operators
//! exactly, and simulates measurement, key-recovery and signalling attacks against it.

pub mod acceptance;
pub mod attacks;
pub mod bits;
pub mod classical;
pub mod densities;
pub mod error;
pub mod linalg;
pub mod nosignal;
pub mod rng;
pub mod scheme;
pub mod unicity;

pub use bits::BitString;
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityOperator, ProbabilityDistribution};
pub use rng::SimRng;
