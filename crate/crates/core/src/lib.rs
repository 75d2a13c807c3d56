//! Variational quantum classifiers over quantum random-access-code (QRAC)
//! encodings of discrete features.
//!
//! The crate is layered bottom-up:
//!
//! - [`statevec`]: exact dense statevector simulation.
//! - [`star`]: sum-of-products simulation of readout-star circuits on product inputs.
//! - [`qrac`]: QRAC codebooks, Helstrom success probabilities, coding bounds.
//! - [`featmap`]: classical-to-quantum encoders (ZZ map, basis, QRAC blocks, latent qubits).
//! - [`ansatz`]: parameterized RyRz and XXZZ circuits.
//! - [`optim`]: SPSA, Nelder-Mead and Adam.
//! - [`vqc`]: the classifier, its losses and training loop.
//! - [`data`]: dataset ingestion, preprocessing, folds and synthetic generators.
//! - [`analysis`]: single-qubit separability of QRAC label patterns.
//!
//! Qubit 0 is always the most significant bit of a basis-state index.

pub mod analysis;
pub mod ansatz;
pub mod data;
pub mod error;
pub mod featmap;
pub mod optim;
pub mod qrac;
pub mod star;
pub mod statevec;
pub mod vqc;

pub use error::{Error, Result};
