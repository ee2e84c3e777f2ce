//! Stabilizer simulation of qubit thermal relaxation.
//!
//! The thermal relaxation channel (T1 decay, T2 dephasing, optionally a
//! finite-temperature bath) is written as an affine combination of the
//! stabilizer-simulable branches `{I, Z, Reset|0>, Reset|1>}`. When
//! `T2 <= T1` the combination is a true probability distribution and can be
//! sampled directly on a CHP tableau; otherwise it is sampled
//! quasi-probabilistically with sign weights.
//!
//! Module map:
//!
//! - [`channel`]: closed-form parameters, Pauli twirl and decompositions.
//! - [`dense`]: exact density-matrix oracle (Kraus, RK4, fidelities, PTMs).
//! - [`tableau`]: bit-packed stabilizer tableau with measurement and reset.
//! - [`sampler`]: branch sampling, per-shot RNG streams, signed estimators.
//! - [`circuit`], [`codes`], [`noise`], [`experiment`]: memory experiments.
//! - [`decoder`]: fault dictionary, greedy matching and detector-model export.

pub mod channel;
pub mod circuit;
pub mod codes;
pub mod decoder;
pub mod dense;
pub mod error;
pub mod experiment;
pub mod gf2;
pub mod noise;
pub mod sampler;
pub mod tableau;

pub use error::{Error, Result};
