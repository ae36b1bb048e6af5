//! Quantum energy teleportation (QET) between two coupled spin-1/2 particles
//! in a thermal Gibbs state.
//!
//! The crate evaluates the closed-form model (Gibbs coefficients, correlation
//! measures, protocol energetics, optimal local Kraus extraction, temperature
//! thresholds) and cross-checks every formula against brute-force
//! density-matrix computations in [`oracle`].
//!
//! Units: energies are dimensionless, Boltzmann's constant is 1 and the single
//! temperature input is `kT`. Entropies and correlations are in bits.

pub mod analysis;
pub mod cli;
pub mod correlations;
pub mod error;
pub mod local_extraction;
pub mod numkit;
pub mod oracle;
pub mod qet_protocol;
pub mod spin_model;
pub mod verify;

pub use error::{QetError, Result};
pub use spin_model::{GibbsState, SystemParams};
