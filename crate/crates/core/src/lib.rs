//! Pauli correlation encoding (PCE) for RNA secondary-structure QUBOs.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`rna`] turns a nucleotide sequence into a quartet QUBO with explicit
//!    conflict and stacking relations.
//! 2. [`encoding`] places every QUBO variable on a two-body Pauli correlator
//!    (`XX`, `YY` or `ZZ`) of a small qubit register.
//! 3. [`ansatz`] builds the layered Ry/MS circuit, choosing entangling pairs
//!    from QUBO importance (optionally restricted to a device graph).
//! 4. [`sim`] and [`train`] evaluate correlator expectation values on a
//!    statevector and fit the circuit angles against the sigmoid QUBO loss.
//! 5. [`decode`] converts expectation values into feasible bitstrings, and
//!    [`oracle`] / [`metrics`] score them against an exact optimum.
//!
//! [`harness`] strings the stages together into seeded, reproducible
//! experiments.

pub mod ansatz;
pub mod decode;
pub mod encoding;
mod error;
pub mod harness;
pub mod metrics;
pub mod oracle;
pub mod rna;
pub mod rng;
pub mod sim;
pub mod train;

pub use error::{Error, Result};
