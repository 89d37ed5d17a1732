//! Channel-adapted quantum weight enumerators and linear-programming bounds
//! on the existence of approximate quantum codes.
//!
//! The crate computes A- and B-type enumerators of explicit codes under a
//! partitioned Kraus set, assembles the connection matrices that relate them
//! to the auxiliary enumerator, and builds feasibility programs whose
//! infeasibility rules out codes with given parameters.

pub mod channel;
pub mod code;
pub mod combinatorics;
pub mod connection;
pub mod enumerator;
pub mod error;
pub mod sparse;
pub mod lp;
pub mod pauli;
pub mod programs;

pub use channel::{KrausClass, KrausOperator, KrausSet, SingleQubitOperator};
pub use code::{DickeBasisCode, QuantumCode};
pub use enumerator::{AuxVector, EnumeratorPair};

pub use error::{Error, Result};
pub use lp::{FeasibilityVerdict, LpModel, SolverOptions, Status};
pub use pauli::{OrbitClass, Pauli1, PauliString};

pub use num_complex::Complex64;

/// Numerical tolerances shared across the crate.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Codeword orthonormality.
    pub orthonormality: f64,
    /// Identity checks between independently computed quantities.
    pub identity: f64,
    /// Primal feasibility of LP witnesses.
    pub feasibility: f64,
    /// Margin required of a Farkas certificate.
    pub certificate: f64,
    /// Threshold above which a maximized `A_2` counts as strictly positive.
    pub strict: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        TOLERANCES
    }
}

pub const TOLERANCES: Tolerances = Tolerances {
    orthonormality: 1e-10,
    identity: 1e-9,
    feasibility: 1e-8,
    certificate: 1e-7,
    strict: 1e-7,
};
