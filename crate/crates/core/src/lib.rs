//! Exact Markovian evolution of two coupled decaying bosonic modes.
//!
//! Two quantized fields with annihilation operators `a`, `b` interact with
//! strength `g` while each decays into its own zero-temperature bath at rates
//! `gamma_a`, `gamma_b`. The density matrix obeys the Lindblad equation
//!
//! ```text
//! drho/dz = -i g [a b† + a† b, rho] + gamma_a L[a] rho + gamma_b L[b] rho,
//! L[c] rho = 2 c rho c† - (c†c rho + rho c†c),
//! ```
//!
//! with the propagation distance `z` playing the role of time. Removing the
//! quantum-jump parts of the dissipators with the superoperator map
//! `exp[±(J_a+J_b)/2]` turns this into a von Neumann-like equation for an
//! effective non-Hermitian Hamiltonian, which diagonalizes in closed form via
//! a hyperbolic Schwinger-boson rotation. [`propagator::evolve_exact`]
//! composes the three steps into the exact solution; [`oracle`] provides an
//! independent RK4 integrator and a Monte-Carlo wave-function sampler to
//! validate it, and [`analytic`] the closed-form Hong-Ou-Mandel coincidence.
//!
//! Everything lives on a truncated two-mode Fock space ([`FockSpace`]). The
//! coupling conserves total photon number and dissipation only lowers it, so
//! states supported on total number <= `n_max` evolve without truncation
//! error.

pub mod analytic;
pub mod effective;
pub mod fock;
pub mod oracle;
pub mod propagator;
pub mod superop;

pub use fock::{DensityMatrix, FockSpace, Mode, Operator, StateVector};
pub use superop::ModelParams;

use thiserror::Error;

/// Errors surfaced by the checked operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("occupation ({n_a}, {n_b}) outside per-mode cutoff n_max = {n_max}")]
    OccupationOutOfRange {
        n_a: usize,
        n_b: usize,
        n_max: usize,
    },
    #[error("flat index {index} outside Hilbert-space dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("sector j + k = {total} exceeds per-mode cutoff n_max = {n_max}")]
    SectorBeyondCutoff { total: usize, n_max: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("exceptional point: diagonalization singular at |delta| = 2g")]
    ExceptionalPoint,
    #[error("unphysical state: {0}")]
    UnphysicalState(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
