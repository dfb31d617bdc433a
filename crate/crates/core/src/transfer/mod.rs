//! Layer-by-layer transfer over link-pattern states.
//!
//! A layer maps each state reachable after `t` insertions to its
//! multiplicity, modulo one or more primes. The count `p_t` is the
//! multiplicity of the empty pattern at time `t`.

pub mod direct;
pub mod io;
pub mod layer;
pub mod moves;
mod sweep;

use thiserror::Error;

use crate::residues::ResidueError;

pub use layer::{
    estimate_sweep_bytes, k_max, layer_state_count, live_state_estimate, peak_state_count, Layer, Residue,
};
pub use moves::{apply_move, children, children_with, for_each_child, for_each_parent, MoveSet, MoveType};
pub use sweep::{
    count_alternating_series, count_series, count_series_exact, count_series_multi, run_exact, step, sweep, ExactRun,
    StepMode, SweepOptions, SweepOutput,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("move {mv} is not legal at gap {gap}")]
    Illegal { gap: usize, mv: MoveType },
    #[error("moduli {0} and {1} are not coprime")]
    ModuliNotCoprime(u64, u64),
    #[error(
        "verification modulus {modulus} disagrees at t={t}: expected {expected}, reconstructed value gives {actual}"
    )]
    ConsistencyFailure {
        t: usize,
        modulus: u64,
        expected: u64,
        actual: u64,
    },
    #[error("moduli product does not exceed the magnitude bound for n={n}")]
    InsufficientModuli { n: usize },
    #[error("sweep needs about {needed} bytes, limit is {limit}")]
    MemoryLimit { needed: u128, limit: u128 },
    #[error("modulus {0} does not fit the residue width")]
    ModulusTooLarge(u64),
    #[error("n={0} exceeds the supported length")]
    LengthTooLarge(usize),
    #[error("at least one modulus is required")]
    NoModuli,
    #[error("{0}")]
    Residue(ResidueError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl From<ResidueError> for TransferError {
    fn from(e: ResidueError) -> Self {
        match e {
            ResidueError::ModuliNotCoprime(a, b) => TransferError::ModuliNotCoprime(a, b),
            other => TransferError::Residue(other),
        }
    }
}
