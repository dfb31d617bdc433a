//! Exact enumeration of 1324-avoiding permutations by a transfer matrix
//! over link-pattern states, with modular arithmetic and brute-force checks.

pub mod linkpattern;
pub mod oracle;
pub mod residues;
pub mod transfer;

pub use linkpattern::{LinkPattern, LinkPatternError, StateIndex};
pub use residues::{ModulusSet, ResidueError};
pub use transfer::{Layer, MoveSet, MoveType, StepMode, SweepOptions, TransferError};
