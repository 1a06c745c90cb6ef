//! Finitely describable infinite matrices, partial permutations and
//! finitely supported vectors.

mod coeff;
mod json;
mod perm;
mod vector;

use thiserror::Error;

use crate::scalar::ParseScalarError;

pub use coeff::{CoeffMatrix, Line, MatrixClass, Tail, Violation};
pub use json::{MatrixDoc, VectorDoc};
pub use perm::PartialPermutation;
pub use vector::FinVector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("indices are 1-based; index 0 is not allowed")]
    ZeroIndex,
    #[error("identity tail must start at 1 or later")]
    ZeroTailStart,
    #[error("entry ({row}, {col}) lies inside the identity tail starting at {start}")]
    TailOverlap { row: usize, col: usize, start: usize },
    #[error("entry ({row}, {col}) given twice")]
    DuplicateEntry { row: usize, col: usize },
    #[error("point {point} is mapped twice")]
    NotAFunction { point: usize },
    #[error("target {target} is hit twice; map is not injective")]
    NotInjective { target: usize },
    #[error("permutation touches index {extent}, inside the identity tail starting at {start}")]
    PermutationOutsideBlock { extent: usize, start: usize },
    #[error("combination would scale the identity tail by a factor other than 0 or 1")]
    UnrepresentableTail,
    #[error(transparent)]
    Scalar(#[from] ParseScalarError),
    #[error("malformed document: {0}")]
    Format(String),
}
