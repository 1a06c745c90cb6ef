//! Finite-level laboratory for doubly stochastic and doubly substochastic
//! matrices indexed by the positive integers.
//!
//! The crate represents infinite matrices that are finitely describable
//! (explicit entries plus a zero or identity tail), decomposes finite
//! doubly (sub)stochastic blocks into convex combinations of (partial)
//! permutation matrices, evaluates operator-topology seminorms on concrete
//! witness sequences, and bundles these into reproducible verification
//! suites.

pub mod decomposition;
pub mod lab;
pub mod linalg;
pub mod matrices;
pub mod scalar;
pub mod suites;
pub mod truncation;

pub use decomposition::{ConvexCombination, DecompositionError, FiniteBlock};
pub use matrices::{CoeffMatrix, FinVector, MatrixClass, MatrixError, PartialPermutation, Tail};
pub use scalar::{Rational, Scalar};
pub use truncation::TruncationLevel;
