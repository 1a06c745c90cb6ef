//! Seminorm evaluation on witness sequences and finite-level algebraic
//! computations.

mod algebra;
mod exposed;
mod isbell;
mod report;
mod seminorm;

use thiserror::Error;

use crate::matrices::MatrixError;

pub use algebra::{commutant_dimension, span_dimension, SpanVariant, COMMUTANT_MAX_M, SPAN_MAX_N};
pub use exposed::{exposed_functional, exposed_margin, exposed_verify, EXPOSED_MAX_N};
pub use isbell::{isbell_bound, isbell_gap, IsbellGap, IsbellMatrix, WitnessKind};
pub use report::{SeminormReport, Verdict};
pub use seminorm::{
    op_norm, rank_one, shift_permutation, strong_not_strongstar_sweep, strong_seminorm, strongstar_seminorm,
    weak_null_sweep, weak_pairing, OP_NORM_MAX_ITER,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("p = {p} terms is too many for block {n}: the bound needs p² < n")]
    PTooLarge { p: usize, n: usize },
    #[error("block {block} does not exist in a matrix with {blocks} blocks")]
    BlockOutOfRange { block: usize, blocks: usize },
    #[error("{what} {requested} exceeds the budget of {limit}")]
    BudgetExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
    #[error("permutation with extent {extent} does not act within [1, {n}]")]
    OutsideBlock { extent: usize, n: usize },
    #[error("iteration did not converge (last estimate {last_estimate})")]
    Inconclusive { last_estimate: f64, last_iterate: Vec<f64> },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}
