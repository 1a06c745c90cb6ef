use crate::decomposition::FiniteBlock;
use crate::linalg::EchelonBasis;
use crate::matrices::{CoeffMatrix, PartialPermutation};
use crate::scalar::{Rational, Scalar};
use crate::truncation::{corner, TruncationLevel};

use super::LabError;

pub const COMMUTANT_MAX_M: usize = 8;
pub const SPAN_MAX_N: usize = 6;

/// Which family of `n × n` matrices to span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanVariant {
    /// The permutation matrices of `[1, n]`.
    TailLift,
    /// Corners `u^⟨n⟩` of finitary permutation matrices on `[1, 2n]`.
    Corner,
}

/// Dimension of the commutant of the permutation representation of `S_m`,
/// solving `XP = PX` for the generators `(1 2)` and `(1 2 ... m)`.
pub fn commutant_dimension(m: usize) -> Result<usize, LabError> {
    if m == 0 || m > COMMUTANT_MAX_M {
        return Err(LabError::BudgetExceeded {
            what: "commutant size",
            requested: m,
            limit: COMMUTANT_MAX_M,
        });
    }
    let mut generators = Vec::new();
    if m >= 2 {
        generators.push(PartialPermutation::cycle(&[1, 2]).expect("valid cycle"));
        generators.push(PartialPermutation::cycle(&(1..=m).collect::<Vec<_>>()).expect("valid cycle"));
    }
    let var = |i: usize, j: usize| (i - 1) * m + (j - 1);
    let mut basis = EchelonBasis::<Rational>::new(m * m);
    for p in &generators {
        let inv = p.inverse();
        // (XP)_ij = X_{i,p(j)} and (PX)_ij = X_{p⁻¹(i),j}
        for i in 1..=m {
            for j in 1..=m {
                let mut row = vec![Rational::from_usize(0); m * m];
                row[var(i, p.image_or_fixed(j))] = row[var(i, p.image_or_fixed(j))].clone() + Rational::from_usize(1);
                row[var(inv.image_or_fixed(i), j)] = row[var(inv.image_or_fixed(i), j)].clone() - Rational::from_usize(1);
                basis.insert(row);
            }
        }
    }
    Ok(m * m - basis.rank())
}

fn vectorize(block: &FiniteBlock<Rational>) -> Vec<Rational> {
    block.rows().into_iter().flatten().collect()
}

/// Dimension of the real span of the chosen family, by exact rank.
pub fn span_dimension(n: usize, variant: SpanVariant) -> Result<usize, LabError> {
    if n == 0 || n > SPAN_MAX_N {
        return Err(LabError::BudgetExceeded {
            what: "span size",
            requested: n,
            limit: SPAN_MAX_N,
        });
    }
    let mut basis = EchelonBasis::<Rational>::new(n * n);
    match variant {
        SpanVariant::TailLift => {
            for p in PartialPermutation::all_permutations(n) {
                basis.insert(vectorize(&FiniteBlock::permutation(&p, n).expect("within block")));
                if basis.is_full() {
                    break;
                }
            }
        }
        SpanVariant::Corner => {
            let level = TruncationLevel::new(n).expect("n is positive");
            for p in PartialPermutation::all_partial(n) {
                let rho = p.extend_to_double(n);
                let c = corner(&CoeffMatrix::<Rational>::finitary(&rho), level);
                let block = FiniteBlock::from_matrix(&c, n).expect("corners are nonnegative");
                basis.insert(vectorize(&block));
                if basis.is_full() {
                    break;
                }
            }
        }
    }
    Ok(basis.rank())
}
