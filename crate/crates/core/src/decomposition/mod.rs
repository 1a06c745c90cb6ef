//! Decomposition of finite doubly (sub)stochastic blocks into convex
//! combinations of (partial) permutation matrices.
//!
//! Doubly stochastic blocks are peeled along perfect matchings of their
//! positive support. Substochastic blocks `A` are first completed to the
//! doubly stochastic block `[[A, D_r], [D_c, Aᵀ]]`, where `D_r` and `D_c`
//! carry the row and column deficits: row `i` of the top half sums to
//! `rowsum_i + (1 - rowsum_i)`, row `j` of the bottom half to
//! `(1 - colsum_j) + colsum_j`, and the columns likewise. Restricting each
//! permutation of the completion to the upper-left corner gives partial
//! permutations.

mod block;
mod combination;
mod matching;

use std::fmt;

use thiserror::Error;

use crate::matrices::PartialPermutation;
use crate::scalar::Scalar;

pub use block::FiniteBlock;
pub use combination::ConvexCombination;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Row,
    Col,
}

impl fmt::Display for LineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineKind::Row => "row",
            LineKind::Col => "column",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompositionError {
    #[error("block is not square: {rows} rows but row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("negative entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },
    #[error("not doubly stochastic: {line} {index} sums to {sum}")]
    NotDoublyStochastic { line: LineKind, index: usize, sum: String },
    #[error("not doubly substochastic: {line} {index} sums to {sum}")]
    NotSubstochastic { line: LineKind, index: usize, sum: String },
    #[error("no perfect matching on the residual support after {terms} terms")]
    NoPerfectMatching { terms: usize },
    #[error("weight {0} is not positive")]
    InvalidWeight(String),
    #[error("weights sum to {0}, not 1")]
    WeightSum(String),
    #[error("permutation {0} appears twice")]
    DuplicateTerm(String),
    #[error("permutation with extent {extent} does not act within [1, {n}]")]
    PermutationOutsideBlock { extent: usize, n: usize },
    #[error("malformed block: {0}")]
    Format(String),
}

/// Residual tolerance for float decompositions.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

fn require_doubly_stochastic<S: Scalar>(a: &FiniteBlock<S>) -> Result<(), DecompositionError> {
    match a.find_line(|s| s.approx_eq(&S::one())) {
        Some((line, index, sum)) => Err(DecompositionError::NotDoublyStochastic {
            line,
            index,
            sum: sum.to_string(),
        }),
        None => Ok(()),
    }
}

fn require_substochastic<S: Scalar>(a: &FiniteBlock<S>) -> Result<(), DecompositionError> {
    match a.find_line(|s| s.le_tol(&S::one())) {
        Some((line, index, sum)) => Err(DecompositionError::NotSubstochastic {
            line,
            index,
            sum: sum.to_string(),
        }),
        None => Ok(()),
    }
}

/// Birkhoff–von Neumann decomposition of a doubly stochastic block.
///
/// Each step finds a perfect matching on the positive entries of the
/// residual and subtracts its smallest entry along the matching, which
/// zeroes at least one entry. The result has at most `n² - 2n + 2` terms.
pub fn bvn_decompose<S: Scalar>(a: &FiniteBlock<S>) -> Result<ConvexCombination<S>, DecompositionError> {
    require_doubly_stochastic(a)?;
    let n = a.size();
    let mut residual = a.clone();
    let mut terms: Vec<(S, PartialPermutation)> = Vec::new();
    loop {
        let live = residual.entries().filter(|(_, _, v)| v.is_positive()).count();
        if live == 0 {
            break;
        }
        let Some(matching) = matching::perfect_matching(n, |i, j| residual.entry(i + 1, j + 1).is_positive())
        else {
            if !S::EXACT {
                // leftover mass is rounding noise once no matching survives
                let mass = residual.entries().fold(0.0, |acc, (_, _, v)| acc + v.to_f64());
                if mass <= n as f64 * RESIDUAL_TOLERANCE {
                    break;
                }
            }
            return Err(DecompositionError::NoPerfectMatching { terms: terms.len() });
        };
        let weight = matching
            .iter()
            .enumerate()
            .map(|(i, &j)| residual.entry(i + 1, j + 1).clone())
            .reduce(|a, b| if b < a { b } else { a })
            .expect("matching of a nonempty block");
        for (i, &j) in matching.iter().enumerate() {
            let mut v = residual.entry(i + 1, j + 1).clone() - &weight;
            if v.is_negligible() {
                v = S::zero();
            }
            residual.set(i + 1, j + 1, v);
        }
        let perm = PartialPermutation::from_pairs(matching.iter().enumerate().map(|(i, &j)| (j + 1, i + 1)))
            .expect("a matching is injective");
        terms.push((weight, perm));
    }
    if !S::EXACT {
        let total = terms.iter().fold(S::zero(), |acc, (w, _)| acc + w);
        for (w, _) in &mut terms {
            *w = w.clone() / &total;
        }
    }
    Ok(ConvexCombination::from_terms_unchecked(terms))
}

/// The doubly stochastic completion `[[A, D_r], [D_c, Aᵀ]]` of a
/// substochastic block.
pub fn mirsky_complete<S: Scalar>(a: &FiniteBlock<S>) -> Result<FiniteBlock<S>, DecompositionError> {
    require_substochastic(a)?;
    let n = a.size();
    let mut out = FiniteBlock::zeros(2 * n);
    let deficit = |s: S| {
        let d = S::one() - s;
        if d.is_negligible() {
            S::zero()
        } else {
            d
        }
    };
    for (m, k, v) in a.entries() {
        out.set(m, k, v.clone());
        out.set(n + k, n + m, v.clone());
    }
    for i in 1..=n {
        out.set(i, n + i, deficit(a.row_sum(i)));
        out.set(n + i, i, deficit(a.col_sum(i)));
    }
    debug_assert!(out.is_doubly_stochastic());
    Ok(out)
}

/// Decomposes a substochastic block into partial permutations of `[1, n]`
/// by decomposing its completion and restricting each term to the corner.
pub fn mirsky_decompose<S: Scalar>(a: &FiniteBlock<S>) -> Result<ConvexCombination<S>, DecompositionError> {
    let n = a.size();
    let full = bvn_decompose(&mirsky_complete(a)?)?;
    let restricted = full
        .terms()
        .iter()
        .map(|(w, p)| (w.clone(), p.restrict(n)))
        .collect();
    Ok(ConvexCombination::from_terms_merging(restricted))
}

/// `Σ t_j P_j` as an `n × n` block.
pub fn reconstruct<S: Scalar>(c: &ConvexCombination<S>, n: usize) -> Result<FiniteBlock<S>, DecompositionError> {
    c.reconstruct(n)
}

/// A substochastic block is extreme exactly when all its entries are 0 or 1.
pub fn is_extreme<S: Scalar>(a: &FiniteBlock<S>) -> Result<bool, DecompositionError> {
    require_substochastic(a)?;
    Ok(a.entries().all(|(_, _, v)| v.is_negligible() || v.approx_eq(&S::one())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    fn block(rows: &[&[(i64, i64)]]) -> FiniteBlock<Rational> {
        FiniteBlock::from_rows(rows.iter().map(|r| r.iter().map(|&(a, b)| q(a, b)).collect()).collect()).unwrap()
    }

    fn perm(images: &[usize]) -> PartialPermutation {
        PartialPermutation::from_images(images).unwrap()
    }

    #[test]
    fn bvn_examples() {
        let id = FiniteBlock::<Rational>::identity(3);
        let c = bvn_decompose(&id).unwrap();
        assert_eq!(c.terms(), &[(q(1, 1), PartialPermutation::identity(3))]);

        let half = block(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]);
        let c = bvn_decompose(&half).unwrap();
        assert_eq!(c.terms(), &[(q(1, 2), perm(&[1, 2])), (q(1, 2), perm(&[2, 1]))]);

        let third = FiniteBlock::from_rows(vec![vec![q(1, 3); 3]; 3]).unwrap();
        let c = bvn_decompose(&third).unwrap();
        assert_eq!(
            c.terms(),
            &[
                (q(1, 3), perm(&[1, 2, 3])),
                (q(1, 3), perm(&[3, 1, 2])),
                (q(1, 3), perm(&[2, 3, 1])),
            ]
        );
        assert_eq!(c.reconstruct(3).unwrap(), third);
    }

    #[test]
    fn bvn_rejects_non_stochastic() {
        let a = block(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 4)]]);
        assert!(matches!(
            bvn_decompose(&a),
            Err(DecompositionError::NotDoublyStochastic { line: LineKind::Row, index: 2, .. })
        ));
    }

    #[test]
    fn completion_examples() {
        let zero = FiniteBlock::<Rational>::zeros(1);
        assert_eq!(mirsky_complete(&zero).unwrap(), block(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]));
        let one = FiniteBlock::<Rational>::identity(1);
        assert_eq!(mirsky_complete(&one).unwrap(), FiniteBlock::identity(2));
        let half = block(&[&[(1, 2)]]);
        assert_eq!(
            mirsky_complete(&half).unwrap(),
            block(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]])
        );
        let over = block(&[&[(3, 2)]]);
        assert!(matches!(mirsky_complete(&over), Err(DecompositionError::NotSubstochastic { .. })));
    }

    #[test]
    fn mirsky_examples() {
        let c = mirsky_decompose(&FiniteBlock::<Rational>::zeros(3)).unwrap();
        assert_eq!(c.terms(), &[(q(1, 1), PartialPermutation::empty())]);

        let c = mirsky_decompose(&block(&[&[(1, 2)]])).unwrap();
        assert_eq!(c.terms(), &[(q(1, 2), perm(&[1])), (q(1, 2), PartialPermutation::empty())]);

        let p = perm(&[2, 3, 1]);
        let c = mirsky_decompose(&FiniteBlock::<Rational>::permutation(&p, 3).unwrap()).unwrap();
        assert_eq!(c.terms(), &[(q(1, 1), p)]);
    }

    #[test]
    fn extremality_examples() {
        assert!(is_extreme(&block(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]])).unwrap());
        assert!(!is_extreme(&block(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]])).unwrap());
        assert!(is_extreme(&FiniteBlock::<Rational>::zeros(2)).unwrap());
    }

    #[test]
    fn float_decomposition_renormalizes() {
        let a = FiniteBlock::from_rows(vec![
            vec![0.2, 0.3, 0.5],
            vec![0.5, 0.2, 0.3],
            vec![0.3, 0.5, 0.2],
        ])
        .unwrap();
        let c = bvn_decompose(&a).unwrap();
        assert!((c.weight_sum() - 1.0).abs() < 1e-12);
        assert!(c.reconstruct(3).unwrap().approx_eq(&a));
    }

    #[test]
    fn finitary_matrix_of_combination() {
        use crate::matrices::{CoeffMatrix, MatrixClass};
        let c = ConvexCombination::new(vec![
            (q(1, 2), PartialPermutation::cycle(&[1, 2]).unwrap()),
            (q(1, 2), PartialPermutation::cycle(&[3, 4]).unwrap()),
        ])
        .unwrap();
        let b: CoeffMatrix<Rational> = c.to_finitary_matrix().unwrap();
        assert_eq!(b.classify(), MatrixClass::DS);
        assert_eq!(b.coefficient(1, 1), q(1, 2));
        assert_eq!(b.coefficient(2, 1), q(1, 2));
        assert_eq!(b.coefficient(9, 9), q(1, 1));
    }

    #[test]
    fn combination_validation() {
        assert!(ConvexCombination::new(vec![(q(1, 2), perm(&[1]))]).is_err());
        assert!(ConvexCombination::new(vec![(q(1, 2), perm(&[1])), (q(1, 2), perm(&[1]))]).is_err());
        assert!(ConvexCombination::new(vec![(q(0, 1), perm(&[1])), (q(1, 1), perm(&[]))]).is_err());
    }
}
