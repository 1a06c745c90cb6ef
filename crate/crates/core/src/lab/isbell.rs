use std::collections::{BTreeMap, BTreeSet};

use crate::decomposition::ConvexCombination;
use crate::linalg::top_singular;
use crate::matrices::{CoeffMatrix, FinVector, Tail};
use crate::scalar::Scalar;

use super::LabError;

/// Block-diagonal doubly stochastic matrix whose `j`-th block is `j × j`
/// with every entry `1/j`, for `j = 1..=N`.
///
/// Beyond the realized blocks the matrix continues as the identity, so it
/// is doubly stochastic as an infinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct IsbellMatrix<S> {
    num_blocks: usize,
    realized: CoeffMatrix<S>,
}

impl<S: Scalar> IsbellMatrix<S> {
    pub fn new(num_blocks: usize) -> Self {
        assert!(num_blocks >= 1, "at least one block");
        let dim = num_blocks * (num_blocks + 1) / 2;
        let mut entries = Vec::new();
        for j in 1..=num_blocks {
            let value = S::from_ratio(1, j as i64);
            for m in Self::block_range(j) {
                for k in Self::block_range(j) {
                    entries.push((m, k, value.clone()));
                }
            }
        }
        let realized = CoeffMatrix::new(Tail::Identity { start: dim + 1 }, entries)
            .expect("blocks lie below the tail");
        Self { num_blocks, realized }
    }

    /// Indices of block `j`.
    pub fn block_range(j: usize) -> std::ops::RangeInclusive<usize> {
        let offset = j * (j - 1) / 2;
        offset + 1..=offset + j
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    /// Number of realized rows, `N(N+1)/2`.
    pub fn dimension(&self) -> usize {
        self.num_blocks * (self.num_blocks + 1) / 2
    }

    pub fn matrix(&self) -> &CoeffMatrix<S> {
        &self.realized
    }
}

/// How an Isbell witness was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// Uniform on the block columns where `b` has no entry in the block rows.
    AvoidingColumns { columns: usize },
    /// Approximate top right singular vector of `a - b` on the block columns.
    Spectral,
    /// `(e_r - e_s)/√2` inside a later block that `b` leaves fixed, where
    /// `a - b` acts as `J/j - I` and the gap is exactly one.
    FarBlock { block: usize },
}

/// A unit witness vector and the gap `‖(a - b)x‖²` it certifies.
#[derive(Debug, Clone, PartialEq)]
pub struct IsbellGap<S> {
    pub witness: FinVector<f64>,
    pub gap: f64,
    /// The gap in the scalar type, available for the exact witnesses.
    pub exact_gap: Option<S>,
    pub kind: WitnessKind,
    /// Best gap found with a witness supported on block `n` itself.
    pub block_gap: f64,
}

/// The distance bound `(n - p²)/n` for a combination of `p` permutations.
pub fn isbell_bound<S: Scalar>(n: usize, p: usize) -> S {
    S::from_ratio(n as i64 - (p * p) as i64, n as i64)
}

/// Lower bound for `‖a - b‖²` witnessed on block `n` of `a`, where `b` is a
/// convex combination of `p` finitary permutations with `p² < n`.
///
/// When at least `n - p²` columns of the block carry no entry of `b` in the
/// block rows, the witness is uniform on those columns and the gap is at
/// least `|S|/n`. Otherwise the witness is the top right singular vector of
/// `a - b` restricted to the block columns, found by power iteration from a
/// fixed start. Fewer free columns are common (a block-preserving term hits
/// every column), and then a witness on block `n` can fall short of the
/// bound; in that case the witness moves to the first block of the
/// infinite matrix beyond the support of `b`, where the gap is exactly one.
/// Every gap is recomputed from its witness.
pub fn isbell_gap<S: Scalar>(
    a: &IsbellMatrix<S>,
    b: &ConvexCombination<S>,
    n: usize,
) -> Result<IsbellGap<S>, LabError> {
    let p = b.len();
    if p * p >= n {
        return Err(LabError::PTooLarge { p, n });
    }
    if n == 0 || n > a.num_blocks() {
        return Err(LabError::BlockOutOfRange {
            block: n,
            blocks: a.num_blocks(),
        });
    }
    let block: Vec<usize> = IsbellMatrix::<S>::block_range(n).collect();
    let rows: BTreeSet<usize> = block.iter().copied().collect();
    let mut columns: BTreeMap<usize, BTreeMap<usize, S>> = block.iter().map(|&k| (k, BTreeMap::new())).collect();
    for (m, k, v) in a.matrix().entries() {
        if let Some(col) = columns.get_mut(&k) {
            col.insert(m, v.clone());
        }
    }
    let hit = subtract_combination(&mut columns, b);
    let free: Vec<usize> = block
        .iter()
        .copied()
        .filter(|k| !hit.iter().any(|&(m, col)| col == *k && rows.contains(&m)))
        .collect();

    if free.len() + p * p >= n {
        let image = combine(&columns, free.iter().map(|&k| (k, S::one())));
        let exact = image.norm_sq() / &S::from_usize(free.len());
        let scale = 1.0 / (free.len() as f64).sqrt();
        let gap = exact.to_f64();
        return Ok(IsbellGap {
            witness: FinVector::from_coords(free.iter().map(|&k| (k, scale))).expect("positive indices"),
            gap,
            exact_gap: Some(exact),
            kind: WitnessKind::AvoidingColumns { columns: free.len() },
            block_gap: gap,
        });
    }

    let touched: BTreeSet<usize> = columns.values().flat_map(|c| c.keys().copied()).collect();
    let row_index: BTreeMap<usize, usize> = touched.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut dense = vec![vec![0.0; n]; touched.len()];
    for (j, col) in columns.values().enumerate() {
        for (m, v) in col {
            dense[row_index[m]][j] = v.to_f64();
        }
    }
    // ramp start: not orthogonal to any generic singular vector
    let start: Vec<f64> = (1..=n).map(|j| 1.0 + j as f64 / n as f64).collect();
    let iterate = match top_singular(&dense, n, &start, 1e-13, 20_000) {
        Ok(est) => est.vector,
        Err(e) => e.last_iterate,
    };
    let norm = iterate.iter().map(|v| v * v).sum::<f64>().sqrt();
    let coords: Vec<(usize, f64)> = block.iter().zip(&iterate).map(|(&k, v)| (k, v / norm)).collect();
    let float_columns: BTreeMap<usize, BTreeMap<usize, f64>> = columns
        .iter()
        .map(|(&k, col)| (k, col.iter().map(|(&m, v)| (m, v.to_f64())).collect()))
        .collect();
    let gap = combine(&float_columns, coords.iter().copied()).norm_sq();
    let witness = FinVector::from_coords(coords).expect("positive indices");
    if gap >= isbell_bound::<S>(n, p).to_f64() {
        return Ok(IsbellGap {
            witness,
            gap,
            exact_gap: None,
            kind: WitnessKind::Spectral,
            block_gap: gap,
        });
    }
    Ok(far_block_gap(b, gap))
}

/// Subtracts the columns of `b` (read as finitary permutations) from the
/// given column slices; returns the `(row, col)` positions `b` occupies.
fn subtract_combination<S: Scalar>(
    columns: &mut BTreeMap<usize, BTreeMap<usize, S>>,
    b: &ConvexCombination<S>,
) -> Vec<(usize, usize)> {
    let mut hit = Vec::new();
    for (&k, col) in columns.iter_mut() {
        for (w, rho) in b.terms() {
            let m = rho.image_or_fixed(k);
            let slot = col.entry(m).or_insert_with(S::zero);
            *slot = slot.clone() - w;
            hit.push((m, k));
        }
        col.retain(|_, v| !v.is_negligible());
    }
    hit
}

/// `Σ x_k · column_k`.
fn combine<S: Scalar>(
    columns: &BTreeMap<usize, BTreeMap<usize, S>>,
    x: impl IntoIterator<Item = (usize, S)>,
) -> FinVector<S> {
    let mut out: BTreeMap<usize, S> = BTreeMap::new();
    for (k, xk) in x {
        for (&m, v) in &columns[&k] {
            let slot = out.entry(m).or_insert_with(S::zero);
            *slot = slot.clone() + v.clone() * &xk;
        }
    }
    FinVector::from_coords(out).expect("positive indices")
}

fn far_block_gap<S: Scalar>(b: &ConvexCombination<S>, block_gap: f64) -> IsbellGap<S> {
    let extent = b.extent();
    let j = (2..).find(|&j| j * (j - 1) / 2 >= extent).expect("blocks grow without bound");
    let first = *IsbellMatrix::<S>::block_range(j).start();
    let value = S::from_ratio(1, j as i64);
    let mut columns: BTreeMap<usize, BTreeMap<usize, S>> = [first, first + 1]
        .into_iter()
        .map(|k| (k, IsbellMatrix::<S>::block_range(j).map(|m| (m, value.clone())).collect()))
        .collect();
    subtract_combination(&mut columns, b);
    let exact = combine(&columns, [(first, S::one()), (first + 1, -S::one())]).norm_sq() / &S::from_usize(2);
    let scale = 0.5f64.sqrt();
    IsbellGap {
        witness: FinVector::from_coords([(first, scale), (first + 1, -scale)]).expect("positive indices"),
        gap: exact.to_f64(),
        exact_gap: Some(exact),
        kind: WitnessKind::FarBlock { block: j },
        block_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::{MatrixClass, PartialPermutation};
    use crate::scalar::Rational;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    #[test]
    fn realized_blocks() {
        let a = IsbellMatrix::<Rational>::new(1);
        assert_eq!(a.matrix().dense(1), vec![vec![q(1, 1)]]);
        let a = IsbellMatrix::<Rational>::new(2);
        assert_eq!(
            a.matrix().dense(3),
            vec![
                vec![q(1, 1), q(0, 1), q(0, 1)],
                vec![q(0, 1), q(1, 2), q(1, 2)],
                vec![q(0, 1), q(1, 2), q(1, 2)],
            ]
        );
        let a = IsbellMatrix::<Rational>::new(3);
        assert_eq!(a.dimension(), 6);
        assert_eq!(a.matrix().coefficient(5, 6), q(1, 3));
        assert_eq!(a.matrix().coefficient(2, 3), q(1, 2));
        assert_eq!(a.matrix().classify(), MatrixClass::DS);
    }

    #[test]
    fn gap_against_a_single_permutation() {
        let a = IsbellMatrix::<Rational>::new(5);
        for n in [2, 4] {
            let b = ConvexCombination::new(vec![(q(1, 1), PartialPermutation::cycle(&[1, 7, 3]).unwrap())]).unwrap();
            let gap = isbell_gap(&a, &b, n).unwrap();
            assert!(gap.gap >= (n as f64 - 1.0) / n as f64 - 1e-9, "n={n}: {gap:?}");
        }
    }

    #[test]
    fn witness_kinds() {
        let a = IsbellMatrix::<Rational>::new(4);
        let b = ConvexCombination::new(vec![(q(1, 1), PartialPermutation::cycle(&[1, 2]).unwrap())]).unwrap();
        let gap = isbell_gap(&a, &b, 4).unwrap();
        // b is the identity on block 4, so every column is hit; compare to
        // the identity: ‖(J/4 - I)x‖² reaches 1 on vectors summing to 0
        assert_eq!(gap.kind, WitnessKind::Spectral);
        assert!((gap.gap - 1.0).abs() < 1e-9);

        // moving block 3 out entirely: a and b act on disjoint rows
        let away = PartialPermutation::from_pairs([(4, 30), (5, 31), (6, 32), (30, 4), (31, 5), (32, 6)]).unwrap();
        let b = ConvexCombination::new(vec![(q(1, 1), away)]).unwrap();
        let gap = isbell_gap(&a, &b, 3).unwrap();
        assert_eq!(gap.kind, WitnessKind::AvoidingColumns { columns: 3 });
        assert_eq!(gap.exact_gap, Some(q(2, 1)));
    }

    #[test]
    fn block_witness_can_fall_short() {
        // a block-preserving term of weight 1/2 hits every column of block 16,
        // and two terms moving the block elsewhere take the rest of the mass
        let n = 16;
        let a = IsbellMatrix::<Rational>::new(n);
        let block: Vec<usize> = IsbellMatrix::<Rational>::block_range(n).collect();
        let rotate = PartialPermutation::cycle(&block).unwrap();
        let out = |shift: usize| {
            PartialPermutation::from_pairs(block.iter().flat_map(|&k| [(k, k + shift), (k + shift, k)])).unwrap()
        };
        let b = ConvexCombination::new(vec![(q(1, 2), rotate), (q(1, 4), out(100)), (q(1, 4), out(200))]).unwrap();
        let gap = isbell_gap(&a, &b, n).unwrap();
        let bound = isbell_bound::<Rational>(n, 3).to_f64();
        assert!(gap.block_gap < bound, "{gap:?}");
        assert!(matches!(gap.kind, WitnessKind::FarBlock { .. }));
        assert_eq!(gap.exact_gap, Some(q(1, 1)));
    }

    #[test]
    fn rejects_large_p() {
        let a = IsbellMatrix::<Rational>::new(4);
        let b = ConvexCombination::new(vec![
            (q(1, 2), PartialPermutation::empty()),
            (q(1, 2), PartialPermutation::cycle(&[1, 2]).unwrap()),
        ])
        .unwrap();
        assert!(matches!(isbell_gap(&a, &b, 4), Err(LabError::PTooLarge { p: 2, n: 4 })));
        assert!(matches!(isbell_gap(&a, &b, 9), Err(LabError::BlockOutOfRange { .. })));
    }
}
