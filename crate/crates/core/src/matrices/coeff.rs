use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

use super::{FinVector, MatrixError, PartialPermutation};

/// Behaviour of a matrix outside its explicitly stored entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tail {
    /// Every coefficient not stored is 0.
    Zero,
    /// `a_{mk} = δ_{mk}` for all `m, k ≥ start`; nothing is stored there.
    Identity { start: usize },
}

impl Tail {
    pub fn identity_from(start: usize) -> Self {
        Tail::Identity { start }
    }

    /// First index of the identity tail, `None` for a zero tail.
    pub fn start(self) -> Option<usize> {
        match self {
            Tail::Zero => None,
            Tail::Identity { start } => Some(start),
        }
    }
}

/// Membership classes for nonnegative matrices.
///
/// The variants are listed from most to least specific; [`CoeffMatrix::classify`]
/// reports the first that applies, so a permutation matrix classifies as
/// `Permutation` even though it is also doubly stochastic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixClass {
    /// Matrix of a bijection of the positive integers.
    Permutation,
    /// {0,1}-valued with at most one 1 in every row and column.
    PS,
    /// Nonnegative, every row and column sums to exactly 1.
    DS,
    /// Nonnegative, every line sum at most 1, but not doubly stochastic.
    #[serde(rename = "DSS_strict")]
    DssStrict,
    Other,
}

impl MatrixClass {
    /// Member of the doubly substochastic set.
    pub fn is_substochastic(self) -> bool {
        !matches!(self, MatrixClass::Other)
    }

    /// Member of the doubly stochastic set.
    pub fn is_stochastic(self) -> bool {
        matches!(self, MatrixClass::Permutation | MatrixClass::DS)
    }

    pub fn name(self) -> &'static str {
        match self {
            MatrixClass::Permutation => "Permutation",
            MatrixClass::PS => "PS",
            MatrixClass::DS => "DS",
            MatrixClass::DssStrict => "DSS_strict",
            MatrixClass::Other => "Other",
        }
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which line a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Line {
    Row,
    Col,
}

/// Why a matrix failed to be doubly substochastic.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation<S> {
    NegativeEntry { row: usize, col: usize, value: S },
    LineSumAboveOne { line: Line, index: usize, sum: S },
}

impl<S: Scalar> fmt::Display for Violation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeEntry { row, col, value } => {
                write!(f, "negative entry at ({row}, {col}): {value}")
            }
            Violation::LineSumAboveOne { line, index, sum } => {
                let name = match line {
                    Line::Row => "row",
                    Line::Col => "col",
                };
                write!(f, "{name} {index} sum {sum} > 1")
            }
        }
    }
}

/// A finitely describable infinite matrix over the positive integers.
///
/// Stored entries never hold zero, and with an identity tail nothing is
/// stored in the tail square. The tail start is also kept minimal, so two
/// matrices describe the same operator iff they compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMatrix<S> {
    entries: BTreeMap<(usize, usize), S>,
    tail: Tail,
}

impl<S: Scalar> CoeffMatrix<S> {
    pub fn zero() -> Self {
        Self {
            entries: BTreeMap::new(),
            tail: Tail::Zero,
        }
    }

    pub fn identity() -> Self {
        Self {
            entries: BTreeMap::new(),
            tail: Tail::Identity { start: 1 },
        }
    }

    /// Builds a matrix from explicit 1-based entries and a tail.
    ///
    /// Zero values are dropped. Entries inside the identity-tail square and
    /// repeated positions are rejected.
    pub fn new<I>(tail: Tail, entries: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (usize, usize, S)>,
    {
        if tail == (Tail::Identity { start: 0 }) {
            return Err(MatrixError::ZeroTailStart);
        }
        let mut map = BTreeMap::new();
        for (m, k, v) in entries {
            if m == 0 || k == 0 {
                return Err(MatrixError::ZeroIndex);
            }
            if let Some(start) = tail.start() {
                if m >= start && k >= start {
                    return Err(MatrixError::TailOverlap { row: m, col: k, start });
                }
            }
            if map.insert((m, k), v).is_some() {
                return Err(MatrixError::DuplicateEntry { row: m, col: k });
            }
        }
        Ok(match tail {
            Tail::Zero => Self::from_zero_tail(map),
            Tail::Identity { start } => Self::from_identity_deviation(start, map),
        })
    }

    /// A diagonal matrix with zero tail.
    pub fn diagonal<I: IntoIterator<Item = S>>(diag: I) -> Self {
        Self::from_zero_tail(
            diag.into_iter()
                .enumerate()
                .map(|(i, v)| ((i + 1, i + 1), v))
                .collect(),
        )
    }

    /// Dense rows placed in the upper-left corner, zero tail.
    pub fn from_dense(rows: &[Vec<S>]) -> Self {
        Self::from_zero_tail(
            rows.iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(move |(j, v)| ((i + 1, j + 1), v.clone()))
                })
                .collect(),
        )
    }

    /// The matrix of `p`: a 1 at `(p(k), k)` for every `k` in its domain.
    ///
    /// With `Tail::Identity { start }` the map must live inside `[1, start)`;
    /// the result is then the image of a finitary permutation when `p` is
    /// total on that block.
    pub fn permutation(p: &PartialPermutation, tail: Tail) -> Result<Self, MatrixError> {
        if let Tail::Identity { start } = tail {
            if start == 0 {
                return Err(MatrixError::ZeroTailStart);
            }
            if p.extent() >= start {
                return Err(MatrixError::PermutationOutsideBlock {
                    extent: p.extent(),
                    start,
                });
            }
        }
        Self::new(tail, p.pairs().map(|(k, t)| (t, k, S::one())))
    }

    /// Matrix of a finitary permutation; points outside the domain of `p`
    /// are fixed. `p` must be a bijection of the points it touches.
    pub fn finitary(p: &PartialPermutation) -> Self {
        let start = p.extent() + 1;
        let entries = (1..start).map(|k| (p.image_or_fixed(k), k, S::one()));
        Self::new(Tail::Identity { start }, entries).expect("entries lie below the tail start")
    }

    pub(crate) fn from_zero_tail(mut map: BTreeMap<(usize, usize), S>) -> Self {
        map.retain(|_, v| !v.is_negligible());
        Self {
            entries: map,
            tail: Tail::Zero,
        }
    }

    /// Canonical form of `D_start + deviation`, where `D_start` is the
    /// identity on `[start, ∞)` and `deviation` may have any finite support.
    pub(crate) fn from_identity_deviation(start: usize, deviation: BTreeMap<(usize, usize), S>) -> Self {
        debug_assert!(start >= 1);
        let mut tail_start = start;
        for ((m, k), v) in &deviation {
            if *m >= start && *k >= start && !v.is_negligible() {
                tail_start = tail_start.max(m.max(k) + 1);
            }
        }
        let mut entries = deviation;
        for i in start..tail_start {
            let slot = entries.entry((i, i)).or_insert_with(S::zero);
            *slot = slot.clone() + S::one();
        }
        entries.retain(|_, v| !v.is_negligible());

        // shrink the tail while the square just before it is already identity
        while tail_start > 1 {
            let i = tail_start - 1;
            let diag_is_one = entries.get(&(i, i)).is_some_and(|v| v.approx_eq(&S::one()));
            if !diag_is_one {
                break;
            }
            let row_clear = entries.range((i, i + 1)..=(i, usize::MAX)).next().is_none();
            let col_clear = entries
                .range((i + 1, 0)..)
                .all(|(&(_, k), _)| k != i);
            if !(row_clear && col_clear) {
                break;
            }
            entries.remove(&(i, i));
            tail_start = i;
        }
        Self {
            entries,
            tail: Tail::Identity { start: tail_start },
        }
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Explicit entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> + '_ {
        self.entries.iter().map(|(&(m, k), v)| (m, k, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Largest row or column index used by the explicit description
    /// (including the last index before an identity tail).
    pub fn extent(&self) -> usize {
        let stored = self
            .entries
            .keys()
            .map(|&(m, k)| m.max(k))
            .max()
            .unwrap_or(0);
        match self.tail {
            Tail::Zero => stored,
            Tail::Identity { start } => stored.max(start - 1),
        }
    }

    /// The coefficient `a_{mk}`.
    pub fn coefficient(&self, m: usize, k: usize) -> S {
        if let Some(v) = self.entries.get(&(m, k)) {
            return v.clone();
        }
        match self.tail {
            Tail::Identity { start } if m == k && m >= start => S::one(),
            _ => S::zero(),
        }
    }

    pub fn row_sum(&self, m: usize) -> S {
        let explicit = self
            .entries
            .range((m, 0)..=(m, usize::MAX))
            .fold(S::zero(), |acc, (_, v)| acc + v);
        match self.tail {
            Tail::Identity { start } if m >= start => explicit + S::one(),
            _ => explicit,
        }
    }

    pub fn col_sum(&self, k: usize) -> S {
        let explicit = self
            .entries
            .iter()
            .filter(|(&(_, col), _)| col == k)
            .fold(S::zero(), |acc, (_, v)| acc + v);
        match self.tail {
            Tail::Identity { start } if k >= start => explicit + S::one(),
            _ => explicit,
        }
    }

    /// Every row and column whose sum differs from the tail default, with its sum.
    fn line_sums(&self) -> (BTreeMap<usize, S>, BTreeMap<usize, S>) {
        let mut rows: BTreeMap<usize, S> = BTreeMap::new();
        let mut cols: BTreeMap<usize, S> = BTreeMap::new();
        if let Tail::Identity { start } = self.tail {
            for i in 1..start {
                rows.insert(i, S::zero());
                cols.insert(i, S::zero());
            }
        }
        for (&(m, k), v) in &self.entries {
            let r = rows.entry(m).or_insert_with(S::zero);
            *r = r.clone() + v;
            let c = cols.entry(k).or_insert_with(S::zero);
            *c = c.clone() + v;
        }
        if let Tail::Identity { start } = self.tail {
            for (_, sum) in rows.iter_mut().filter(|(i, _)| **i >= start) {
                *sum = sum.clone() + S::one();
            }
            for (_, sum) in cols.iter_mut().filter(|(i, _)| **i >= start) {
                *sum = sum.clone() + S::one();
            }
        }
        (rows, cols)
    }

    pub fn classify(&self) -> MatrixClass {
        if self.entries.values().any(|v| v.is_negative()) {
            return MatrixClass::Other;
        }
        let (rows, cols) = self.line_sums();
        let one = S::one();
        let all_sums = || rows.values().chain(cols.values());
        if !all_sums().all(|s| s.le_tol(&one)) {
            return MatrixClass::Other;
        }
        let zero_one = self.entries.values().all(|v| v.approx_eq(&one));
        let identity_tail = matches!(self.tail, Tail::Identity { .. });
        let all_exactly_one = identity_tail && all_sums().all(|s| s.approx_eq(&one));
        match (zero_one, all_exactly_one) {
            (true, true) => MatrixClass::Permutation,
            (true, false) => MatrixClass::PS,
            (false, true) => MatrixClass::DS,
            (false, false) => MatrixClass::DssStrict,
        }
    }

    /// Reasons the matrix is not doubly substochastic; empty when it is.
    pub fn violations(&self) -> Vec<Violation<S>> {
        let mut out: Vec<Violation<S>> = self
            .entries
            .iter()
            .filter(|(_, v)| v.is_negative())
            .map(|(&(row, col), v)| Violation::NegativeEntry {
                row,
                col,
                value: v.clone(),
            })
            .collect();
        let (rows, cols) = self.line_sums();
        let one = S::one();
        for (line, sums) in [(Line::Row, rows), (Line::Col, cols)] {
            for (index, sum) in sums {
                if !sum.le_tol(&one) {
                    out.push(Violation::LineSumAboveOne { line, index, sum });
                }
            }
        }
        out
    }

    /// `(ux)_m = Σ_k u_{mk} x_k`.
    ///
    /// Always finite: `x` has finite support and every column meets finitely
    /// many stored entries plus at most one tail coefficient, so no
    /// divergence guard is needed for finitely described matrices.
    pub fn apply(&self, x: &FinVector<S>) -> FinVector<S> {
        let mut out: BTreeMap<usize, S> = BTreeMap::new();
        if x.is_zero() {
            return FinVector::zero();
        }
        for (&(m, k), v) in &self.entries {
            let xk = x.get(k);
            if xk.is_zero() {
                continue;
            }
            let slot = out.entry(m).or_insert_with(S::zero);
            *slot = slot.clone() + v.clone() * &xk;
        }
        if let Tail::Identity { start } = self.tail {
            for (k, xk) in x.iter().filter(|(k, _)| *k >= start) {
                let slot = out.entry(k).or_insert_with(S::zero);
                *slot = slot.clone() + xk;
            }
        }
        FinVector::from_map(out)
    }

    /// The transpose; for real matrices this is the Hilbert-space adjoint.
    pub fn adjoint(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|(&(m, k), v)| ((k, m), v.clone()))
                .collect(),
            tail: self.tail,
        }
    }

    /// The product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut rows_of_other: BTreeMap<usize, Vec<(usize, &S)>> = BTreeMap::new();
        for (&(j, k), v) in &other.entries {
            rows_of_other.entry(j).or_default().push((k, v));
        }
        let mut acc: BTreeMap<(usize, usize), S> = BTreeMap::new();
        let mut add = |pos: (usize, usize), v: S| {
            let slot = acc.entry(pos).or_insert_with(S::zero);
            *slot = slot.clone() + v;
        };
        for (&(m, j), u) in &self.entries {
            if let Some(row) = rows_of_other.get(&j) {
                for &(k, w) in row {
                    add((m, k), u.clone() * w);
                }
            }
        }
        // E_u · D_{s2}: stored columns of self that land in other's tail
        if let Tail::Identity { start } = other.tail {
            for (&(m, j), u) in &self.entries {
                if j >= start {
                    add((m, j), u.clone());
                }
            }
        }
        // D_{s1} · E_w
        if let Tail::Identity { start } = self.tail {
            for (&(j, k), w) in &other.entries {
                if j >= start {
                    add((j, k), w.clone());
                }
            }
        }
        match (self.tail, other.tail) {
            (Tail::Identity { start: s1 }, Tail::Identity { start: s2 }) => {
                Self::from_identity_deviation(s1.max(s2), acc)
            }
            _ => Self::from_zero_tail(acc),
        }
    }

    /// `a·u + b·w`. Fails when the tails would combine to a multiple of the
    /// identity other than 0 or 1.
    pub fn linear_combination(a: &S, u: &Self, b: &S, w: &Self) -> Result<Self, MatrixError> {
        let mut acc: BTreeMap<(usize, usize), S> = BTreeMap::new();
        let mut add = |pos: (usize, usize), v: S| {
            let slot = acc.entry(pos).or_insert_with(S::zero);
            *slot = slot.clone() + v;
        };
        for (&pos, v) in &u.entries {
            add(pos, a.clone() * v);
        }
        for (&pos, v) in &w.entries {
            add(pos, b.clone() * v);
        }
        let starts: Vec<usize> = [u.tail.start(), w.tail.start()].into_iter().flatten().collect();
        let Some(&tail_start) = starts.iter().max() else {
            return Ok(Self::from_zero_tail(acc));
        };
        // c_u D_{s_u} = c_u D_max + c_u diag[s_u, max)
        let mut coefficient = S::zero();
        for (tail, c) in [(u.tail, a), (w.tail, b)] {
            if let Tail::Identity { start } = tail {
                coefficient = coefficient + c;
                for i in start..tail_start {
                    add((i, i), c.clone());
                }
            }
        }
        if coefficient.is_negligible() {
            Ok(Self::from_zero_tail(acc))
        } else if coefficient.approx_eq(&S::one()) {
            Ok(Self::from_identity_deviation(tail_start, acc))
        } else {
            Err(MatrixError::UnrepresentableTail)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        Self::linear_combination(&S::one(), self, &S::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        Self::linear_combination(&S::one(), self, &-S::one(), other)
    }

    /// Entrywise convex blend `t·u + (1−t)·w`.
    pub fn blend(t: &S, u: &Self, w: &Self) -> Result<Self, MatrixError> {
        Self::linear_combination(t, u, &(S::one() - t), w)
    }

    /// Scales a zero-tail matrix (identity tails only scale by 0 or 1).
    pub fn scale(&self, c: &S) -> Result<Self, MatrixError> {
        Self::linear_combination(c, self, &S::zero(), &Self::zero())
    }

    /// Equal as operators, up to the scalar tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        match self.sub(other) {
            Ok(d) => d.tail == Tail::Zero && d.entries.is_empty(),
            Err(_) => false,
        }
    }

    /// Dense `n × n` upper-left block, row-major.
    pub fn dense(&self, n: usize) -> Vec<Vec<S>> {
        (1..=n)
            .map(|m| (1..=n).map(|k| self.coefficient(m, k)).collect())
            .collect()
    }

    /// Rows holding at least one stored entry in the given columns.
    pub fn rows_meeting_columns(&self, cols: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.entries
            .keys()
            .filter(|(_, k)| cols.contains(k))
            .map(|&(m, _)| m)
            .collect()
    }

    pub fn to_f64(&self) -> CoeffMatrix<f64> {
        CoeffMatrix {
            entries: self
                .entries
                .iter()
                .map(|(&pos, v)| (pos, v.to_f64()))
                .filter(|(_, v)| *v != 0.0)
                .collect(),
            tail: self.tail,
        }
    }
}
