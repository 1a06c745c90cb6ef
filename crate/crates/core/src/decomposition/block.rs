use std::fmt;

use serde_json::Value;

use crate::matrices::{CoeffMatrix, MatrixDoc, PartialPermutation, Tail};
use crate::scalar::{scalar_from_json, Scalar};

use super::{DecompositionError, LineKind};

/// A dense nonnegative `n × n` block, addressed with 1-based indices.
#[derive(Clone, PartialEq)]
pub struct FiniteBlock<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> FiniteBlock<S> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut b = Self::zeros(n);
        for i in 1..=n {
            b.set(i, i, S::one());
        }
        b
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, DecompositionError> {
        let n = rows.len();
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(DecompositionError::NotSquare {
                rows: n,
                row: row + 1,
                len: r.len(),
            });
        }
        let data: Vec<S> = rows.into_iter().flatten().collect();
        if let Some(pos) = data.iter().position(|v| v.is_negative()) {
            return Err(DecompositionError::NegativeEntry {
                row: pos / n + 1,
                col: pos % n + 1,
            });
        }
        Ok(Self { n, data })
    }

    /// The matrix of a partial permutation acting inside `[1, n]`.
    pub fn permutation(p: &PartialPermutation, n: usize) -> Result<Self, DecompositionError> {
        if !p.within(n) {
            return Err(DecompositionError::PermutationOutsideBlock { extent: p.extent(), n });
        }
        let mut b = Self::zeros(n);
        for (k, t) in p.pairs() {
            b.set(t, k, S::one());
        }
        Ok(b)
    }

    /// The upper-left `n × n` corner of `u`.
    pub fn from_matrix(u: &CoeffMatrix<S>, n: usize) -> Result<Self, DecompositionError> {
        Self::from_rows(u.dense(n))
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, m: usize, k: usize) -> &S {
        &self.data[(m - 1) * self.n + (k - 1)]
    }

    pub(crate) fn set(&mut self, m: usize, k: usize, v: S) {
        self.data[(m - 1) * self.n + (k - 1)] = v;
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.data.chunks(self.n.max(1)).map(<[S]>::to_vec).take(self.n).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> + '_ {
        self.data
            .iter()
            .enumerate()
            .map(move |(i, v)| (i / self.n + 1, i % self.n + 1, v))
    }

    pub fn row_sum(&self, m: usize) -> S {
        (1..=self.n).fold(S::zero(), |acc, k| acc + self.entry(m, k))
    }

    pub fn col_sum(&self, k: usize) -> S {
        (1..=self.n).fold(S::zero(), |acc, m| acc + self.entry(m, k))
    }

    /// First line (rows before columns) whose sum fails `ok`.
    pub(crate) fn find_line(&self, ok: impl Fn(&S) -> bool) -> Option<(LineKind, usize, S)> {
        for m in 1..=self.n {
            let s = self.row_sum(m);
            if !ok(&s) {
                return Some((LineKind::Row, m, s));
            }
        }
        for k in 1..=self.n {
            let s = self.col_sum(k);
            if !ok(&s) {
                return Some((LineKind::Col, k, s));
            }
        }
        None
    }

    pub fn is_doubly_stochastic(&self) -> bool {
        self.find_line(|s| s.approx_eq(&S::one())).is_none()
    }

    pub fn is_substochastic(&self) -> bool {
        self.find_line(|s| s.le_tol(&S::one())).is_none()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for (m, k, v) in self.entries() {
            t.set(k, m, v.clone());
        }
        t
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.n == other.n && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b))
    }

    pub fn to_matrix(&self) -> CoeffMatrix<S> {
        CoeffMatrix::new(
            Tail::Zero,
            self.entries().map(|(m, k, v)| (m, k, v.clone())),
        )
        .expect("block entries are valid")
    }

    /// Row-major dense representation as `f64`.
    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows()
            .into_iter()
            .map(|r| r.iter().map(Scalar::to_f64).collect())
            .collect()
    }

    /// Reads dense rows (`[[..], ..]` or `{"rows": [[..], ..]}`) or a
    /// zero-tail matrix document, whose size is its largest index.
    pub fn from_json_value(value: &Value) -> Result<Self, DecompositionError> {
        let rows = match value {
            Value::Array(_) => value,
            Value::Object(map) if map.contains_key("rows") => &map["rows"],
            Value::Object(_) => {
                let doc: MatrixDoc = serde_json::from_value(value.clone())
                    .map_err(|e| DecompositionError::Format(e.to_string()))?;
                let u: CoeffMatrix<S> =
                    doc.to_matrix().map_err(|e| DecompositionError::Format(e.to_string()))?;
                if u.tail() != Tail::Zero {
                    return Err(DecompositionError::Format(
                        "a finite block needs a zero tail".to_string(),
                    ));
                }
                return Self::from_matrix(&u, u.extent());
            }
            _ => return Err(DecompositionError::Format("expected rows or a matrix document".into())),
        };
        let rows = rows
            .as_array()
            .ok_or_else(|| DecompositionError::Format("`rows` must be an array".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| DecompositionError::Format("each row must be an array".into()))?
                    .iter()
                    .map(|v| scalar_from_json::<S>(v).map_err(|e| DecompositionError::Format(e.to_string())))
                    .collect::<Result<Vec<S>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(rows)
    }

    pub fn from_json_str(text: &str) -> Result<Self, DecompositionError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| DecompositionError::Format(e.to_string()))?;
        Self::from_json_value(&value)
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows()
                .iter()
                .map(|r| Value::Array(r.iter().map(Scalar::to_json).collect()))
                .collect(),
        )
    }
}

impl<S: Scalar> fmt::Debug for FiniteBlock<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows().iter().map(|r| {
            r.iter().map(ToString::to_string).collect::<Vec<_>>()
        })).finish()
    }
}
