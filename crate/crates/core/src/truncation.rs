//! Corner and border truncations and the finitary lift.
//!
//! `corner(u, n)` keeps the coefficients with both indices `≤ n`;
//! `border(u, n)` keeps those with either index `≤ n`; `finitary_lift(u, n)`
//! is the corner completed by the identity from `n + 1` on.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::matrices::{CoeffMatrix, FinVector, Tail};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("truncation level must be at least 1")]
pub struct ZeroLevel;

/// Truncation index `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruncationLevel(usize);

impl TruncationLevel {
    pub fn new(n: usize) -> Result<Self, ZeroLevel> {
        if n == 0 {
            Err(ZeroLevel)
        } else {
            Ok(Self(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for TruncationLevel {
    type Error = ZeroLevel;

    fn try_from(n: usize) -> Result<Self, Self::Error> {
        Self::new(n)
    }
}

fn truncate<S: Scalar>(u: &CoeffMatrix<S>, keep: impl Fn(usize, usize) -> bool, n: usize) -> BTreeMap<(usize, usize), S> {
    let mut out: BTreeMap<(usize, usize), S> = u
        .entries()
        .filter(|&(m, k, _)| keep(m, k))
        .map(|(m, k, v)| ((m, k), v.clone()))
        .collect();
    // the identity tail meets either truncation only on its diagonal up to n
    if let Tail::Identity { start } = u.tail() {
        for i in start..=n {
            out.insert((i, i), S::one());
        }
    }
    out
}

/// `u^⟨n⟩`: zero outside `[1, n]²`.
pub fn corner<S: Scalar>(u: &CoeffMatrix<S>, n: TruncationLevel) -> CoeffMatrix<S> {
    let n = n.get();
    let map = truncate(u, |m, k| m <= n && k <= n, n);
    CoeffMatrix::new(Tail::Zero, map.into_iter().map(|((m, k), v)| (m, k, v)))
        .expect("corner entries are valid")
}

/// `u^[n]`: zero where both indices exceed `n`. The result always has a
/// zero tail, since the tail diagonal beyond `n` is cut away.
pub fn border<S: Scalar>(u: &CoeffMatrix<S>, n: TruncationLevel) -> CoeffMatrix<S> {
    let n = n.get();
    let map = truncate(u, |m, k| m <= n || k <= n, n);
    CoeffMatrix::new(Tail::Zero, map.into_iter().map(|((m, k), v)| (m, k, v)))
        .expect("border entries are valid")
}

/// `u^⟨n⟩ + id_{n+1}`.
pub fn finitary_lift<S: Scalar>(u: &CoeffMatrix<S>, n: TruncationLevel) -> CoeffMatrix<S> {
    let c = corner(u, n);
    CoeffMatrix::new(
        Tail::identity_from(n.get() + 1),
        c.entries().map(|(m, k, v)| (m, k, v.clone())),
    )
    .expect("corner support lies inside [1, n]²")
}

/// `‖(u − u^[n]) x‖²`, exact in rational mode.
pub fn border_strong_gap_sq<S: Scalar>(u: &CoeffMatrix<S>, x: &FinVector<S>, n: TruncationLevel) -> S {
    let rest = u
        .sub(&border(u, n))
        .expect("a matrix minus a zero-tail matrix keeps its tail");
    rest.apply(x).norm_sq()
}

/// `‖(u − u^[n]) x‖₂`.
pub fn border_strong_gap<S: Scalar>(u: &CoeffMatrix<S>, x: &FinVector<S>, n: TruncationLevel) -> f64 {
    border_strong_gap_sq(u, x, n).to_f64().sqrt()
}

/// `|⟨(u − u^⟨n⟩) x, y⟩|`.
pub fn corner_weak_gap<S: Scalar>(
    u: &CoeffMatrix<S>,
    x: &FinVector<S>,
    y: &FinVector<S>,
    n: TruncationLevel,
) -> S {
    let rest = u
        .sub(&corner(u, n))
        .expect("a matrix minus a zero-tail matrix keeps its tail");
    rest.apply(x).dot(y).abs()
}
