use std::collections::BTreeMap;

use crate::scalar::Scalar;

use super::MatrixError;

/// A finitely supported real vector indexed by the positive integers.
#[derive(Debug, Clone, PartialEq)]
pub struct FinVector<S> {
    coords: BTreeMap<usize, S>,
}

impl<S: Scalar> Default for FinVector<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> FinVector<S> {
    pub fn zero() -> Self {
        Self {
            coords: BTreeMap::new(),
        }
    }

    /// The basis vector `e_k`.
    pub fn basis(k: usize) -> Self {
        assert!(k >= 1, "basis vectors are 1-indexed");
        Self {
            coords: BTreeMap::from([(k, S::one())]),
        }
    }

    /// Builds a vector from `(index, value)` pairs; repeated indices add up.
    pub fn from_coords<I>(coords: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (usize, S)>,
    {
        let mut out: BTreeMap<usize, S> = BTreeMap::new();
        for (k, v) in coords {
            if k == 0 {
                return Err(MatrixError::ZeroIndex);
            }
            let slot = out.entry(k).or_insert_with(S::zero);
            *slot = slot.clone() + v;
        }
        out.retain(|_, v| !v.is_negligible());
        Ok(Self { coords: out })
    }

    pub(crate) fn from_map(mut coords: BTreeMap<usize, S>) -> Self {
        coords.retain(|_, v| !v.is_negligible());
        Self { coords }
    }

    /// Indicator vector of a set of indices.
    pub fn indicator<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Self::from_map(indices.into_iter().map(|k| (k, S::one())).collect())
    }

    pub fn get(&self, k: usize) -> S {
        self.coords.get(&k).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> + '_ {
        self.coords.iter().map(|(&k, v)| (k, v))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords.keys().copied()
    }

    /// Largest index in the support, 0 for the zero vector.
    pub fn max_support(&self) -> usize {
        self.coords.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dot(&self, other: &Self) -> S {
        let (small, large) = if self.coords.len() <= other.coords.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .coords
            .iter()
            .filter_map(|(k, v)| large.coords.get(k).map(|w| v.clone() * w))
            .fold(S::zero(), |acc, x| acc + x)
    }

    /// `‖x‖²`, exact in rational mode.
    pub fn norm_sq(&self) -> S {
        self.coords
            .values()
            .fold(S::zero(), |acc, v| acc + v.clone() * v)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().to_f64().sqrt()
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_map(
            self.coords
                .iter()
                .map(|(&k, v)| (k, v.clone() * c))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.coords.clone();
        for (&k, v) in &other.coords {
            let slot = out.entry(k).or_insert_with(S::zero);
            *slot = slot.clone() + v;
        }
        Self::from_map(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    /// Keeps only the coordinates with index in `[1, n]`.
    pub fn truncate(&self, n: usize) -> Self {
        Self {
            coords: self.coords.range(..=n).map(|(&k, v)| (k, v.clone())).collect(),
        }
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    pub fn to_f64(&self) -> FinVector<f64> {
        FinVector::from_map(self.coords.iter().map(|(&k, v)| (k, v.to_f64())).collect())
    }
}

impl FinVector<f64> {
    /// `Σ_{j ∈ indices} 2^{-j/2} e_j`.
    pub fn geometric<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Self::from_map(
            indices
                .into_iter()
                .map(|j| (j, 2f64.powf(-(j as f64) / 2.0)))
                .collect(),
        )
    }
}
