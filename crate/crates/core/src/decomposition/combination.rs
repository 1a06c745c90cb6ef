use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::matrices::{CoeffMatrix, MatrixError, PartialPermutation, Tail};
use crate::scalar::Scalar;

use super::{DecompositionError, FiniteBlock};

/// A convex combination `Σ t_j P_j` of (partial) permutation matrices.
#[derive(Clone, PartialEq)]
pub struct ConvexCombination<S> {
    terms: Vec<(S, PartialPermutation)>,
}

impl<S: Scalar> ConvexCombination<S> {
    /// Validates positivity, the unit sum and distinctness of the terms.
    pub fn new(terms: Vec<(S, PartialPermutation)>) -> Result<Self, DecompositionError> {
        if let Some((w, _)) = terms.iter().find(|(w, _)| !w.is_positive()) {
            return Err(DecompositionError::InvalidWeight(w.to_string()));
        }
        let total = terms.iter().fold(S::zero(), |acc, (w, _)| acc + w);
        if !total.approx_eq(&S::one()) {
            return Err(DecompositionError::WeightSum(total.to_string()));
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some((_, p)) = terms.iter().find(|(_, p)| !seen.insert(p.clone())) {
            return Err(DecompositionError::DuplicateTerm(p.to_string()));
        }
        Ok(Self { terms })
    }

    /// Merges terms with equal permutations, keeping first-occurrence order.
    pub fn from_terms_merging(terms: Vec<(S, PartialPermutation)>) -> Self {
        let mut order: Vec<PartialPermutation> = Vec::new();
        let mut weights: BTreeMap<PartialPermutation, S> = BTreeMap::new();
        for (w, p) in terms {
            match weights.get_mut(&p) {
                Some(acc) => *acc = acc.clone() + w,
                None => {
                    order.push(p.clone());
                    weights.insert(p, w);
                }
            }
        }
        let terms = order
            .into_iter()
            .map(|p| {
                let w = weights.remove(&p).expect("every ordered term has a weight");
                (w, p)
            })
            .collect();
        Self { terms }
    }

    pub(crate) fn from_terms_unchecked(terms: Vec<(S, PartialPermutation)>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[(S, PartialPermutation)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight_sum(&self) -> S {
        self.terms.iter().fold(S::zero(), |acc, (w, _)| acc + w)
    }

    /// Largest index touched by any term.
    pub fn extent(&self) -> usize {
        self.terms.iter().map(|(_, p)| p.extent()).max().unwrap_or(0)
    }

    /// `Σ t_j P_j` as a dense `n × n` block.
    pub fn reconstruct(&self, n: usize) -> Result<FiniteBlock<S>, DecompositionError> {
        let mut out = FiniteBlock::<S>::zeros(n);
        for (w, p) in &self.terms {
            if !p.within(n) {
                return Err(DecompositionError::PermutationOutsideBlock { extent: p.extent(), n });
            }
            for (k, t) in p.pairs() {
                let v = out.entry(t, k).clone() + w;
                out.set(t, k, v);
            }
        }
        Ok(out)
    }

    /// `Σ t_j P_j` with every term read as a finitary permutation, i.e. with
    /// points outside its domain fixed. The weights must sum to one so the
    /// identity tail is preserved.
    pub fn to_finitary_matrix(&self) -> Result<CoeffMatrix<S>, MatrixError> {
        if !self.weight_sum().approx_eq(&S::one()) {
            return Err(MatrixError::UnrepresentableTail);
        }
        let start = self.extent() + 1;
        let mut entries: BTreeMap<(usize, usize), S> = BTreeMap::new();
        for (w, p) in &self.terms {
            for k in 1..start {
                let slot = entries.entry((p.image_or_fixed(k), k)).or_insert_with(S::zero);
                *slot = slot.clone() + w;
            }
        }
        CoeffMatrix::new(
            Tail::Identity { start },
            entries.into_iter().filter(|(_, v)| !v.is_negligible()).map(|((m, k), v)| (m, k, v)),
        )
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(w, p)| {
                    let pairs: Vec<(usize, usize)> = p.pairs().collect();
                    json!({ "weight": w.to_json(), "perm": pairs })
                })
                .collect(),
        )
    }
}

impl<S: Scalar> fmt::Debug for ConvexCombination<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.terms.iter().map(|(w, p)| format!("({w}, {p})")))
            .finish()
    }
}

impl<S: Scalar> fmt::Display for ConvexCombination<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (w, p)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{w}·{p}")?;
        }
        Ok(())
    }
}
