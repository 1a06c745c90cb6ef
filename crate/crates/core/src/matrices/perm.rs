use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::MatrixError;

/// A finite partial injection on the positive integers.
///
/// Its matrix has a 1 at `(p(k), k)` for every `k` in the domain, so the
/// column `k` is sent to the row `p(k)`. Total on `[1, s)` and lifted with an
/// identity tail from `s`, it represents a finitary permutation.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct PartialPermutation {
    map: BTreeMap<usize, usize>,
}

impl PartialPermutation {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a partial permutation from `(source, target)` pairs.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut map = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (from, to) in pairs {
            if from == 0 || to == 0 {
                return Err(MatrixError::ZeroIndex);
            }
            if let Some(prev) = map.insert(from, to) {
                if prev != to {
                    return Err(MatrixError::NotAFunction { point: from });
                }
                continue;
            }
            if !seen.insert(to) {
                return Err(MatrixError::NotInjective { target: to });
            }
        }
        Ok(Self { map })
    }

    /// The identity on `[1, n]`.
    pub fn identity(n: usize) -> Self {
        Self {
            map: (1..=n).map(|k| (k, k)).collect(),
        }
    }

    /// One-line notation: `images[i]` is the image of `i + 1`.
    pub fn from_images(images: &[usize]) -> Result<Self, MatrixError> {
        Self::from_pairs(images.iter().enumerate().map(|(i, &t)| (i + 1, t)))
    }

    /// A cycle `(c_1 c_2 ... c_r)` sending `c_i` to `c_{i+1}`.
    pub fn cycle(points: &[usize]) -> Result<Self, MatrixError> {
        if points.len() < 2 {
            return Ok(Self::empty());
        }
        let pairs = points
            .iter()
            .zip(points.iter().cycle().skip(1))
            .map(|(&a, &b)| (a, b));
        Self::from_pairs(pairs)
    }

    pub fn get(&self, k: usize) -> Option<usize> {
        self.map.get(&k).copied()
    }

    /// Image of `k` when the map is read as a finitary permutation
    /// (points outside the domain are fixed).
    pub fn image_or_fixed(&self, k: usize) -> usize {
        self.get(k).unwrap_or(k)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().map(|(&a, &b)| (a, b))
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.keys().copied()
    }

    pub fn range(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.values().copied()
    }

    /// Largest index touched by the domain or the range (0 when empty).
    pub fn extent(&self) -> usize {
        self.map
            .iter()
            .map(|(&a, &b)| a.max(b))
            .max()
            .unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        Self {
            map: self.map.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    /// `self ∘ other`: first `other`, then `self`; defined where both steps are.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            map: other
                .map
                .iter()
                .filter_map(|(&k, &mid)| self.get(mid).map(|t| (k, t)))
                .collect(),
        }
    }

    /// Composition of finitary permutations, both read as fixing every
    /// point outside their domain.
    pub fn compose_finitary(&self, other: &Self) -> Self {
        let points: BTreeSet<usize> = self.domain().chain(other.domain()).collect();
        Self {
            map: points
                .into_iter()
                .map(|k| (k, self.image_or_fixed(other.image_or_fixed(k))))
                .filter(|(a, b)| a != b)
                .collect(),
        }
    }

    /// Keeps only the pairs with both source and target in `[1, n]`.
    pub fn restrict(&self, n: usize) -> Self {
        Self {
            map: self
                .map
                .iter()
                .filter(|(&a, &b)| a <= n && b <= n)
                .map(|(&a, &b)| (a, b))
                .collect(),
        }
    }

    /// Drops fixed points, the canonical form of a finitary permutation.
    pub fn without_fixed_points(&self) -> Self {
        Self {
            map: self
                .map
                .iter()
                .filter(|(a, b)| a != b)
                .map(|(&a, &b)| (a, b))
                .collect(),
        }
    }

    pub fn within(&self, n: usize) -> bool {
        self.extent() <= n
    }

    /// True when the map is a bijection of `[1, n]` onto itself.
    pub fn is_total_on(&self, n: usize) -> bool {
        self.map.len() == n && self.within(n)
    }

    /// Maps `[1, n]` onto `[1, n]` when read as a finitary permutation.
    pub fn preserves_block(&self, n: usize) -> bool {
        (1..=n).all(|k| self.image_or_fixed(k) <= n)
    }

    /// All permutations of `[1, n]` in lexicographic order of their images.
    pub fn all_permutations(n: usize) -> Vec<Self> {
        (1..=n)
            .permutations(n)
            .map(|images| Self {
                map: images.into_iter().enumerate().map(|(i, t)| (i + 1, t)).collect(),
            })
            .collect()
    }

    /// All partial permutations of `[1, n]`; there are `Σ_k C(n,k)² k!`.
    pub fn all_partial(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for size in 0..=n {
            for domain in (1..=n).combinations(size) {
                for targets in (1..=n).permutations(size) {
                    out.push(Self {
                        map: domain.iter().copied().zip(targets).collect(),
                    });
                }
            }
        }
        out
    }

    /// Extends a partial permutation of `[1, n]` to a permutation of
    /// `[1, 2n]` whose restriction to `[1, n]²` is `self`.
    pub fn extend_to_double(&self, n: usize) -> Self {
        let mut map = self.map.clone();
        let free_targets: Vec<usize> = (1..=n).filter(|t| !self.range().any(|r| r == *t)).collect();
        let unmapped: Vec<usize> = (1..=n).filter(|k| self.get(*k).is_none()).collect();
        // unmapped sources go out to n+1.., and n+1.. come back to the free targets
        for (i, &k) in unmapped.iter().enumerate() {
            map.insert(k, n + 1 + i);
        }
        for (i, &t) in free_targets.iter().enumerate() {
            map.insert(n + 1 + i, t);
        }
        let used: BTreeSet<usize> = map.values().copied().collect();
        let mut spare_targets = (n + 1..=2 * n).filter(|t| !used.contains(t));
        for k in n + 1 + free_targets.len()..=2 * n {
            if let Some(t) = spare_targets.next() {
                map.insert(k, t);
            }
        }
        Self { map }
    }
}

impl fmt::Debug for PartialPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PartialPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, b)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}→{b}")?;
        }
        write!(f, "}}")
    }
}

impl TryFrom<Vec<(usize, usize)>> for PartialPermutation {
    type Error = MatrixError;

    fn try_from(pairs: Vec<(usize, usize)>) -> Result<Self, Self::Error> {
        Self::from_pairs(pairs)
    }
}

impl From<PartialPermutation> for Vec<(usize, usize)> {
    fn from(p: PartialPermutation) -> Self {
        p.pairs().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn rejects_non_injective_maps() {
        assert!(matches!(
            PartialPermutation::from_pairs([(1, 3), (2, 3)]),
            Err(MatrixError::NotInjective { target: 3 })
        ));
        assert!(matches!(
            PartialPermutation::from_pairs([(1, 2), (1, 3)]),
            Err(MatrixError::NotAFunction { point: 1 })
        ));
        assert!(matches!(
            PartialPermutation::from_pairs([(0, 1)]),
            Err(MatrixError::ZeroIndex)
        ));
    }

    #[test]
    fn compose_and_inverse() {
        let rho = PartialPermutation::cycle(&[1, 2, 3]).unwrap();
        assert_eq!(rho.get(1), Some(2));
        assert_eq!(rho.get(3), Some(1));
        let id = rho.compose(&rho.inverse());
        assert_eq!(id, PartialPermutation::identity(3));

        let a = PartialPermutation::cycle(&[1, 2]).unwrap();
        let b = PartialPermutation::cycle(&[2, 3]).unwrap();
        // (1 2)∘(2 3): 1 -> 1 -> 2, 2 -> 3 -> 3, 3 -> 2 -> 1
        assert_eq!(
            a.compose_finitary(&b),
            PartialPermutation::from_pairs([(1, 2), (2, 3), (3, 1)]).unwrap()
        );
    }

    #[test]
    fn partial_enumeration_counts() {
        for n in 0..=4 {
            let expected: usize = (0..=n)
                .map(|k| binomial(n, k) * binomial(n, k) * factorial(k))
                .sum();
            let all = PartialPermutation::all_partial(n);
            assert_eq!(all.len(), expected);
            let distinct: BTreeSet<_> = all.iter().cloned().collect();
            assert_eq!(distinct.len(), expected);
        }
        assert_eq!(PartialPermutation::all_partial(2).len(), 7);
        assert_eq!(PartialPermutation::all_partial(3).len(), 34);
        assert_eq!(PartialPermutation::all_permutations(4).len(), 24);
    }

    #[test]
    fn double_extension_restricts_back() {
        for n in 1..=3 {
            for p in PartialPermutation::all_partial(n) {
                let ext = p.extend_to_double(n);
                assert!(ext.is_total_on(2 * n), "{p} -> {ext}");
                assert_eq!(ext.restrict(n), p);
            }
        }
    }
}
