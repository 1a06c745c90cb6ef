//! Independent oracles shared by the integration tests. Nothing here calls
//! into the decomposition or linear algebra code under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use blab_core::Rational;

pub fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

/// Solves the square system `m x = rhs` by Gauss–Jordan elimination;
/// `None` when singular.
pub fn solve(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = Rational::one() / &m[col][col];
        for v in &mut m[col][col..] {
            *v = &*v * &inv;
        }
        rhs[col] = &rhs[col] * &inv;
        let pivot_row = m[col].clone();
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for (v, p) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *v = &*v - &factor * p;
                }
                let delta = &factor * &rhs[col];
                rhs[r] = &rhs[r] - delta;
            }
        }
    }
    Some(rhs)
}

/// Vertices of `{X ≥ 0, row sums ≤ 1, column sums ≤ 1}` in `ℝ^{n×n}`,
/// found by solving every choice of `n²` tight constraints and keeping the
/// feasible unique solutions. Each vertex is a row-major vector.
pub fn substochastic_vertices(n: usize) -> BTreeSet<Vec<Rational>> {
    let dim = n * n;
    // constraint rows a·x ≤ b, as (a, b)
    let mut constraints: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for i in 0..dim {
        let mut a = vec![Rational::zero(); dim];
        a[i] = -Rational::one();
        constraints.push((a, Rational::zero()));
    }
    for r in 0..n {
        let mut a = vec![Rational::zero(); dim];
        for c in 0..n {
            a[r * n + c] = Rational::one();
        }
        constraints.push((a, Rational::one()));
    }
    for c in 0..n {
        let mut a = vec![Rational::zero(); dim];
        for r in 0..n {
            a[r * n + c] = Rational::one();
        }
        constraints.push((a, Rational::one()));
    }
    let mut vertices = BTreeSet::new();
    for active in (0..constraints.len()).combinations(dim) {
        let m = active.iter().map(|&i| constraints[i].0.clone()).collect();
        let rhs = active.iter().map(|&i| constraints[i].1.clone()).collect();
        let Some(x) = solve(m, rhs) else { continue };
        let feasible = constraints.iter().all(|(a, b)| {
            let lhs = a.iter().zip(&x).fold(Rational::zero(), |acc, (ai, xi)| acc + ai * xi);
            lhs <= *b
        });
        if feasible {
            vertices.insert(x);
        }
    }
    vertices
}

/// All `n × n` 0/1 matrices with at most one 1 in each row and column,
/// by filtering all `2^{n²}` patterns.
pub fn partial_permutation_patterns(n: usize) -> BTreeSet<Vec<Rational>> {
    let dim = n * n;
    (0u32..1 << dim)
        .filter(|bits| {
            let on = |r: usize, c: usize| bits & (1 << (r * n + c)) != 0;
            (0..n).all(|r| (0..n).filter(|&c| on(r, c)).count() <= 1)
                && (0..n).all(|c| (0..n).filter(|&r| on(r, c)).count() <= 1)
        })
        .map(|bits| {
            (0..dim)
                .map(|i| if bits & (1 << i) != 0 { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `Σ_k C(n,k)² k!`, the number of partial permutations of `[1, n]`.
pub fn partial_permutation_count(n: usize) -> usize {
    (0..=n)
        .map(|k| binomial(n, k) * binomial(n, k) * (1..=k).product::<usize>())
        .sum()
}

/// Applies the infinite block-average matrix (block `j` is `j × j` with
/// entries `1/j`, blocks continuing forever) to a finitely supported vector.
pub fn isbell_apply(x: &[(usize, f64)]) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    for &(k, xk) in x {
        let (mut offset, mut j) = (0, 1);
        while offset + j < k {
            offset += j;
            j += 1;
        }
        for m in offset + 1..=offset + j {
            *out.entry(m).or_insert(0.0) += xk / j as f64;
        }
    }
    out
}

/// `‖(a - b)x‖²` for the block-average matrix `a` and `b = Σ w_j π(ρ_j)`,
/// where each `ρ_j` is given by its moved points and fixes the rest.
pub fn isbell_gap_oracle(terms: &[(f64, BTreeMap<usize, usize>)], x: &[(usize, f64)]) -> f64 {
    let mut out = isbell_apply(x);
    for (w, rho) in terms {
        for &(k, xk) in x {
            let m = rho.get(&k).copied().unwrap_or(k);
            *out.entry(m).or_insert(0.0) -= w * xk;
        }
    }
    out.values().map(|v| v * v).sum()
}

pub fn is_nonnegative(v: &Rational) -> bool {
    !v.is_negative()
}
