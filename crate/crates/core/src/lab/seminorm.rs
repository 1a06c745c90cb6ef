use rayon::prelude::*;

use crate::decomposition::FiniteBlock;
use crate::linalg::top_singular;
use crate::matrices::{CoeffMatrix, FinVector, PartialPermutation, Tail};
use crate::scalar::Scalar;

use super::{LabError, SeminormReport};

/// Iteration cap for [`op_norm`].
pub const OP_NORM_MAX_ITER: usize = 100_000;

/// `⟨ux, y⟩`.
pub fn weak_pairing<S: Scalar>(u: &CoeffMatrix<S>, x: &FinVector<S>, y: &FinVector<S>) -> S {
    u.apply(x).dot(y)
}

/// `‖ux‖`.
pub fn strong_seminorm<S: Scalar>(u: &CoeffMatrix<S>, x: &FinVector<S>) -> f64 {
    u.apply(x).norm()
}

/// `max(‖ux‖, ‖u*x‖)`.
pub fn strongstar_seminorm<S: Scalar>(u: &CoeffMatrix<S>, x: &FinVector<S>) -> f64 {
    strong_seminorm(u, x).max(strong_seminorm(&u.adjoint(), x))
}

/// Largest singular value of a block by power iteration from the
/// normalized all-ones vector.
pub fn op_norm<S: Scalar>(a: &FiniteBlock<S>, eps_it: f64) -> Result<f64, LabError> {
    let rows = a.to_f64_rows();
    let n = a.size();
    top_singular(&rows, n, &vec![1.0; n], eps_it, OP_NORM_MAX_ITER)
        .map(|est| est.value)
        .map_err(|e| LabError::Inconclusive {
            last_estimate: e.last_estimate,
            last_iterate: e.last_iterate,
        })
}

/// The block swap on `[1, 2n]`: `k ↦ k + n` for `k ≤ n`, `k ↦ k - n` above.
pub fn shift_permutation(n: usize) -> PartialPermutation {
    PartialPermutation::from_pairs((1..=n).flat_map(|k| [(k, k + n), (k + n, k)]))
        .expect("block swap is injective")
}

/// The matrix with a single 1 at `(1, n)`; it maps `e_n` to `e_1`.
pub fn rank_one<S: Scalar>(n: usize) -> CoeffMatrix<S> {
    CoeffMatrix::new(Tail::Zero, [(1, n, S::one())]).expect("n is positive")
}

/// Samples `⟨π(ρ_n)x, y⟩` for `n = 1..=max_n`.
///
/// The pairing vanishes exactly once `n` reaches the larger support of the
/// two vectors, so when `max_n` covers that point the verdict is decided by
/// exact zeros there; otherwise the sampled rule with tolerance `tol` applies.
pub fn weak_null_sweep<S: Scalar>(x: &FinVector<S>, y: &FinVector<S>, max_n: usize, tol: f64) -> SeminormReport {
    let values: Vec<S> = (1..=max_n)
        .into_par_iter()
        .map(|n| weak_pairing(&CoeffMatrix::finitary(&shift_permutation(n)), x, y))
        .collect();
    let samples: Vec<(usize, f64)> = values.iter().enumerate().map(|(i, v)| (i + 1, v.to_f64())).collect();
    let label = "weak pairing <pi(rho_n) x, y>";
    let support = x.max_support().max(y.max_support()).max(1);
    if support <= max_n {
        let verdict = if values[support - 1..].iter().all(|v| v.is_zero()) {
            super::Verdict::ConvergesToZero
        } else {
            super::Verdict::Inconclusive
        };
        SeminormReport::new(label, samples, verdict)
    } else {
        SeminormReport::decided(label, samples, tol, None)
    }
}

/// Samples `‖u^(n) x‖` and `‖u^(n)* e_1‖` for the rank-one sequence.
pub fn strong_not_strongstar_sweep<S: Scalar>(
    x: &FinVector<S>,
    max_n: usize,
    tol: f64,
) -> (SeminormReport, SeminormReport) {
    let e1 = FinVector::<S>::basis(1);
    let pairs: Vec<(f64, f64)> = (1..=max_n)
        .into_par_iter()
        .map(|n| {
            let u = rank_one::<S>(n);
            (strong_seminorm(&u, x), strong_seminorm(&u.adjoint(), &e1))
        })
        .collect();
    let strong = pairs.iter().enumerate().map(|(i, p)| (i + 1, p.0)).collect();
    let adjoint = pairs.iter().enumerate().map(|(i, p)| (i + 1, p.1)).collect();
    (
        SeminormReport::decided("strong ||u_n x||", strong, tol, None),
        SeminormReport::decided("adjoint ||u_n* e_1||", adjoint, tol, Some(1.0)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::Verdict;
    use crate::scalar::Rational;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    #[test]
    fn pairing_examples() {
        let e1 = FinVector::<Rational>::basis(1);
        assert_eq!(weak_pairing(&CoeffMatrix::identity(), &e1, &e1), q(1, 1));
        for n in 1..8 {
            let u = CoeffMatrix::finitary(&shift_permutation(n));
            assert_eq!(weak_pairing(&u, &e1, &e1), q(0, 1));
        }
    }

    #[test]
    fn shift_is_block_swap_involution() {
        assert_eq!(shift_permutation(1), PartialPermutation::cycle(&[1, 2]).unwrap());
        assert_eq!(shift_permutation(2), PartialPermutation::from_images(&[3, 4, 1, 2]).unwrap());
        for n in 1..10 {
            let r = shift_permutation(n);
            assert_eq!(r.compose(&r), PartialPermutation::identity(2 * n));
        }
    }

    #[test]
    fn rank_one_examples() {
        for n in 1..6 {
            let u = rank_one::<Rational>(n);
            assert_eq!(strong_seminorm(&u, &FinVector::basis(n)), 1.0);
            assert_eq!(strongstar_seminorm(&u, &FinVector::basis(1)), 1.0);
            for k in (1..8).filter(|&k| k != n) {
                assert_eq!(strong_seminorm(&u, &FinVector::basis(k)), 0.0);
            }
        }
    }

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&FiniteBlock::<Rational>::identity(3), 1e-12).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(op_norm(&FiniteBlock::<Rational>::zeros(3), 1e-12).unwrap(), 0.0);
        let half = FiniteBlock::from_rows(vec![vec![q(1, 2); 2]; 2]).unwrap();
        assert!((op_norm(&half, 1e-12).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weak_sweep_examples() {
        let e1 = FinVector::<Rational>::basis(1);
        let e2 = FinVector::<Rational>::basis(2);
        let r = weak_null_sweep(&e1, &e1, 10, 1e-9);
        assert!(r.values().all(|v| v == 0.0));
        assert_eq!(r.verdict, Verdict::ConvergesToZero);
        let r = weak_null_sweep(&e1, &e2, 10, 1e-9);
        assert_eq!(r.samples[0], (1, 1.0));
        assert!(r.values().skip(1).all(|v| v == 0.0));
        let g = FinVector::geometric(1..=20);
        let r = weak_null_sweep(&g, &g, 40, 1e-9);
        assert!(r.values().skip(19).all(|v| v == 0.0));
        assert_eq!(r.verdict, Verdict::ConvergesToZero);
    }

    #[test]
    fn strong_sweep_examples() {
        let (strong, adjoint) = strong_not_strongstar_sweep(&FinVector::<Rational>::basis(3), 10, 1e-9);
        for (n, v) in &strong.samples {
            assert_eq!(*v, if *n == 3 { 1.0 } else { 0.0 });
        }
        assert_eq!(strong.verdict, Verdict::ConvergesToZero);
        assert!(adjoint.values().all(|v| v == 1.0));
        assert_eq!(adjoint.verdict, Verdict::BoundedAway(1.0));
        let (strong, _) = strong_not_strongstar_sweep(&FinVector::<Rational>::zero(), 10, 1e-9);
        assert!(strong.values().all(|v| v == 0.0));
    }
}
