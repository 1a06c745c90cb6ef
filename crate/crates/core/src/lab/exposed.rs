use rayon::prelude::*;

use crate::matrices::{CoeffMatrix, FinVector, PartialPermutation, Tail};

use super::LabError;

/// Largest block size for exhaustive exposed-point checks.
pub const EXPOSED_MAX_N: usize = 6;

fn apply(p: &PartialPermutation, x: &FinVector<f64>) -> FinVector<f64> {
    CoeffMatrix::<f64>::permutation(p, Tail::Zero)
        .expect("a zero tail accepts any permutation")
        .apply(x)
}

/// The linear functional exposing `u` among partial permutations of `[1, n]`:
/// `f(v) = ⟨v x^I, u x^I⟩ - ⟨v x^{I^c}, x^{[1,n]}⟩`, where `I` is the
/// domain of `u`, `I^c` its complement in `[1, n]` and
/// `x^J = Σ_{j ∈ J} 2^{-j/2} e_j`.
pub fn exposed_functional(u: &PartialPermutation, v: &PartialPermutation, n: usize) -> f64 {
    let domain: Vec<usize> = u.domain().collect();
    let x_i = FinVector::geometric(domain.iter().copied());
    let x_ic = FinVector::geometric((1..=n).filter(|k| !domain.contains(k)));
    let x_all = FinVector::geometric(1..=n);
    apply(v, &x_i).dot(&apply(u, &x_i)) - apply(v, &x_ic).dot(&x_all)
}

/// Smallest margin `f(u) - f(v)` over partial permutations `v ≠ u` of
/// `[1, n]`, with the minimizing `v` (`None` when `u` is the only candidate).
pub fn exposed_margin(u: &PartialPermutation, n: usize) -> Result<Option<(f64, PartialPermutation)>, LabError> {
    if n > EXPOSED_MAX_N {
        return Err(LabError::BudgetExceeded {
            what: "exposed-point enumeration",
            requested: n,
            limit: EXPOSED_MAX_N,
        });
    }
    if !u.within(n) {
        return Err(LabError::OutsideBlock { extent: u.extent(), n });
    }
    let top = exposed_functional(u, u, n);
    let margins: Vec<(f64, PartialPermutation)> = PartialPermutation::all_partial(n)
        .into_par_iter()
        .filter(|v| v != u)
        .map(|v| (top - exposed_functional(u, &v, n), v))
        .collect();
    Ok(margins.into_iter().min_by(|a, b| a.0.total_cmp(&b.0)))
}

/// True iff `u` is the unique maximizer of its functional over the partial
/// permutations of `[1, n]`.
pub fn exposed_verify(u: &PartialPermutation, n: usize) -> Result<bool, LabError> {
    Ok(exposed_margin(u, n)?.is_none_or(|(margin, _)| margin > crate::scalar::FLOAT_TOLERANCE))
}
