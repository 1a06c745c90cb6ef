//! Dense linear algebra used by the lab: incremental row echelon form over
//! any [`Scalar`] and power iteration for the largest singular value.

use thiserror::Error;

use crate::scalar::Scalar;

/// Reduced row echelon basis that grows one vector at a time.
#[derive(Debug, Clone)]
pub struct EchelonBasis<S> {
    width: usize,
    rows: Vec<(usize, Vec<S>)>,
}

impl<S: Scalar> EchelonBasis<S> {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, mut v: Vec<S>) -> bool {
        assert_eq!(v.len(), self.width, "vector width mismatch");
        for (pivot, row) in &self.rows {
            let c = v[*pivot].clone();
            if !c.is_zero() {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = x.clone() - c.clone() * r;
                }
            }
        }
        let Some(pivot) = pick_pivot(&v) else {
            return false;
        };
        let inv = S::one() / v[pivot].clone();
        for x in v.iter_mut() {
            *x = x.clone() * &inv;
        }
        for x in v.iter_mut().filter(|x| x.is_negligible()) {
            *x = S::zero();
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[pivot].clone();
            if !c.is_zero() {
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = x.clone() - c.clone() * r;
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

fn pick_pivot<S: Scalar>(v: &[S]) -> Option<usize> {
    if S::EXACT {
        v.iter().position(|x| !x.is_zero())
    } else {
        // largest magnitude for stability
        v.iter()
            .enumerate()
            .filter(|(_, x)| !x.is_negligible())
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("finite entries"))
            .map(|(i, _)| i)
    }
}

/// Rank of a list of equal-width rows.
pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    let Some(width) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut basis = EchelonBasis::new(width);
    for row in rows {
        basis.insert(row.clone());
        if basis.is_full() {
            break;
        }
    }
    basis.rank()
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("power iteration did not converge after {iterations} iterations (last estimate {last_estimate})")]
pub struct NotConverged {
    pub iterations: usize,
    pub last_estimate: f64,
    pub last_iterate: Vec<f64>,
}

/// Largest singular value with its right singular vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularEstimate {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

fn mul(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

fn mul_transpose(a: &[Vec<f64>], y: &[f64], cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; cols];
    for (row, yi) in a.iter().zip(y) {
        for (o, r) in out.iter_mut().zip(row) {
            *o += r * yi;
        }
    }
    out
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Power iteration on `aᵀa` from `start`, stopping once the Rayleigh
/// quotient changes by less than `rel_tol` relative to itself.
pub fn top_singular(
    a: &[Vec<f64>],
    cols: usize,
    start: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<SingularEstimate, NotConverged> {
    let start_norm = norm(start);
    if cols == 0 || start_norm == 0.0 {
        return Ok(SingularEstimate {
            value: 0.0,
            vector: vec![0.0; cols],
            iterations: 0,
        });
    }
    let mut v: Vec<f64> = start.iter().map(|x| x / start_norm).collect();
    let mut previous = f64::NAN;
    for iteration in 1..=max_iter {
        let av = mul(a, &v);
        let rayleigh: f64 = av.iter().map(|x| x * x).sum();
        let w = mul_transpose(a, &av, cols);
        let w_norm = norm(&w);
        if w_norm == 0.0 {
            return Ok(SingularEstimate {
                value: 0.0,
                vector: v,
                iterations: iteration,
            });
        }
        if (rayleigh - previous).abs() <= rel_tol * rayleigh {
            return Ok(SingularEstimate {
                value: rayleigh.sqrt(),
                vector: v,
                iterations: iteration,
            });
        }
        previous = rayleigh;
        v = w.iter().map(|x| x / w_norm).collect();
    }
    Err(NotConverged {
        iterations: max_iter,
        last_estimate: previous.max(0.0).sqrt(),
        last_iterate: v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(a: i64) -> Rational {
        Rational::from_ratio(a, 1)
    }

    #[test]
    fn exact_rank() {
        let rows = vec![
            vec![q(1), q(2), q(3)],
            vec![q(2), q(4), q(6)],
            vec![q(0), q(1), q(1)],
        ];
        assert_eq!(rank(&rows), 2);
        assert_eq!(rank::<Rational>(&[]), 0);
        let id: Vec<Vec<Rational>> = (0..4)
            .map(|i| (0..4).map(|j| q((i == j) as i64)).collect())
            .collect();
        assert_eq!(rank(&id), 4);
    }

    #[test]
    fn float_rank_ignores_roundoff() {
        let rows = vec![vec![1.0, 1.0 / 3.0], vec![3.0, 1.0 + 1e-13]];
        assert_eq!(rank(&rows), 1);
    }

    #[test]
    fn power_iteration_on_known_spectra() {
        let a = vec![vec![3.0, 0.0], vec![0.0, 1.0]];
        let est = top_singular(&a, 2, &[1.0, 1.0], 1e-14, 10_000).unwrap();
        assert!((est.value - 3.0).abs() < 1e-6);
        let half = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let est = top_singular(&half, 2, &[1.0, 1.0], 1e-14, 10_000).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
        let zero = vec![vec![0.0; 3]; 3];
        assert_eq!(top_singular(&zero, 3, &[1.0; 3], 1e-12, 10).unwrap().value, 0.0);
    }

    #[test]
    fn reports_non_convergence() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 0.999_999]];
        let err = top_singular(&a, 2, &[1.0, 1.0], 1e-300, 5).unwrap_err();
        assert_eq!(err.iterations, 5);
        assert_eq!(err.last_iterate.len(), 2);
    }
}
