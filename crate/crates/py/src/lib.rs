//! Python bindings. Exact values cross the boundary as `fractions.Fraction`;
//! inputs may be ints, Fractions, floats or `"p/q"` strings.

use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use blab_core::decomposition::{self as dec, FiniteBlock};
use blab_core::lab::{self, IsbellMatrix, SpanVariant, WitnessKind};
use blab_core::suites::{self, Arithmetic, OutputFormat, RunConfig, Suite};
use blab_core::truncation::{self, TruncationLevel};
use blab_core::{CoeffMatrix, ConvexCombination, FinVector, PartialPermutation, Rational, Scalar, Tail};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = obj.str()?.to_string();
    Rational::parse(&text).map_err(value_error)
}

fn fraction<'py>(py: Python<'py>, v: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((v.to_string(),))
}

fn level(n: usize) -> PyResult<TruncationLevel> {
    TruncationLevel::new(n).map_err(value_error)
}

fn rows(obj: &Bound<'_, PyAny>) -> PyResult<Vec<Vec<Rational>>> {
    obj.try_iter()?
        .map(|row| row?.try_iter()?.map(|v| to_rational(&v?)).collect())
        .collect()
}

fn block(obj: &Bound<'_, PyAny>) -> PyResult<FiniteBlock<Rational>> {
    FiniteBlock::from_rows(rows(obj)?).map_err(value_error)
}

fn perm(pairs: Vec<(usize, usize)>) -> PyResult<PartialPermutation> {
    PartialPermutation::from_pairs(pairs).map_err(value_error)
}

fn vector(coords: Vec<(usize, Bound<'_, PyAny>)>) -> PyResult<FinVector<Rational>> {
    let coords = coords
        .iter()
        .map(|(k, v)| Ok((*k, to_rational(v)?)))
        .collect::<PyResult<Vec<_>>>()?;
    FinVector::from_coords(coords).map_err(value_error)
}

fn vector_out<'py>(py: Python<'py>, x: &FinVector<Rational>) -> PyResult<Vec<(usize, Bound<'py, PyAny>)>> {
    x.iter().map(|(k, v)| Ok((k, fraction(py, v)?))).collect()
}

type Terms<'py> = Vec<(Bound<'py, PyAny>, Vec<(usize, usize)>)>;

fn terms_out<'py>(py: Python<'py>, c: &ConvexCombination<Rational>) -> PyResult<Terms<'py>> {
    c.terms()
        .iter()
        .map(|(w, p)| Ok((fraction(py, w)?, p.pairs().collect())))
        .collect()
}

/// A finitely describable matrix over the positive integers with exact
/// rational entries and a zero or identity tail.
#[pyclass(name = "CoeffMatrix", module = "blab", eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyCoeffMatrix {
    inner: CoeffMatrix<Rational>,
}

impl From<CoeffMatrix<Rational>> for PyCoeffMatrix {
    fn from(inner: CoeffMatrix<Rational>) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyCoeffMatrix {
    /// `entries` is a list of `(row, col, value)`; `identity_from` sets an
    /// identity tail starting at that index.
    #[new]
    #[pyo3(signature = (entries, identity_from=None))]
    fn new(entries: Vec<(usize, usize, Bound<'_, PyAny>)>, identity_from: Option<usize>) -> PyResult<Self> {
        let tail = identity_from.map_or(Tail::Zero, Tail::identity_from);
        let entries = entries
            .iter()
            .map(|(m, k, v)| Ok((*m, *k, to_rational(v)?)))
            .collect::<PyResult<Vec<_>>>()?;
        CoeffMatrix::new(tail, entries).map(Self::from).map_err(value_error)
    }

    #[staticmethod]
    fn identity() -> Self {
        CoeffMatrix::identity().into()
    }

    #[staticmethod]
    fn zero() -> Self {
        CoeffMatrix::zero().into()
    }

    /// Dense rows with a zero tail.
    #[staticmethod]
    fn from_rows(rows_obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(CoeffMatrix::from_dense(&rows(rows_obj)?).into())
    }

    /// The matrix of a partial permutation given as `(source, target)` pairs.
    #[staticmethod]
    #[pyo3(signature = (pairs, identity_from=None))]
    fn permutation(pairs: Vec<(usize, usize)>, identity_from: Option<usize>) -> PyResult<Self> {
        let tail = identity_from.map_or(Tail::Zero, Tail::identity_from);
        CoeffMatrix::permutation(&perm(pairs)?, tail)
            .map(Self::from)
            .map_err(value_error)
    }

    /// The Isbell block-average matrix with the given number of blocks.
    #[staticmethod]
    fn isbell(blocks: usize) -> PyResult<Self> {
        if blocks == 0 {
            return Err(value_error("at least one block"));
        }
        Ok(IsbellMatrix::<Rational>::new(blocks).matrix().clone().into())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CoeffMatrix::from_json_str(text).map(Self::from).map_err(value_error)
    }

    fn to_json(&self) -> String {
        self.inner.to_json_value().to_string()
    }

    fn classify(&self) -> &'static str {
        self.inner.classify().name()
    }

    /// Human-readable descriptions of the failed line-sum and sign checks.
    fn violations(&self) -> Vec<String> {
        self.inner.violations().iter().map(ToString::to_string).collect()
    }

    fn coefficient<'py>(&self, py: Python<'py>, m: usize, k: usize) -> PyResult<Bound<'py, PyAny>> {
        if m == 0 || k == 0 {
            return Err(PyIndexError::new_err("indices are 1-based"));
        }
        fraction(py, &self.inner.coefficient(m, k))
    }

    /// `None` for a zero tail, otherwise the first index of the identity tail.
    fn identity_from(&self) -> Option<usize> {
        self.inner.tail().start()
    }

    fn entries<'py>(&self, py: Python<'py>) -> PyResult<Vec<(usize, usize, Bound<'py, PyAny>)>> {
        self.inner
            .entries()
            .map(|(m, k, v)| Ok((m, k, fraction(py, v)?)))
            .collect()
    }

    fn dense<'py>(&self, py: Python<'py>, n: usize) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        self.inner
            .dense(n)
            .iter()
            .map(|row| row.iter().map(|v| fraction(py, v)).collect())
            .collect()
    }

    /// Applies the matrix to a finitely supported vector of `(index, value)`.
    fn apply<'py>(&self, py: Python<'py>, x: Vec<(usize, Bound<'py, PyAny>)>) -> PyResult<Vec<(usize, Bound<'py, PyAny>)>> {
        vector_out(py, &self.inner.apply(&vector(x)?))
    }

    fn adjoint(&self) -> Self {
        self.inner.adjoint().into()
    }

    fn compose(&self, other: &Self) -> Self {
        self.inner.compose(&other.inner).into()
    }

    /// `t·self + (1 − t)·other`.
    fn blend(&self, t: &Bound<'_, PyAny>, other: &Self) -> PyResult<Self> {
        CoeffMatrix::blend(&to_rational(t)?, &self.inner, &other.inner)
            .map(Self::from)
            .map_err(value_error)
    }

    fn corner(&self, n: usize) -> PyResult<Self> {
        Ok(truncation::corner(&self.inner, level(n)?).into())
    }

    fn border(&self, n: usize) -> PyResult<Self> {
        Ok(truncation::border(&self.inner, level(n)?).into())
    }

    fn finitary_lift(&self, n: usize) -> PyResult<Self> {
        Ok(truncation::finitary_lift(&self.inner, level(n)?).into())
    }

    fn __matmul__(&self, other: &Self) -> Self {
        self.compose(other)
    }

    fn __repr__(&self) -> String {
        let tail = match self.inner.tail() {
            Tail::Zero => "zero tail".to_string(),
            Tail::Identity { start } => format!("identity from {start}"),
        };
        format!("CoeffMatrix({} entries, {tail}, {})", self.inner.nnz(), self.inner.classify().name())
    }
}

/// Birkhoff decomposition of a doubly stochastic block into permutations.
#[pyfunction]
fn bvn_decompose<'py>(py: Python<'py>, rows: &Bound<'py, PyAny>) -> PyResult<Terms<'py>> {
    terms_out(py, &dec::bvn_decompose(&block(rows)?).map_err(value_error)?)
}

/// Decomposition of a substochastic block into partial permutations.
#[pyfunction]
fn mirsky_decompose<'py>(py: Python<'py>, rows: &Bound<'py, PyAny>) -> PyResult<Terms<'py>> {
    terms_out(py, &dec::mirsky_decompose(&block(rows)?).map_err(value_error)?)
}

/// Dense `n × n` rows of `Σ w · P`.
#[pyfunction]
fn reconstruct<'py>(
    py: Python<'py>,
    terms: Terms<'py>,
    n: usize,
) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    let terms = terms
        .into_iter()
        .map(|(w, p)| Ok((to_rational(&w)?, perm(p)?)))
        .collect::<PyResult<Vec<_>>>()?;
    let c = ConvexCombination::new(terms).map_err(value_error)?;
    let block = dec::reconstruct(&c, n).map_err(value_error)?;
    block
        .rows()
        .iter()
        .map(|row| row.iter().map(|v| fraction(py, v)).collect())
        .collect()
}

#[pyfunction]
fn is_extreme(rows: &Bound<'_, PyAny>) -> PyResult<bool> {
    dec::is_extreme(&block(rows)?).map_err(value_error)
}

/// Largest singular value of a block by power iteration.
#[pyfunction]
#[pyo3(signature = (rows, eps=1e-12))]
fn op_norm(rows: &Bound<'_, PyAny>, eps: f64) -> PyResult<f64> {
    lab::op_norm(&block(rows)?, eps).map_err(value_error)
}

#[pyfunction]
fn isbell_bound<'py>(py: Python<'py>, n: usize, p: usize) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &lab::isbell_bound::<Rational>(n, p))
}

/// Gap `‖(a − b)x‖²` certified on block `n` of the Isbell matrix with
/// `blocks` blocks, for `b = Σ w π(ρ)` given as `(weight, pairs)` terms.
#[pyfunction]
fn isbell_gap<'py>(
    py: Python<'py>,
    blocks: usize,
    terms: Terms<'py>,
    n: usize,
) -> PyResult<Bound<'py, PyDict>> {
    if blocks == 0 {
        return Err(value_error("at least one block"));
    }
    let terms = terms
        .into_iter()
        .map(|(w, p)| Ok((to_rational(&w)?, perm(p)?)))
        .collect::<PyResult<Vec<_>>>()?;
    let b = ConvexCombination::new(terms).map_err(value_error)?;
    let a = IsbellMatrix::<Rational>::new(blocks);
    let result = lab::isbell_gap(&a, &b, n).map_err(value_error)?;
    let out = PyDict::new(py);
    out.set_item("gap", result.gap)?;
    out.set_item("block_gap", result.block_gap)?;
    let exact = result.exact_gap.as_ref().map(|v| fraction(py, v)).transpose()?;
    out.set_item("exact_gap", exact)?;
    let kind = match result.kind {
        WitnessKind::AvoidingColumns { .. } => "avoiding_columns",
        WitnessKind::Spectral => "spectral",
        WitnessKind::FarBlock { .. } => "far_block",
    };
    out.set_item("kind", kind)?;
    let witness: Vec<(usize, f64)> = result.witness.iter().map(|(k, v)| (k, *v)).collect();
    out.set_item("witness", witness)?;
    Ok(out)
}

#[pyfunction]
fn exposed_verify(pairs: Vec<(usize, usize)>, n: usize) -> PyResult<bool> {
    lab::exposed_verify(&perm(pairs)?, n).map_err(value_error)
}

#[pyfunction]
fn commutant_dimension(m: usize) -> PyResult<usize> {
    lab::commutant_dimension(m).map_err(value_error)
}

/// `variant` is `"tail_lift"` or `"corner"`.
#[pyfunction]
fn span_dimension(n: usize, variant: &str) -> PyResult<usize> {
    let variant = match variant {
        "tail_lift" => SpanVariant::TailLift,
        "corner" => SpanVariant::Corner,
        other => return Err(value_error(format!("unknown span variant `{other}`"))),
    };
    lab::span_dimension(n, variant).map_err(value_error)
}

/// Runs a verification suite; returns `(passed, report)` with the report
/// rendered as JSON or CSV text.
#[pyfunction]
#[pyo3(signature = (name, seed=0, tol=None, out="json", blocks=None, perms=None, trials=None, max_n=None, max_m=None))]
#[allow(clippy::too_many_arguments)]
fn run_suite(
    name: &str,
    seed: u64,
    tol: Option<f64>,
    out: &str,
    blocks: Option<usize>,
    perms: Option<usize>,
    trials: Option<usize>,
    max_n: Option<usize>,
    max_m: Option<usize>,
) -> PyResult<(bool, String)> {
    let suite: Suite = name.parse().map_err(value_error)?;
    let output = match out {
        "json" => OutputFormat::Json,
        "csv" => OutputFormat::Csv,
        other => return Err(value_error(format!("unknown output format `{other}`"))),
    };
    let config = RunConfig {
        arithmetic: tol.map_or(Arithmetic::Exact, |tol| Arithmetic::Float { tol }),
        seed,
        output,
        blocks,
        perms,
        trials,
        max_n,
        max_m,
    };
    let report = suites::run_suite(suite, &config).map_err(value_error)?;
    Ok((report.passed(), report.render(output)))
}

#[pymodule]
fn blab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCoeffMatrix>()?;
    m.add_function(wrap_pyfunction!(bvn_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(mirsky_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(is_extreme, m)?)?;
    m.add_function(wrap_pyfunction!(op_norm, m)?)?;
    m.add_function(wrap_pyfunction!(isbell_bound, m)?)?;
    m.add_function(wrap_pyfunction!(isbell_gap, m)?)?;
    m.add_function(wrap_pyfunction!(exposed_verify, m)?)?;
    m.add_function(wrap_pyfunction!(commutant_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(span_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
