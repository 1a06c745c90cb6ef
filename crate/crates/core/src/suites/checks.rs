use rayon::prelude::*;
use serde_json::{json, Value};

use crate::decomposition::{bvn_decompose, is_extreme, mirsky_complete, mirsky_decompose, ConvexCombination, FiniteBlock};
use crate::lab::{
    commutant_dimension, exposed_margin, isbell_bound, isbell_gap, span_dimension, strong_not_strongstar_sweep,
    weak_null_sweep, IsbellMatrix, SeminormReport, SpanVariant, Verdict, WitnessKind, COMMUTANT_MAX_M,
    EXPOSED_MAX_N, SPAN_MAX_N,
};
use crate::matrices::{FinVector, PartialPermutation};
use crate::scalar::{Rational, Scalar};

use super::random::{
    random_dss_matrix, random_isbell_combination, random_substochastic, random_vector, suite_seed, trial_rng,
};
use super::{Arithmetic, Assertion, RunConfig, Suite, SuiteError};

type Outcome = Result<(Vec<Assertion>, Vec<SeminormReport>), SuiteError>;

fn param(value: Option<usize>, default: usize, name: &'static str, limit: usize) -> Result<usize, SuiteError> {
    let v = value.unwrap_or(default);
    if v == 0 {
        return Err(SuiteError::InvalidParameter(format!("{name} must be positive")));
    }
    if v > limit {
        return Err(SuiteError::BudgetExceeded {
            param: name,
            requested: v,
            limit,
        });
    }
    Ok(v)
}

fn seed_for(suite: Suite, config: &RunConfig) -> u64 {
    suite_seed(suite.name(), config.seed)
}

const ISBELL_MAX_BLOCKS: usize = 40;
const ISBELL_MAX_PERMS: usize = 6;
const MAX_TRIALS: usize = 1_000_000;

/// Checks the Isbell bound on block `n` against `trials` random
/// combinations of `p` permutations.
pub fn isbell_case<S: Scalar>(a: &IsbellMatrix<S>, n: usize, p: usize, trials: usize, seed: u64, tol: f64) -> Assertion {
    let bound = isbell_bound::<S>(n, p);
    let stream = ((p as u64) << 48) ^ ((n as u64) << 32);
    let results: Vec<(f64, f64, WitnessKind, Option<String>)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed ^ stream, trial);
            let b = random_isbell_combination::<S, _>(&mut rng, p, a.num_blocks(), IsbellMatrix::<S>::block_range(n));
            match isbell_gap(a, &b, n) {
                Ok(g) => (g.gap, g.block_gap, g.kind, None),
                Err(e) => (f64::NAN, f64::NAN, WitnessKind::Spectral, Some(format!("{e}: {b}"))),
            }
        })
        .collect();
    let (worst, &(min_gap, _, _, _)) = results
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
        .expect("at least one trial");
    let kind_count = |f: fn(&WitnessKind) -> bool| results.iter().filter(|r| f(&r.2)).count();
    let min_block_gap = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let errors: Vec<&String> = results.iter().filter_map(|r| r.3.as_ref()).collect();
    let holds = errors.is_empty() && results.iter().all(|r| r.0 >= bound.to_f64() - tol);
    let mut detail = json!({
        "trials": trials,
        "column_witnesses": kind_count(|k| matches!(k, WitnessKind::AvoidingColumns { .. })),
        "spectral_witnesses": kind_count(|k| matches!(k, WitnessKind::Spectral)),
        "far_block_witnesses": kind_count(|k| matches!(k, WitnessKind::FarBlock { .. })),
        "min_gap_on_block": min_block_gap,
        "worst_trial": worst,
    });
    if !holds {
        let mut rng = trial_rng(seed ^ stream, worst);
        let b = random_isbell_combination::<S, _>(&mut rng, p, a.num_blocks(), IsbellMatrix::<S>::block_range(n));
        detail["counterexample"] = b.to_json_value();
        if let Some(e) = errors.first() {
            detail["error"] = json!(e);
        }
    }
    Assertion::new(
        format!("min gap on block {n} with p = {p}"),
        json!(min_gap),
        bound.to_json(),
        holds,
    )
    .with_detail(detail)
}

fn isbell_generic<S: Scalar>(config: &RunConfig) -> Outcome {
    let blocks = param(config.blocks, 25, "blocks", ISBELL_MAX_BLOCKS)?;
    let p = param(config.perms, 3, "perms", ISBELL_MAX_PERMS)?;
    let trials = param(config.trials, 100, "trials", MAX_TRIALS)?;
    if p * p >= blocks {
        return Err(SuiteError::InvalidParameter(format!(
            "no block n <= {blocks} satisfies p^2 < n for p = {p}"
        )));
    }
    let a = IsbellMatrix::<S>::new(blocks);
    let seed = seed_for(Suite::Isbell, config);
    let assertions = (p * p + 1..=blocks)
        .map(|n| isbell_case(&a, n, p, trials, seed, config.tolerance()))
        .collect();
    Ok((assertions, Vec::new()))
}

pub(super) fn isbell(config: &RunConfig) -> Outcome {
    match config.arithmetic {
        Arithmetic::Exact => isbell_generic::<Rational>(config),
        Arithmetic::Float { .. } => isbell_generic::<f64>(config),
    }
}

fn verdict_assertion(report: &SeminormReport, expected: Verdict) -> Assertion {
    Assertion::new(
        format!("verdict of {}", report.label),
        json!(report.verdict.to_string()),
        json!(expected.to_string()),
        report.verdict == expected,
    )
}

/// Largest `|value|` among samples with index at least `from`.
fn max_beyond(report: &SeminormReport, from: usize) -> f64 {
    report
        .samples
        .iter()
        .filter(|(n, _)| *n >= from)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max)
}

pub(super) fn topology(config: &RunConfig) -> Outcome {
    const SUPPORT: usize = 20;
    let max_n = param(config.max_n, 50, "max-n", 100_000)?;
    let trials = param(config.trials, 20, "trials", 10_000)?;
    let tol = config.tolerance();
    let mut assertions = Vec::new();
    let mut reports = Vec::new();

    let x = FinVector::geometric(1..=SUPPORT);
    let (strong, adjoint) = strong_not_strongstar_sweep(&x, max_n, tol);
    let strong_tail = max_beyond(&strong, SUPPORT + 1);
    assertions.push(Assertion::new(
        format!("strong samples beyond n = {SUPPORT}"),
        json!(strong_tail),
        json!(1e-3),
        strong_tail < 1e-3,
    ));
    assertions.push(verdict_assertion(&strong, Verdict::ConvergesToZero));
    let adjoint_dev = adjoint.values().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    assertions.push(Assertion::new(
        "adjoint samples deviate from 1",
        json!(adjoint_dev),
        json!(tol),
        adjoint_dev <= tol,
    ));
    assertions.push(verdict_assertion(&adjoint, Verdict::BoundedAway(1.0)));
    reports.push(strong);
    reports.push(adjoint);

    let e1 = FinVector::<Rational>::basis(1);
    let e2 = FinVector::<Rational>::basis(2);
    let fixed: [(&str, SeminormReport, usize); 3] = [
        ("e_1, e_1", weak_null_sweep(&e1, &e1, max_n, tol), 1),
        ("e_1, e_2", weak_null_sweep(&e1, &e2, max_n, tol), 2),
        ("x, x", weak_null_sweep(&x, &x, max_n, tol), SUPPORT),
    ];
    for (name, report, support) in fixed {
        let beyond = max_beyond(&report, support);
        assertions.push(Assertion::new(
            format!("weak pairing ({name}) beyond the support"),
            json!(beyond),
            json!(0),
            beyond == 0.0,
        ));
        if support <= max_n {
            assertions.push(verdict_assertion(&report, Verdict::ConvergesToZero));
        }
        reports.push(report);
    }

    let seed = seed_for(Suite::Topology, config);
    let random: Vec<(bool, Value)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let x = random_vector::<Rational, _>(&mut rng, 10);
            let y = random_vector::<Rational, _>(&mut rng, 10);
            let support = x.max_support().max(y.max_support()).max(1);
            let report = weak_null_sweep(&x, &y, 2 * support, tol);
            let ok = report.samples.iter().filter(|(n, _)| *n >= support).all(|(_, v)| *v == 0.0)
                && report.verdict == Verdict::ConvergesToZero;
            (ok, json!({ "trial": trial, "x": x.to_json_value(), "y": y.to_json_value() }))
        })
        .collect();
    let failures: Vec<Value> = random.iter().filter(|r| !r.0).map(|r| r.1.clone()).collect();
    let mut random_assertion = Assertion::new(
        "random weak sweeps vanish exactly beyond the support",
        json!(failures.len()),
        json!(0),
        failures.is_empty(),
    )
    .with_detail(json!({ "trials": trials }));
    if let Some(first) = failures.first() {
        random_assertion.detail = Some(json!({ "trials": trials, "counterexample": first }));
    }
    assertions.push(random_assertion);
    Ok((assertions, reports))
}

pub(super) fn exposed(config: &RunConfig) -> Outcome {
    let max_n = param(config.max_n, 4, "max-n", EXPOSED_MAX_N)?;
    let tol = config.tolerance();
    let mut assertions = Vec::new();
    for n in 1..=max_n {
        let candidates = PartialPermutation::all_partial(n);
        let margins: Vec<(PartialPermutation, Option<(f64, PartialPermutation)>)> = candidates
            .par_iter()
            .map(|u| (u.clone(), exposed_margin(u, n).expect("within budget and block")))
            .collect();
        let mut worst: Option<(f64, &PartialPermutation, &PartialPermutation)> = None;
        for (u, m) in &margins {
            if let Some((margin, v)) = m {
                if worst.is_none_or(|w| *margin < w.0) {
                    worst = Some((*margin, u, v));
                }
            }
        }
        let (measured, holds, detail) = match worst {
            None => (Value::Null, true, json!({ "candidates": candidates.len() })),
            Some((margin, u, v)) => (
                json!(margin),
                margin > tol,
                json!({
                    "candidates": candidates.len(),
                    "tightest_u": u.pairs().collect::<Vec<_>>(),
                    "tightest_v": v.pairs().collect::<Vec<_>>(),
                }),
            ),
        };
        assertions.push(
            Assertion::new(
                format!("smallest margin f(u) - f(v) on [1, {n}]"),
                measured,
                json!(format!("> {tol}")),
                holds,
            )
            .with_detail(detail),
        );
    }
    Ok((assertions, Vec::new()))
}

pub(super) fn commutant(config: &RunConfig) -> Outcome {
    let max_m = param(config.max_m, COMMUTANT_MAX_M, "max-m", COMMUTANT_MAX_M)?;
    let assertions = (1..=max_m)
        .map(|m| {
            let dim = commutant_dimension(m).expect("within budget");
            let expected = if m == 1 { 1 } else { 2 };
            Assertion::new(format!("commutant dimension for m = {m}"), json!(dim), json!(expected), dim == expected)
        })
        .collect();
    Ok((assertions, Vec::new()))
}

pub(super) fn span(config: &RunConfig) -> Outcome {
    let max_n = param(config.max_n, SPAN_MAX_N, "max-n", SPAN_MAX_N)?;
    let mut assertions = Vec::new();
    for (variant, name, expected) in [
        (SpanVariant::TailLift, "permutation", (|n: usize| (n - 1) * (n - 1) + 1) as fn(usize) -> usize),
        (SpanVariant::Corner, "corner", |n: usize| n * n),
    ] {
        for n in 1..=max_n {
            let dim = span_dimension(n, variant).expect("within budget");
            assertions.push(Assertion::new(
                format!("{name} span dimension for n = {n}"),
                json!(dim),
                json!(expected(n)),
                dim == expected(n),
            ));
        }
    }
    Ok((assertions, Vec::new()))
}

fn contraction_generic<S: Scalar>(config: &RunConfig) -> Outcome {
    let trials = param(config.trials, 1000, "trials", MAX_TRIALS)?;
    let max_n = param(config.max_n, 8, "max-n", 64)?;
    let seed = seed_for(Suite::Contraction, config);
    let results: Vec<(bool, bool, f64, Value)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let a = random_dss_matrix::<S, _>(&mut rng, max_n);
            let x = random_vector::<S, _>(&mut rng, a.extent() + 3);
            let lhs = a.apply(&x).norm_sq();
            let rhs = x.norm_sq();
            let ratio = if rhs.is_zero() { 0.0 } else { lhs.to_f64() / rhs.to_f64() };
            let input = json!({ "trial": trial, "matrix": a.to_json_value(), "vector": x.to_json_value() });
            (a.classify().is_substochastic(), lhs.le_tol(&rhs), ratio, input)
        })
        .collect();
    let worst_ratio = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let bad_class: Vec<&Value> = results.iter().filter(|r| !r.0).map(|r| &r.3).collect();
    let bad_norm: Vec<&Value> = results.iter().filter(|r| !r.1).map(|r| &r.3).collect();
    let with_counterexample = |a: Assertion, bad: &[&Value]| match bad.first() {
        Some(input) => a.with_detail(json!({ "trials": trials, "counterexample": input })),
        None => a.with_detail(json!({ "trials": trials })),
    };
    Ok((
        vec![
            with_counterexample(
                Assertion::new(
                    "generated matrices classify as doubly substochastic",
                    json!(trials - bad_class.len()),
                    json!(trials),
                    bad_class.is_empty(),
                ),
                &bad_class,
            ),
            with_counterexample(
                Assertion::new("max ||ax||^2 / ||x||^2", json!(worst_ratio), json!(1), bad_norm.is_empty()),
                &bad_norm,
            ),
        ],
        Vec::new(),
    ))
}

pub(super) fn contraction(config: &RunConfig) -> Outcome {
    match config.arithmetic {
        Arithmetic::Exact => contraction_generic::<Rational>(config),
        Arithmetic::Float { .. } => contraction_generic::<f64>(config),
    }
}

struct RoundTrip {
    n: usize,
    reconstructed: bool,
    terms: usize,
    term_bound: usize,
    consistent: bool,
    error: Option<String>,
}

fn round_trip<S: Scalar>(a: &FiniteBlock<S>) -> RoundTrip {
    let n = a.size();
    let m = 2 * n;
    let term_bound = m * m - 2 * m + 2;
    let attempt = || -> Result<RoundTrip, crate::decomposition::DecompositionError> {
        let c = mirsky_decompose(a)?;
        let reconstructed = c.reconstruct(n)?.approx_eq(a) && c.weight_sum().approx_eq(&S::one());
        let terms = bvn_decompose(&mirsky_complete(a)?)?.len();
        let consistent = is_extreme(a)? == (c.len() == 1);
        Ok(RoundTrip {
            n,
            reconstructed,
            terms,
            term_bound,
            consistent,
            error: None,
        })
    };
    attempt().unwrap_or_else(|e| RoundTrip {
        n,
        reconstructed: false,
        terms: 0,
        term_bound,
        consistent: false,
        error: Some(e.to_string()),
    })
}

fn extremality_generic<S: Scalar>(config: &RunConfig) -> Outcome {
    let trials = param(config.trials, 500, "trials", MAX_TRIALS)?;
    let max_n = param(config.max_n, 12, "max-n", 24)?;
    let seed = seed_for(Suite::Extremality, config);
    let results: Vec<(RoundTrip, Value)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let n = rand::Rng::random_range(&mut rng, 1..=max_n);
            let a = random_substochastic::<S, _>(&mut rng, n);
            (round_trip(&a), json!({ "trial": trial, "block": a.to_json_value() }))
        })
        .collect();

    let first_failure = |pred: &dyn Fn(&RoundTrip) -> bool| {
        results
            .iter()
            .find(|(r, _)| !pred(r))
            .map(|(r, input)| json!({ "input": input, "error": r.error }))
    };
    let count = |pred: &dyn Fn(&RoundTrip) -> bool| results.iter().filter(|(r, _)| pred(r)).count();
    let detail = |failure: Option<Value>| match failure {
        Some(f) => json!({ "trials": trials, "counterexample": f }),
        None => json!({ "trials": trials }),
    };

    let rt = |r: &RoundTrip| r.reconstructed;
    let tc = |r: &RoundTrip| r.error.is_none() && r.terms <= r.term_bound;
    let cs = |r: &RoundTrip| r.consistent;
    let worst_slack = results
        .iter()
        .map(|(r, _)| r.term_bound as i64 - r.terms as i64)
        .min()
        .unwrap_or(0);
    let largest = results.iter().map(|(r, _)| r.n).max().unwrap_or(0);

    let mut assertions = vec![
        Assertion::new("decompositions reconstruct the input", json!(count(&rt)), json!(trials), count(&rt) == trials)
            .with_detail(detail(first_failure(&rt))),
        Assertion::new(
            "smallest slack in the term bound m^2 - 2m + 2 on completions",
            json!(worst_slack),
            json!(0),
            count(&tc) == trials,
        )
        .with_detail(json!({ "largest_block": largest, "failures": detail(first_failure(&tc)) })),
        Assertion::new(
            "extreme blocks are exactly those with one term",
            json!(count(&cs)),
            json!(trials),
            count(&cs) == trials,
        )
        .with_detail(detail(first_failure(&cs))),
    ];

    // exhaustive: partial permutations are extreme, midpoints are not
    for n in 1..=3usize {
        let perms = PartialPermutation::all_partial(n);
        let blocks: Vec<FiniteBlock<S>> = perms
            .iter()
            .map(|p| FiniteBlock::permutation(p, n).expect("within block"))
            .collect();
        let extreme = blocks
            .iter()
            .filter(|b| is_extreme(b).unwrap_or(false) && mirsky_decompose(b).map(|c| c.len() == 1).unwrap_or(false))
            .count();
        assertions.push(Assertion::new(
            format!("partial permutation blocks on [1, {n}] that are extreme"),
            json!(extreme),
            json!(perms.len()),
            extreme == perms.len(),
        ));
        let half = S::from_ratio(1, 2);
        let mut midpoints = 0;
        let mut interior = 0;
        for i in 0..perms.len() {
            for j in i + 1..perms.len() {
                let c = ConvexCombination::new(vec![(half.clone(), perms[i].clone()), (half.clone(), perms[j].clone())])
                    .expect("distinct terms");
                let mid = c.reconstruct(n).expect("within block");
                midpoints += 1;
                if !is_extreme(&mid).unwrap_or(true) {
                    interior += 1;
                }
            }
        }
        assertions.push(Assertion::new(
            format!("midpoints of distinct partial permutations on [1, {n}] that are not extreme"),
            json!(interior),
            json!(midpoints),
            interior == midpoints,
        ));
    }
    Ok((assertions, Vec::new()))
}

pub(super) fn extremality(config: &RunConfig) -> Outcome {
    match config.arithmetic {
        Arithmetic::Exact => extremality_generic::<Rational>(config),
        Arithmetic::Float { .. } => extremality_generic::<f64>(config),
    }
}
