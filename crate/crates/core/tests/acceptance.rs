//! Acceptance criteria, run as a plain binary so that every criterion
//! prints exactly one PASS/FAIL line.

mod support;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};

use blab_core::decomposition::{bvn_decompose, is_extreme, mirsky_complete, mirsky_decompose, FiniteBlock};
use blab_core::lab::{
    commutant_dimension, exposed_verify, isbell_bound, isbell_gap, span_dimension, strong_not_strongstar_sweep,
    weak_null_sweep, IsbellMatrix, SpanVariant, Verdict, WitnessKind,
};
use blab_core::matrices::{FinVector, PartialPermutation, Tail};
use blab_core::suites::random::{
    random_dss_matrix, random_isbell_combination, random_substochastic, random_vector, suite_seed, trial_rng,
};
use blab_core::suites::{run_suite, OutputFormat, RunConfig, Suite};
use blab_core::{Rational, Scalar};

use support::{partial_permutation_count, partial_permutation_patterns, substochastic_vertices};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(limit_secs), || {
        format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

fn isbell_bound_holds() -> Check {
    const BLOCKS: usize = 25;
    const TRIALS: usize = 100;
    let a = IsbellMatrix::<Rational>::new(BLOCKS);
    let seed = suite_seed("acceptance-isbell", 0);
    let cases: Vec<(usize, usize)> = [4, 9, 16, 25]
        .into_iter()
        .flat_map(|n| (1..=3).filter(move |p| p * p < n).map(move |p| (n, p)))
        .collect();

    let start = Instant::now();
    let mut results = Vec::new();
    for &(n, p) in &cases {
        for trial in 0..TRIALS {
            let mut rng = trial_rng(seed ^ ((n as u64) << 32) ^ ((p as u64) << 48), trial);
            let b = random_isbell_combination::<Rational, _>(&mut rng, p, BLOCKS, IsbellMatrix::<Rational>::block_range(n));
            let gap = isbell_gap(&a, &b, n).map_err(|e| format!("n={n} p={p} trial {trial}: {e}"))?;
            results.push((n, p, trial, b, gap));
        }
    }
    let elapsed = start.elapsed();

    let mut min_slack = f64::INFINITY;
    let mut far = 0;
    let mut short_on_block = 0;
    for (n, p, trial, b, gap) in &results {
        let bound = isbell_bound::<Rational>(*n, *p).to_f64();
        ensure(gap.gap >= bound - 1e-9, || {
            format!("n={n} p={p} trial {trial}: gap {} < bound {bound}; b = {b}", gap.gap)
        })?;
        let terms: Vec<(f64, BTreeMap<usize, usize>)> =
            b.terms().iter().map(|(w, rho)| (w.to_f64(), rho.pairs().collect())).collect();
        let x: Vec<(usize, f64)> = gap.witness.iter().map(|(k, v)| (k, *v)).collect();
        let norm: f64 = x.iter().map(|(_, v)| v * v).sum();
        ensure((norm - 1.0).abs() < 1e-9, || format!("n={n} p={p} trial {trial}: witness norm² {norm}"))?;
        let recomputed = support::isbell_gap_oracle(&terms, &x);
        ensure((recomputed - gap.gap).abs() < 1e-9, || {
            format!("n={n} p={p} trial {trial}: reported gap {} but witness gives {recomputed}", gap.gap)
        })?;
        min_slack = min_slack.min(gap.gap - bound);
        if matches!(gap.kind, WitnessKind::FarBlock { .. }) {
            far += 1;
        }
        if gap.block_gap < bound {
            short_on_block += 1;
        }
    }
    within(elapsed, 10)?;
    Ok(format!(
        "{} cases x {TRIALS} trials, min slack {min_slack:.3e}, witnesses recomputed independently; \
         {short_on_block} trials needed a witness outside block n ({far} far-block); {:.2}s",
        cases.len(),
        elapsed.as_secs_f64()
    ))
}

fn round_trip() -> Check {
    const TRIALS: usize = 500;
    let seed = suite_seed("acceptance-round-trip", 0);
    let start = Instant::now();
    let mut max_terms_ratio: f64 = 0.0;
    for trial in 0..TRIALS {
        let mut rng = trial_rng(seed, trial);
        let n = rand::Rng::random_range(&mut rng, 1..=12);
        let a = random_substochastic::<Rational, _>(&mut rng, n);
        let c = mirsky_decompose(&a).map_err(|e| format!("trial {trial}: {e}"))?;
        // independent reconstruction
        let mut rebuilt = vec![vec![Rational::zero(); n]; n];
        let mut total = Rational::zero();
        for (w, p) in c.terms() {
            ensure(*w > Rational::zero(), || format!("trial {trial}: weight {w}"))?;
            total += w;
            for (k, t) in p.pairs() {
                ensure(k <= n && t <= n, || format!("trial {trial}: {p} leaves [1, {n}]"))?;
                rebuilt[t - 1][k - 1] += w;
            }
        }
        ensure(total.is_one(), || format!("trial {trial}: weights sum to {total}"))?;
        ensure(rebuilt == a.rows(), || format!("trial {trial}: reconstruction differs for {a:?}"))?;

        let completion = mirsky_complete(&a).map_err(|e| e.to_string())?;
        let bvn = bvn_decompose(&completion).map_err(|e| format!("trial {trial}: {e}"))?;
        let m = 2 * n;
        let limit = m * m - 2 * m + 2;
        ensure(bvn.len() <= limit, || format!("trial {trial}: {} terms > {limit}", bvn.len()))?;
        ensure(bvn.terms().iter().all(|(_, p)| p.is_total_on(m)), || {
            format!("trial {trial}: non-total term on the completion")
        })?;
        max_terms_ratio = max_terms_ratio.max(bvn.len() as f64 / limit as f64);
    }
    let elapsed = start.elapsed();
    within(elapsed, 30)?;
    Ok(format!(
        "{TRIALS} blocks (n <= 12) reconstructed exactly, max terms/bound {max_terms_ratio:.2}; {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn contraction() -> Check {
    const TRIALS: usize = 1000;
    let seed = suite_seed("acceptance-contraction", 0);
    let mut tails = 0;
    for trial in 0..TRIALS {
        let mut rng = trial_rng(seed, trial);
        let a = random_dss_matrix::<Rational, _>(&mut rng, 8);
        let x = random_vector::<Rational, _>(&mut rng, a.extent() + 3);
        ensure(a.classify().is_substochastic(), || format!("trial {trial}: {:?}", a.classify()))?;
        // independent product, tail included
        let mut ax: BTreeMap<usize, Rational> = BTreeMap::new();
        for (m, k, v) in a.entries() {
            let xk = x.get(k);
            *ax.entry(m).or_insert_with(Rational::zero) += v * &xk;
        }
        if let Tail::Identity { start } = a.tail() {
            tails += 1;
            for (k, xk) in x.iter().filter(|(k, _)| *k >= start) {
                *ax.entry(k).or_insert_with(Rational::zero) += xk;
            }
        }
        let lhs = ax.values().fold(Rational::zero(), |acc, v| acc + v * v);
        let rhs = x.iter().fold(Rational::zero(), |acc, (_, v)| acc + v * v);
        ensure(lhs <= rhs, || format!("trial {trial}: ||ax||² = {lhs} > ||x||² = {rhs}"))?;
        ensure(a.apply(&x).norm_sq() == lhs, || format!("trial {trial}: apply disagrees with the oracle"))?;
    }
    Ok(format!("{TRIALS} exact pairs, {tails} with identity tails"))
}

fn extreme_points() -> Check {
    let mut counts = Vec::new();
    for n in 1..=3 {
        let vertices = substochastic_vertices(n);
        let patterns = partial_permutation_patterns(n);
        ensure(vertices == patterns, || format!("n={n}: vertex set differs from partial permutations"))?;
        ensure(vertices.len() == partial_permutation_count(n), || {
            format!("n={n}: {} vertices, expected {}", vertices.len(), partial_permutation_count(n))
        })?;
        ensure(PartialPermutation::all_partial(n).len() == vertices.len(), || {
            format!("n={n}: enumeration count differs")
        })?;
        for v in &vertices {
            let block = FiniteBlock::from_rows(v.chunks(n).map(<[Rational]>::to_vec).collect())
                .map_err(|e| e.to_string())?;
            ensure(is_extreme(&block).map_err(|e| e.to_string())?, || format!("n={n}: vertex {v:?} not extreme"))?;
            let c = mirsky_decompose(&block).map_err(|e| e.to_string())?;
            ensure(c.len() == 1, || format!("n={n}: vertex {v:?} decomposes into {} terms", c.len()))?;
        }
        counts.push(vertices.len());
    }
    ensure(counts == [2, 7, 34], || format!("counts {counts:?}"))?;
    Ok(format!("vertex counts {counts:?} match partial permutations; all extreme"))
}

fn topology_witnesses() -> Check {
    let tol = 1e-9;
    let x = FinVector::geometric(1..=20);
    let (strong, adjoint) = strong_not_strongstar_sweep(&x, 50, tol);
    let tail = strong.samples.iter().filter(|(n, _)| *n > 20).map(|(_, v)| *v).fold(0.0, f64::max);
    ensure(tail < 1e-3, || format!("strong samples beyond 20 reach {tail}"))?;
    ensure(adjoint.values().all(|v| (v - 1.0).abs() < 1e-12), || "adjoint samples not constant 1".into())?;
    ensure(strong.verdict == Verdict::ConvergesToZero, || format!("strong verdict {}", strong.verdict))?;
    ensure(adjoint.verdict == Verdict::BoundedAway(1.0), || format!("adjoint verdict {}", adjoint.verdict))?;

    let e1 = FinVector::<Rational>::basis(1);
    let e2 = FinVector::<Rational>::basis(2);
    for (label, report, support) in [
        ("e1,e1", weak_null_sweep(&e1, &e1, 50, tol), 1),
        ("e1,e2", weak_null_sweep(&e1, &e2, 50, tol), 2),
        ("x,x", weak_null_sweep(&x, &x, 50, tol), 20),
    ] {
        ensure(
            report.samples.iter().filter(|(n, _)| *n >= support).all(|(_, v)| *v == 0.0),
            || format!("weak sweep {label} not exactly zero beyond {support}"),
        )?;
        ensure(report.verdict == Verdict::ConvergesToZero, || format!("weak sweep {label}: {}", report.verdict))?;
    }
    Ok(format!("strong tail max {tail:.1e}, adjoint constant 1, weak sweeps exactly zero beyond support"))
}

fn commutant() -> Check {
    let start = Instant::now();
    let dims: Vec<usize> = (1..=8).map(|m| commutant_dimension(m).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    let elapsed = start.elapsed();
    ensure(dims == [1, 2, 2, 2, 2, 2, 2, 2], || format!("dimensions {dims:?}"))?;
    within(elapsed, 5)?;
    Ok(format!("dimensions {dims:?}; {:.2}s", elapsed.as_secs_f64()))
}

fn spans() -> Check {
    let mut lifts = Vec::new();
    let mut corners = Vec::new();
    for n in 1..=6 {
        let lift = span_dimension(n, SpanVariant::TailLift).map_err(|e| e.to_string())?;
        let corner = span_dimension(n, SpanVariant::Corner).map_err(|e| e.to_string())?;
        ensure(lift == (n - 1) * (n - 1) + 1, || format!("n={n}: permutation span {lift}"))?;
        ensure(corner == n * n, || format!("n={n}: corner span {corner}"))?;
        lifts.push(lift);
        corners.push(corner);
    }
    Ok(format!("permutation spans {lifts:?}, corner spans {corners:?}"))
}

fn exposed_points() -> Check {
    let start = Instant::now();
    let mut checked = 0;
    for n in 1..=4 {
        for u in PartialPermutation::all_partial(n) {
            ensure(exposed_verify(&u, n).map_err(|e| e.to_string())?, || format!("n={n}: {u} is not the unique maximizer"))?;
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, 60)?;
    Ok(format!("{checked} partial permutations (n <= 4) uniquely maximize their functional; {:.2}s", elapsed.as_secs_f64()))
}

fn determinism() -> Check {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    for suite in Suite::ALL {
        for output in [OutputFormat::Json, OutputFormat::Csv] {
            let config = RunConfig { output, ..RunConfig::default() };
            let first = run_suite(suite, &config).map_err(|e| e.to_string())?.render(output);
            let second = run_suite(suite, &config).map_err(|e| e.to_string())?.render(output);
            let serial = single
                .install(|| run_suite(suite, &config))
                .map_err(|e| e.to_string())?
                .render(output);
            ensure(first == second && first == serial, || format!("{suite} ({output:?}) differs between runs"))?;
        }
    }
    Ok(format!("{} suites byte-identical across repeated and single-threaded runs", Suite::ALL.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("isbell bound", isbell_bound_holds),
        ("decomposition round trip", round_trip),
        ("contraction", contraction),
        ("extreme points", extreme_points),
        ("topology witnesses", topology_witnesses),
        ("commutant dimensions", commutant),
        ("span dimensions", spans),
        ("exposed points", exposed_points),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {}. {name}: {reason}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
