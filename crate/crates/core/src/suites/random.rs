//! Seeded random inputs for the verification suites.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{ConvexCombination, FiniteBlock};
use crate::matrices::{CoeffMatrix, FinVector, PartialPermutation, Tail};
use crate::scalar::Scalar;

/// FNV-1a, used to give every suite its own stream.
fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Seed of a suite's stream: the run seed mixed with the suite name.
pub fn suite_seed(suite: &str, seed: u64) -> u64 {
    fnv1a(suite) ^ seed
}

/// Independent generator for one trial of a suite.
pub fn trial_rng(suite_seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(suite_seed);
    rng.set_stream(trial as u64);
    rng
}

/// A uniformly random permutation of `[1, n]`.
pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> PartialPermutation {
    let mut images: Vec<usize> = (1..=n).collect();
    images.shuffle(rng);
    PartialPermutation::from_images(&images).expect("shuffled identity is a permutation")
}

/// A random partial permutation of `[1, n]` with domain of random size.
pub fn random_partial<R: Rng>(rng: &mut R, n: usize) -> PartialPermutation {
    let size = rng.random_range(0..=n);
    let mut sources: Vec<usize> = (1..=n).collect();
    let mut targets: Vec<usize> = (1..=n).collect();
    sources.shuffle(rng);
    targets.shuffle(rng);
    PartialPermutation::from_pairs(sources.into_iter().zip(targets).take(size)).expect("distinct targets")
}

/// `count` random positive weights summing to one.
pub fn random_weights<S: Scalar, R: Rng>(rng: &mut R, count: usize) -> Vec<S> {
    let raw: Vec<i64> = (0..count).map(|_| rng.random_range(1..=100)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| S::from_ratio(w, total)).collect()
}

/// A random nonnegative block whose rows, then columns, are rescaled to
/// sum to at most one. Scaling a column down never raises a row sum, so two
/// passes suffice. Occasionally returns a partial permutation block or a
/// convex combination of permutations instead.
pub fn random_substochastic<S: Scalar, R: Rng>(rng: &mut R, n: usize) -> FiniteBlock<S> {
    match rng.random_range(0..10) {
        0 => return FiniteBlock::permutation(&random_partial(rng, n), n).expect("within block"),
        1 => {
            let p = rng.random_range(1..=3);
            let terms: Vec<_> = random_weights::<S, R>(rng, p)
                .into_iter()
                .map(|w| (w, random_permutation(rng, n)))
                .collect();
            let combination = ConvexCombination::from_terms_merging(terms);
            return combination.reconstruct(n).expect("within block");
        }
        _ => {}
    }
    let density = rng.random_range(0.2..=1.0);
    let mut rows: Vec<Vec<S>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.random_bool(density) {
                        S::from_ratio(rng.random_range(1..=20), 1)
                    } else {
                        S::zero()
                    }
                })
                .collect()
        })
        .collect();
    let slack = |rng: &mut R| S::from_ratio(rng.random_range(0..=3), 4);
    for row in rows.iter_mut() {
        let sum = row.iter().fold(S::zero(), |acc, v| acc + v);
        if sum > S::one() {
            // leave some rows strictly substochastic
            let target = S::one() - slack(rng) * &S::from_ratio(1, 2);
            for v in row.iter_mut() {
                *v = v.clone() * &target / &sum;
            }
        }
    }
    for k in 0..n {
        let sum = rows.iter().fold(S::zero(), |acc, r| acc + &r[k]);
        if sum > S::one() {
            for r in rows.iter_mut() {
                r[k] = r[k].clone() / &sum;
            }
        }
    }
    FiniteBlock::from_rows(rows).expect("nonnegative square block")
}

/// A random doubly substochastic matrix: a random block, sometimes
/// continued by an identity tail.
pub fn random_dss_matrix<S: Scalar, R: Rng>(rng: &mut R, max_n: usize) -> CoeffMatrix<S> {
    let n = rng.random_range(1..=max_n);
    let block = random_substochastic::<S, R>(rng, n);
    let tail = if rng.random_bool(0.5) {
        Tail::Identity { start: n + 1 }
    } else {
        Tail::Zero
    };
    CoeffMatrix::new(tail, block.entries().map(|(m, k, v)| (m, k, v.clone()))).expect("block below the tail")
}

/// A random vector with support in `[1, max_index]` and small rational
/// coordinates of both signs.
pub fn random_vector<S: Scalar, R: Rng>(rng: &mut R, max_index: usize) -> FinVector<S> {
    let mut coords: Vec<(usize, S)> = Vec::new();
    for k in 1..=max_index {
        if rng.random_bool(0.7) {
            coords.push((k, S::from_ratio(rng.random_range(-10..=10), rng.random_range(1..=10))));
        }
    }
    FinVector::from_coords(coords).expect("positive indices")
}

/// `p` distinct random finitary permutations with random weights, mixing
/// global shuffles of `[1, dim]`, block-preserving shuffles and shuffles
/// concentrated around `focus`.
pub fn random_isbell_combination<S: Scalar, R: Rng>(
    rng: &mut R,
    p: usize,
    blocks: usize,
    focus: std::ops::RangeInclusive<usize>,
) -> ConvexCombination<S> {
    let dim = blocks * (blocks + 1) / 2;
    let mut perms: Vec<PartialPermutation> = Vec::with_capacity(p);
    while perms.len() < p {
        let candidate = match rng.random_range(0..3) {
            0 => random_permutation(rng, dim + focus.clone().count()),
            1 => {
                let mut pairs = Vec::with_capacity(dim);
                for j in 1..=blocks {
                    let offset = j * (j - 1) / 2;
                    let mut images: Vec<usize> = (offset + 1..=offset + j).collect();
                    images.shuffle(rng);
                    pairs.extend((offset + 1..=offset + j).zip(images));
                }
                PartialPermutation::from_pairs(pairs).expect("block shuffle")
            }
            _ => {
                let width = focus.clone().count();
                let mut points: Vec<usize> = focus.clone().collect();
                let outside: Vec<usize> = (1..=dim + width).filter(|k| !focus.contains(k)).collect();
                points.extend(outside.choose_multiple(rng, width.min(outside.len())).copied());
                let mut images = points.clone();
                images.shuffle(rng);
                PartialPermutation::from_pairs(points.into_iter().zip(images)).expect("local shuffle")
            }
        }
        .without_fixed_points();
        if !perms.contains(&candidate) {
            perms.push(candidate);
        }
    }
    let weights = random_weights::<S, R>(rng, p);
    ConvexCombination::new(weights.into_iter().zip(perms).collect()).expect("distinct terms with unit weight")
}
