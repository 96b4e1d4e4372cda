//! Seeded random instances for the test harness.
//!
//! Generators compose structures that are valid by construction: metrics
//! with distances in [1, 2] (where the triangle inequality is automatic),
//! diameter diversities, cut combinations, and size terms, mixed with
//! nonnegative rational coefficients. Agreeing pairs come from restricting
//! one structure on the union, so agreement is exact. Everything is a pure
//! function of the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cuts::CutWeights;
use crate::diversity::FiniteDiversity;
use crate::metric::FiniteMetric;
use crate::process::{Distribution, FiniteProcess};
use crate::rational::{rat, rat_int, Rat};
use crate::subset::{all_subsets, SubsetMask};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// A rational in `[1, 2]` with a small denominator.
fn unit_band_value(rng: &mut ChaCha8Rng) -> Rat {
    let den = rng.gen_range(1..=6i64);
    let num = rng.gen_range(0..=den);
    rat_int(1) + rat(num, den)
}

/// A metric with all distances in `[1, 2]`; any such table satisfies the
/// triangle inequality outright.
pub fn random_metric(rng: &mut ChaCha8Rng, points: Vec<String>) -> FiniteMetric {
    let n = points.len();
    let mut rows = vec![vec![rat_int(0); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = unit_band_value(rng);
            rows[i][j] = v.clone();
            rows[j][i] = v;
        }
    }
    FiniteMetric::new(points, rows).expect("banded tables are metrics")
}

/// Nonnegative cut weights with small rational values.
pub fn random_cut_weights(rng: &mut ChaCha8Rng, points: Vec<String>, anchor: usize) -> CutWeights {
    let m = points.len() - 1;
    let mut w = CutWeights::zero(points, anchor).expect("anchor in range");
    for side in all_subsets(m).skip(1) {
        if rng.gen_bool(0.7) {
            let den = rng.gen_range(1..=4i64);
            let num = rng.gen_range(0..=3 * den);
            w.set_weight(side, rat(num, den));
        }
    }
    w
}

/// A strict diversity: diameter of a banded metric, plus an optional cut
/// combination and an optional size term, all of which respect the axioms
/// termwise.
pub fn random_diversity(rng: &mut ChaCha8Rng, points: Vec<String>) -> FiniteDiversity {
    let n = points.len();
    let metric = random_metric(rng, points.clone());
    let mut delta = vec![rat_int(0); 1 << n];
    for mask in all_subsets(n) {
        if mask.len() < 2 {
            continue;
        }
        let idx = mask.indices();
        let mut diam = rat_int(0);
        for (a, &i) in idx.iter().enumerate() {
            for &j in idx.iter().skip(a + 1) {
                if *metric.d(i, j) > diam {
                    diam = metric.d(i, j).clone();
                }
            }
        }
        delta[mask.0 as usize] = diam;
    }
    if n >= 2 && rng.gen_bool(0.5) {
        let anchor = rng.gen_range(0..n);
        let cuts = random_cut_weights(rng, points.clone(), anchor);
        for mask in all_subsets(n) {
            if mask.len() >= 2 {
                delta[mask.0 as usize] += cuts.evaluate(mask);
            }
        }
    }
    if rng.gen_bool(0.4) {
        let c = rat(rng.gen_range(1..=2), rng.gen_range(2..=4));
        for mask in all_subsets(n) {
            if mask.len() >= 2 {
                delta[mask.0 as usize] += &c * rat_int(mask.len() as i64 - 1);
            }
        }
    }
    FiniteDiversity::new(points, delta, false).expect("termwise-valid mixture")
}

/// Two diversities on `X u {z1}` and `X u {z2}` agreeing on `X` exactly,
/// obtained by restricting one random diversity on the union.
pub fn random_agreeing_diversity_pair(
    rng: &mut ChaCha8Rng,
    common: usize,
) -> (FiniteDiversity, FiniteDiversity) {
    let mut points = labels("x", common);
    points.push("z1".into());
    points.push("z2".into());
    let big = random_diversity(rng, points);
    let n = common + 2;
    let d1 = big
        .restrict(SubsetMask::full(n).remove(n - 1))
        .expect("nonempty");
    let d2 = big
        .restrict(SubsetMask::full(n).remove(n - 2))
        .expect("nonempty");
    (d1, d2)
}

/// An exact random pmf: positive integer masses, normalized by their total.
pub fn random_distribution(rng: &mut ChaCha8Rng, outcomes: usize) -> Distribution {
    let masses: Vec<i64> = (0..outcomes)
        .map(|_| {
            if rng.gen_bool(0.25) {
                0
            } else {
                rng.gen_range(1..=20)
            }
        })
        .collect();
    let total: i64 = masses.iter().sum();
    if total == 0 {
        let mut probs = vec![rat_int(0); outcomes];
        probs[0] = rat_int(1);
        return Distribution::new(probs).expect("point mass");
    }
    Distribution::new(masses.iter().map(|&m| rat(m, total)).collect()).expect("normalized")
}

/// A process with a dense-ish random joint table.
pub fn random_process(
    rng: &mut ChaCha8Rng,
    index_points: Vec<String>,
    states: Vec<String>,
) -> FiniteProcess {
    let mut len = 1usize;
    for _ in 0..index_points.len() {
        len *= states.len();
    }
    let d = random_distribution(rng, len);
    FiniteProcess::new(index_points, states, d.probs().to_vec(), true)
        .expect("normalized table")
}

/// Two processes on `a u {w}` and `a u {z}` with identical marginals on
/// `a`, obtained by marginalizing one random process on the union.
pub fn random_agreeing_process_pair(
    rng: &mut ChaCha8Rng,
    common: usize,
    num_states: usize,
) -> (FiniteProcess, FiniteProcess) {
    let mut points = labels("t", common);
    points.push("w".into());
    points.push("z".into());
    let big = random_process(rng, points, labels("s", num_states));
    let n = common + 2;
    let p1 = big
        .marginal(SubsetMask::full(n).remove(n - 1))
        .expect("nonempty");
    let p2 = big
        .marginal(SubsetMask::full(n).remove(n - 2))
        .expect("nonempty");
    (p1, p2)
}
