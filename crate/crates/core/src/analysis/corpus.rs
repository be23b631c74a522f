//! Seeded inputs for the verifiers.

use crate::error::Result;
use crate::matrix::SquareMatrix;
use crate::partition::{IntervalSet, Metric};
use crate::rng::{self, Rng};

/// `n` uniform points in the unit square, distances truncated at 1.
pub fn euclidean_metric(n: usize, seed: u64) -> Result<Metric> {
    let mut r = rng::seeded(seed);
    let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng::uniform01(&mut r), rng::uniform01(&mut r)]).collect();
    let d = SquareMatrix::from_fn(n, |u, v| {
        let (a, b) = (pts[u], pts[v]);
        (a[0] - b[0]).hypot(a[1] - b[1]).min(1.0)
    });
    Metric::new(d)
}

/// `count` metrics from [`euclidean_metric`], metric `i` seeded with `seed + i`.
pub fn metric_corpus(count: usize, n: usize, seed: u64) -> Result<Vec<Metric>> {
    (0..count)
        .map(|i| euclidean_metric(n, rng::trial_seed(seed, i as u64)))
        .collect()
}

/// Points `i * spacing` on a line for `i < sites`, each with a twin at
/// `i * spacing + offset`.
pub fn twin_lattice(sites: usize, spacing: f64, offset: f64) -> Result<Metric> {
    let xs: Vec<f64> = (0..sites)
        .flat_map(|i| {
            let x = i as f64 * spacing;
            [x, x + offset]
        })
        .collect();
    Metric::from_line(&xs)
}

/// Between 1 and `max_intervals` disjoint intervals inside `[lo, hi]`, from
/// sorted uniform endpoints.
pub fn random_interval_set(rng: &mut Rng, max_intervals: usize, lo: f64, hi: f64) -> IntervalSet {
    let k = 1 + rng::index(rng, max_intervals);
    let mut ends: Vec<f64> = (0..2 * k).map(|_| rng::uniform(rng, lo, hi)).collect();
    ends.sort_by(f64::total_cmp);
    let pieces = ends.chunks(2).map(|c| (c[0], c[1])).collect();
    let closed = rng::uniform01(rng) < 0.5;
    IntervalSet::new(pieces, closed).expect("sorted endpoints give disjoint intervals")
}
