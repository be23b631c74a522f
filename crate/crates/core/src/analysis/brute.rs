//! Exhaustive search over set partitions.

use crate::error::{Error, Result};
use crate::instance::{Clustering, Instance};
use crate::norm::NormOrder;

pub const DEFAULT_MAX_N: usize = 10;
pub const HARD_MAX_N: usize = 12;

/// Bell number `B(n)` (number of set partitions of an `n`-set).
pub fn bell(n: usize) -> u128 {
    let mut row: Vec<u128> = vec![1];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().expect("nonempty"));
        for &v in &row {
            let last = *next.last().expect("nonempty");
            next.push(last.saturating_add(v));
        }
        row = next;
    }
    row[0]
}

/// Minimum `||dis||_p` over every clustering of `inst`, with the witness whose
/// restricted-growth string is lexicographically smallest among optima.
///
/// Partial assignments are pruned once the disagreement norm of the edges
/// already decided reaches the incumbent.
pub fn brute_force_opt(inst: &Instance, p: NormOrder, max_n: usize) -> Result<(f64, Clustering)> {
    let n = inst.n();
    let cap = max_n.min(HARD_MAX_N);
    if n > cap {
        return Err(Error::TooLarge {
            n,
            max_n: cap,
            bell: bell(n),
        });
    }
    if n == 0 {
        return Ok((0.0, Clustering::single(0)));
    }
    let mut search = Search {
        inst,
        p,
        n,
        labels: vec![0; n],
        dis: vec![0.0; n],
        best: f64::INFINITY,
        best_labels: Vec::new(),
    };
    search.go(1, 1);
    Ok((search.best, Clustering::from_labels(search.best_labels)?))
}

struct Search<'a> {
    inst: &'a Instance,
    p: NormOrder,
    n: usize,
    labels: Vec<usize>,
    dis: Vec<f64>,
    best: f64,
    best_labels: Vec<usize>,
}

impl Search<'_> {
    fn go(&mut self, i: usize, used: usize) {
        if self.p.norm(&self.dis) >= self.best {
            return;
        }
        if i == self.n {
            self.best = self.p.norm(&self.dis);
            self.best_labels = self.labels.clone();
            return;
        }
        for l in 0..=used {
            self.labels[i] = l;
            let saved = self.dis.clone();
            for j in 0..i {
                if self.inst.is_positive(i, j) != (self.labels[j] == l) {
                    let w = self.inst.weight(i, j);
                    self.dis[i] += w;
                    self.dis[j] += w;
                }
            }
            self.go(i + 1, used.max(l + 1));
            self.dis = saved;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::disagreement::disagreement_vector;
    use crate::instance::{gen_gap, gen_random, RandomSpec, Sign};

    #[test]
    fn bell_values() {
        let known = [1u128, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597];
        for (n, &b) in known.iter().enumerate() {
            assert_eq!(bell(n), b);
        }
    }

    #[test]
    fn gap_quarter_optima() {
        // hand enumeration of the five partitions of three vertices
        let g = gen_gap(0.25).unwrap();
        assert_eq!(brute_force_opt(&g, NormOrder::Infinity, 10).unwrap().0, 1.0);
        assert_eq!(brute_force_opt(&g, NormOrder::ONE, 10).unwrap().0, 2.0);
        assert!((brute_force_opt(&g, NormOrder::TWO, 10).unwrap().0 - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn planted_noiseless_is_zero() {
        let spec = RandomSpec {
            n: 8,
            alpha: 0.25,
            planted_k: 3,
            flip_prob: 0.0,
            seed: 11,
        };
        let (g, planted) = gen_random(spec).unwrap();
        let (v, c) = brute_force_opt(&g, NormOrder::ONE, 10).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(c, planted);
    }

    #[test]
    fn all_positive_single_cluster() {
        let g = Instance::from_fn(3, 1.0, 1.0, |_, _| (Sign::Positive, 1.0)).unwrap();
        let (v, c) = brute_force_opt(&g, NormOrder::TWO, 10).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(c.num_clusters(), 1);
    }

    #[test]
    fn refuses_large_n() {
        let g = Instance::from_fn(13, 1.0, 1.0, |_, _| (Sign::Positive, 1.0)).unwrap();
        match brute_force_opt(&g, NormOrder::ONE, 20) {
            Err(Error::TooLarge { bell: b, max_n, .. }) => {
                assert_eq!(max_n, HARD_MAX_N);
                assert_eq!(b, 27644437);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn matches_naive_enumeration() {
        let spec = RandomSpec {
            n: 6,
            alpha: 0.25,
            planted_k: 2,
            flip_prob: 0.3,
            seed: 5,
        };
        let (g, _) = gen_random(spec).unwrap();
        // naive: every label vector in 0..n^n, canonicalised
        let n = g.n();
        let mut best = f64::INFINITY;
        let mut code = vec![0usize; n];
        loop {
            let c = Clustering::canonical(&code);
            let d = disagreement_vector(&g, &c).unwrap();
            best = best.min(NormOrder::TWO.norm(&d));
            let mut i = 0;
            while i < n {
                code[i] += 1;
                if code[i] < n {
                    break;
                }
                code[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        let (v, c) = brute_force_opt(&g, NormOrder::TWO, 10).unwrap();
        assert!((v - best).abs() < 1e-12);
        assert!((NormOrder::TWO.norm(&disagreement_vector(&g, &c).unwrap()) - v).abs() < 1e-12);
    }
}
