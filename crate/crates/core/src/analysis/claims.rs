//! Checks on the radius distribution and on the compression map.

use serde::Serialize;

use crate::partition::{f_cdf, sample_preimage, IntervalSet, PartitionParams};
use crate::rng::{self, Rng};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FClaimsReport {
    pub beta: f64,
    pub q: f64,
    /// `1 - F(R/2 - 2 R0)`.
    pub tail: f64,
    /// `(e^2 - 1) beta^(q+1) / (1 - beta^(q+1))`.
    pub tail_closed_form: f64,
    pub identity_residual: f64,
    pub pairs_checked: usize,
    pub violations: usize,
    /// Largest `lhs - rhs` seen over the checked pairs.
    pub max_excess: f64,
}

impl FClaimsReport {
    pub fn passed(&self, identity_tol: f64) -> bool {
        self.identity_residual <= identity_tol && self.violations == 0
    }
}

/// `1 - F(x)` without cancellation.
fn f_tail(x: f64, p: &PartitionParams) -> f64 {
    let top = (-p.big_r / (2.0 * p.r0)).exp();
    ((-x / p.r0).exp() - top) / (1.0 - top)
}

/// Tail identity at `R/2 - 2R0`, and the increment bound
/// `F(x2) - F(x1) <= D (x2 - x1)/R (1 - F(x1) + 2 beta^(q+1))` over ordered
/// pairs of a uniform grid on `[0, R/2]`.
///
/// With `max_pairs`, that many pairs are drawn uniformly (seeded) instead of
/// sweeping all of them.
pub fn check_f_claims(
    params: &PartitionParams,
    grid_points: usize,
    max_pairs: Option<usize>,
    seed: u64,
) -> FClaimsReport {
    let b = params.beta.powf(params.q + 1.0);
    let tail = f_tail(params.big_r / 2.0 - 2.0 * params.r0, params);
    let closed = (std::f64::consts::E.powi(2) - 1.0) * b / (1.0 - b);

    let g = grid_points.max(2);
    let h = params.big_r / 2.0 / (g - 1) as f64;
    let grid: Vec<f64> = (0..g).map(|i| i as f64 * h).collect();
    let fv: Vec<f64> = grid.iter().map(|&x| f_cdf(x, params)).collect();
    let tv: Vec<f64> = grid.iter().map(|&x| f_tail(x, params)).collect();
    let slope = params.d_beta / params.big_r;

    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut check = |i: usize, j: usize| {
        let lhs = fv[j] - fv[i];
        let rhs = slope * (grid[j] - grid[i]) * (tv[i] + 2.0 * b);
        let excess = lhs - rhs;
        if excess > max_excess {
            max_excess = excess;
        }
        if excess > 1e-12 {
            violations += 1;
        }
    };
    let total = g * (g + 1) / 2;
    let pairs_checked = match max_pairs {
        Some(m) if m < total => {
            let mut r = rng::seeded(seed);
            for _ in 0..m {
                let (a, c) = (rng::index(&mut r, g), rng::index(&mut r, g));
                check(a.min(c), a.max(c));
            }
            m
        }
        _ => {
            for i in 0..g {
                for j in i..g {
                    check(i, j);
                }
            }
            total
        }
    };
    FClaimsReport {
        beta: params.beta,
        q: params.q,
        tail,
        tail_closed_form: closed,
        identity_residual: (tail - closed).abs(),
        pairs_checked,
        violations,
        max_excess,
    }
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical law of
/// `samples` and `cdf`. Sorts `samples` in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingLawReport {
    pub beta: f64,
    pub draws: usize,
    pub ks: f64,
}

/// KS distance between `draws` pre-image radii and their target CDF.
pub fn check_sampling_law(params: &PartitionParams, draws: usize, seed: u64) -> SamplingLawReport {
    let mut r = rng::seeded(seed);
    let mut xs: Vec<f64> = (0..draws).map(|_| sample_preimage(params, &mut r)).collect();
    SamplingLawReport {
        beta: params.beta,
        draws,
        ks: ks_statistic(&mut xs, |x| f_cdf(x, params)),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PiReport {
    pub samples: usize,
    pub lipschitz_violations: usize,
    pub monotone_violations: usize,
    pub right_inverse_max_residual: f64,
    pub right_inverse_violations: usize,
    /// Off-endpoint `y` whose preimage is not in `S`.
    pub membership_violations: usize,
    /// `y1 < y2` with `pi_inv(y1) >= pi_inv(y2)`.
    pub inverse_order_violations: usize,
}

impl PiReport {
    pub fn passed(&self) -> bool {
        self.lipschitz_violations == 0
            && self.monotone_violations == 0
            && self.right_inverse_violations == 0
            && self.membership_violations == 0
            && self.inverse_order_violations == 0
    }

    pub fn merge(&mut self, other: &PiReport) {
        self.samples += other.samples;
        self.lipschitz_violations += other.lipschitz_violations;
        self.monotone_violations += other.monotone_violations;
        self.right_inverse_max_residual = self.right_inverse_max_residual.max(other.right_inverse_max_residual);
        self.right_inverse_violations += other.right_inverse_violations;
        self.membership_violations += other.membership_violations;
        self.inverse_order_violations += other.inverse_order_violations;
    }
}

/// Random checks of the compression map of `s` on `[0, domain_hi]`:
/// 1-Lipschitz, non-decreasing, right inverse within `1e-12`, preimages in `S`
/// away from interval-image endpoints, strictly increasing inverse.
pub fn check_pi_properties(s: &IntervalSet, samples: usize, domain_hi: f64, rng: &mut Rng) -> PiReport {
    let mut rep = PiReport {
        samples,
        ..PiReport::default()
    };
    let mu = s.measure();
    let mut endpoints = vec![0.0];
    let mut acc = 0.0;
    for &(a, b) in s.intervals() {
        acc += b - a;
        endpoints.push(acc);
    }
    for _ in 0..samples {
        let x1 = rng::uniform(rng, 0.0, domain_hi);
        let x2 = rng::uniform(rng, 0.0, domain_hi);
        let (lo, hi) = (x1.min(x2), x1.max(x2));
        let (p_lo, p_hi) = (s.pi(lo), s.pi(hi));
        if p_hi - p_lo > hi - lo + 1e-12 {
            rep.lipschitz_violations += 1;
        }
        if p_lo > p_hi {
            rep.monotone_violations += 1;
        }
        if mu <= 0.0 {
            continue;
        }
        let y1 = rng::uniform(rng, 0.0, mu);
        let y2 = rng::uniform(rng, 0.0, mu);
        for &y in &[y1, y2] {
            let t = s.pi_inv(y).expect("y within [0, mu]");
            let res = (s.pi(t) - y).abs();
            rep.right_inverse_max_residual = rep.right_inverse_max_residual.max(res);
            if res > 1e-12 {
                rep.right_inverse_violations += 1;
            }
            if !endpoints.contains(&y) && !s.contains(t) {
                rep.membership_violations += 1;
            }
        }
        let (ya, yb) = (y1.min(y2), y1.max(y2));
        if yb - ya > 1e-12 && s.pi_inv(ya).unwrap() >= s.pi_inv(yb).unwrap() {
            rep.inverse_order_violations += 1;
        }
    }
    rep
}
