//! Monte Carlo verification of the decomposition guarantees.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::phi::check_phi_bound;
use crate::error::Error;
use crate::partition::{
    cluster_select, partition_metric_observed, shell_violations, Metric, MetricView, Mode, PartitionParams, Selection,
};
use crate::rng;

/// Confidence parameter of the Hoeffding slack.
pub const DELTA: f64 = 0.01;

/// Trials per deterministic work block.
const BLOCK: usize = 64;

/// At most this many error messages are kept.
const MAX_ERRORS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionCheck {
    pub trials: usize,
    pub diameter_ok: bool,
    pub max_diameter: f64,
    pub clusters_checked: usize,
    /// Single clusters: selections failing the shell inequality. Partitions:
    /// `(trial, u)` pairs failing the whole-partition version.
    pub point_shell_violations: usize,
    /// Selections (inside partitions) failing the shell inequality.
    pub cluster_shell_violations: usize,
    pub heavy_calls: usize,
    pub light_calls: usize,
    pub clamped_draws: usize,
    pub mu_s_min: Option<f64>,
    /// Strict mode: light balls with `mu(S) < R/2`.
    pub strict_mu_violations: usize,
    pub size_checks: usize,
    pub size_violations: usize,
    /// Largest `|P| / (2 D Y_P)` seen.
    pub size_max_ratio: f64,
    /// Mean over trials of the average `Y_P(u)` (single clusters only).
    pub y_p_mean: Option<f64>,
    pub phi_checks: usize,
    pub phi_failures: usize,
    pub phi_skipped: usize,
    pub epsilon: f64,
    /// `max_u LHS_u / RHS_u` of the separation-probability bound.
    pub sep_ratio: f64,
    pub sep_argmax: Option<usize>,
    /// Points with positive LHS but zero RHS.
    pub sep_flagged: usize,
    /// The same ratio with `epsilon = 0`, for diagnostics.
    pub sep_raw_ratio: f64,
    pub errors: Vec<String>,
}

impl DecompositionCheck {
    /// The properties that must hold on every sample.
    pub fn always_ok(&self) -> bool {
        self.diameter_ok
            && self.point_shell_violations == 0
            && self.cluster_shell_violations == 0
            && self.strict_mu_violations == 0
            && self.size_violations == 0
            && self.phi_failures == 0
            && self.errors.is_empty()
    }
}

/// Hoeffding slack for `pairs` simultaneous frequencies at confidence `1 - DELTA`.
pub fn hoeffding_epsilon(n: usize, trials: usize) -> f64 {
    let pairs = 2.0 * (n as f64).powi(2);
    ((pairs / DELTA).ln() / (2.0 * trials as f64)).sqrt()
}

#[derive(Clone)]
struct Agg {
    n: usize,
    trials: usize,
    clusters: usize,
    max_diam: f64,
    diam_bad: usize,
    point_shell: usize,
    shell: usize,
    heavy: usize,
    light: usize,
    clamped: usize,
    mu_min: f64,
    strict_mu: usize,
    size_checks: usize,
    size_bad: usize,
    size_max: f64,
    phi_checks: usize,
    phi_fail: usize,
    phi_skip: usize,
    errors: Vec<String>,
    sep: Vec<u32>,
    touch: Vec<u32>,
    ysum: Vec<f64>,
    y_mean_sum: f64,
}

impl Agg {
    fn new(n: usize) -> Self {
        Agg {
            n,
            trials: 0,
            clusters: 0,
            max_diam: 0.0,
            diam_bad: 0,
            point_shell: 0,
            shell: 0,
            heavy: 0,
            light: 0,
            clamped: 0,
            mu_min: f64::INFINITY,
            strict_mu: 0,
            size_checks: 0,
            size_bad: 0,
            size_max: 0.0,
            phi_checks: 0,
            phi_fail: 0,
            phi_skip: 0,
            errors: Vec::new(),
            sep: vec![0; n * n],
            touch: vec![0; n * n],
            ysum: vec![0.0; n],
            y_mean_sum: 0.0,
        }
    }

    fn merge(&mut self, o: Agg) {
        self.trials += o.trials;
        self.clusters += o.clusters;
        self.max_diam = self.max_diam.max(o.max_diam);
        self.diam_bad += o.diam_bad;
        self.point_shell += o.point_shell;
        self.shell += o.shell;
        self.heavy += o.heavy;
        self.light += o.light;
        self.clamped += o.clamped;
        self.mu_min = self.mu_min.min(o.mu_min);
        self.strict_mu += o.strict_mu;
        self.size_checks += o.size_checks;
        self.size_bad += o.size_bad;
        self.size_max = self.size_max.max(o.size_max);
        self.phi_checks += o.phi_checks;
        self.phi_fail += o.phi_fail;
        self.phi_skip += o.phi_skip;
        for e in o.errors {
            self.error(e);
        }
        for (a, b) in self.sep.iter_mut().zip(o.sep) {
            *a += b;
        }
        for (a, b) in self.touch.iter_mut().zip(o.touch) {
            *a += b;
        }
        for (a, b) in self.ysum.iter_mut().zip(o.ysum) {
            *a += b;
        }
        self.y_mean_sum += o.y_mean_sum;
    }

    fn error(&mut self, e: String) {
        if self.errors.len() < MAX_ERRORS {
            self.errors.push(e);
        }
    }

    fn record_error(&mut self, trial: u64, e: Error) {
        match e {
            Error::GuaranteeViolation { mu, .. } => {
                self.strict_mu += 1;
                self.mu_min = self.mu_min.min(mu);
            }
            other => self.error(format!("trial seed {trial}: {other}")),
        }
    }

    /// Checks shared by single selections and partition steps.
    fn selection(&mut self, view: &MetricView<'_>, sel: &Selection, params: &PartitionParams) -> Vec<bool> {
        let n = self.n;
        let mut in_p = vec![false; n];
        for &v in &sel.members {
            in_p[v] = true;
        }
        self.clusters += 1;
        let diam = diameter(view, &sel.members);
        self.max_diam = self.max_diam.max(diam);
        if diam > 2.0 * params.big_r {
            self.diam_bad += 1;
        }
        if sel.heavy {
            self.heavy += 1;
        } else {
            self.light += 1;
            if let Some(mu) = sel.mu_s {
                self.mu_min = self.mu_min.min(mu);
                if params.mode == Mode::Strict && mu < params.big_r / 2.0 {
                    self.strict_mu += 1;
                }
            }
            if params.mode == Mode::Strict {
                let phi = check_phi_bound(view, sel.pivot, params);
                self.phi_checks += 1;
                self.phi_skip += usize::from(phi.skipped);
                self.phi_fail += usize::from(!phi.bound_ok);
            }
        }
        self.clamped += usize::from(sel.clamped);

        // Y_P precondition: t in (3R0, R1]
        let t_ok = sel.t > 3.0 * params.r0 && sel.t <= params.r1;
        let size = sel.members.len() as f64;
        let z = sel.pivot;
        for u in view.active() {
            let dz = view.d(z, u);
            if !(t_ok && dz >= 2.0 * params.r0 && dz <= params.big_r) {
                continue;
            }
            let y = y_p(view, u, &in_p, params);
            self.size_checks += 1;
            let ratio = size / (2.0 * params.d_beta * y);
            self.size_max = self.size_max.max(ratio);
            if size > 2.0 * params.d_beta * y * (1.0 + 1e-12) {
                self.size_bad += 1;
            }
        }
        in_p
    }
}

fn diameter(view: &MetricView<'_>, members: &[usize]) -> f64 {
    let mut d = 0.0f64;
    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            d = d.max(view.d(u, v));
        }
    }
    d
}

/// `sum_{v in Ball(u, 2R)} d(u, v) [u or v in P] / R` over active points.
fn y_p(view: &MetricView<'_>, u: usize, in_p: &[bool], params: &PartitionParams) -> f64 {
    let mut s = 0.0;
    for (d, v) in view.ball(u, 2.0 * params.big_r) {
        if in_p[u] || in_p[v] {
            s += d;
        }
    }
    s / params.big_r
}

fn run_blocks(trials: usize, n: usize, work: impl Fn(usize, &mut Agg) + Sync) -> Agg {
    let blocks = trials.div_ceil(BLOCK);
    let parts: Vec<Agg> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut agg = Agg::new(n);
            for i in (b * BLOCK)..((b + 1) * BLOCK).min(trials) {
                work(i, &mut agg);
            }
            agg
        })
        .collect();
    let mut total = Agg::new(n);
    for p in parts {
        total.merge(p);
    }
    total
}

fn finish(agg: Agg, epsilon: f64, ratio: (f64, Option<usize>, usize), raw: f64, single: bool) -> DecompositionCheck {
    DecompositionCheck {
        trials: agg.trials,
        diameter_ok: agg.diam_bad == 0,
        max_diameter: agg.max_diam,
        clusters_checked: agg.clusters,
        point_shell_violations: agg.point_shell,
        cluster_shell_violations: agg.shell,
        heavy_calls: agg.heavy,
        light_calls: agg.light,
        clamped_draws: agg.clamped,
        mu_s_min: agg.mu_min.is_finite().then_some(agg.mu_min),
        strict_mu_violations: agg.strict_mu,
        size_checks: agg.size_checks,
        size_violations: agg.size_bad,
        size_max_ratio: agg.size_max,
        y_p_mean: (single && agg.trials > 0).then(|| agg.y_mean_sum / agg.trials as f64),
        phi_checks: agg.phi_checks,
        phi_failures: agg.phi_fail,
        phi_skipped: agg.phi_skip,
        epsilon,
        sep_ratio: ratio.0,
        sep_argmax: ratio.1,
        sep_flagged: ratio.2,
        sep_raw_ratio: raw,
        errors: agg.errors,
    }
}

/// `max_u lhs_u / rhs_u`, with `0/0 = 0` and `x/0` flagged as infinite.
fn max_ratio(lhs: &[f64], rhs: &[f64]) -> (f64, Option<usize>, usize) {
    let mut best = (0.0, None, 0);
    for (u, (&l, &r)) in lhs.iter().zip(rhs).enumerate() {
        let ratio = if l <= 0.0 {
            0.0
        } else if r <= 0.0 {
            best.2 += 1;
            f64::INFINITY
        } else {
            l / r
        };
        if best.1.is_none() || ratio > best.0 {
            best.0 = ratio;
            best.1 = Some(u);
        }
    }
    best
}

/// Runs single-cluster selection `trials` times on the whole of `metric`,
/// trial `i` seeded with `seed + i`.
///
/// Always-properties: diameter at most `2R`, the shell inequality for the
/// selected cluster, the `|P| <= 2 D Y_P` bound where it applies, and in
/// strict mode `mu(S) >= R/2` plus the ball-growth bound at each light pivot.
/// The separation bound is estimated from frequencies with Hoeffding slack and
/// reported as a ratio against `beta^q E[Y_P]`.
pub fn verify_cluster(metric: &Metric, params: &PartitionParams, trials: usize, seed: u64) -> DecompositionCheck {
    let n = metric.n();
    let view = metric.full_view();
    let agg = run_blocks(trials, n, |i, agg| {
        let s = rng::trial_seed(seed, i as u64);
        agg.trials += 1;
        let sel = match cluster_select(&view, params, &mut rng::seeded(s)) {
            Ok(sel) => sel,
            Err(e) => return agg.record_error(s, e),
        };
        let in_p = agg.selection(&view, &sel, params);
        if shell_violations(&view, &in_p, params) > 0 {
            agg.point_shell += 1;
        }
        let mut mean = 0.0;
        for u in 0..n {
            let y = y_p(&view, u, &in_p, params);
            agg.ysum[u] += y;
            mean += y;
            for (_, v) in view.ball(u, params.big_r) {
                if in_p[u] != in_p[v] {
                    agg.sep[u * n + v] += 1;
                }
                if in_p[u] || in_p[v] {
                    agg.touch[u * n + v] += 1;
                }
            }
        }
        agg.y_mean_sum += if n > 0 { mean / n as f64 } else { 0.0 };
    });
    let t = agg.trials.max(1) as f64;
    let eps = hoeffding_epsilon(n, trials.max(1));
    let scale = params.d_beta / params.big_r;
    let bq = params.beta.powf(params.q);
    let lhs = |slack: f64| -> Vec<f64> {
        (0..n)
            .map(|u| {
                view.ball(u, params.big_r)
                    .filter(|&(_, v)| v != u)
                    .map(|(d, v)| {
                        let p = agg.sep[u * n + v] as f64 / t;
                        let touch = agg.touch[u * n + v] as f64 / t;
                        ((p - slack) - scale * d * touch).max(0.0)
                    })
                    .sum()
            })
            .collect()
    };
    let rhs: Vec<f64> = agg.ysum.iter().map(|&y| bq * y / t).collect();
    let ratio = max_ratio(&lhs(eps), &rhs);
    let raw = max_ratio(&lhs(0.0), &rhs).0;
    finish(agg, eps, ratio, raw, true)
}

/// Runs the full partition `trials` times, trial `i` seeded with `seed + i`.
///
/// Besides the per-selection checks of [`verify_cluster`], asserts for every
/// point `sum_{v in Ball(u,r)} [split] <= 25 beta D^2 sum_{v in Ball(u,2R)} d/R`
/// and reports the separation ratio against `beta^q sum_{Ball(u,2R)} d/R`.
pub fn verify_decomposition(
    metric: &Metric,
    params: &PartitionParams,
    trials: usize,
    seed: u64,
) -> DecompositionCheck {
    let n = metric.n();
    let view = metric.full_view();
    let c = params.shell_constant() / params.big_r;
    let totals: Vec<f64> = (0..n)
        .map(|u| view.ball(u, 2.0 * params.big_r).map(|(d, _)| d).sum())
        .collect();
    let agg = run_blocks(trials, n, |i, agg| {
        let s = rng::trial_seed(seed, i as u64);
        agg.trials += 1;
        let mut shell_bad = 0;
        let result = partition_metric_observed(&view, params, &mut rng::seeded(s), |v, sel| {
            let in_p = agg.selection(v, sel, params);
            if shell_violations(v, &in_p, params) > 0 {
                shell_bad += 1;
            }
        });
        agg.shell += shell_bad;
        let labels = match result {
            Ok((c, _)) => c,
            Err(e) => return agg.record_error(s, e),
        };
        for u in 0..n {
            let mut lhs = 0usize;
            for (d, v) in view.ball(u, params.big_r) {
                if !labels.same(u, v) {
                    agg.sep[u * n + v] += 1;
                    if d <= params.r {
                        lhs += 1;
                    }
                }
            }
            if lhs as f64 > c * totals[u] {
                agg.point_shell += 1;
            }
        }
    });
    let t = agg.trials.max(1) as f64;
    let eps = hoeffding_epsilon(n, trials.max(1));
    let scale = params.d_beta / params.big_r;
    let bq = params.beta.powf(params.q);
    let lhs = |slack: f64| -> Vec<f64> {
        (0..n)
            .map(|u| {
                view.ball(u, params.big_r)
                    .filter(|&(_, v)| v != u)
                    .map(|(d, v)| ((agg.sep[u * n + v] as f64 / t - slack) - scale * d).max(0.0))
                    .sum()
            })
            .collect()
    };
    let rhs: Vec<f64> = totals.iter().map(|&s| bq * s / params.big_r).collect();
    let ratio = max_ratio(&lhs(eps), &rhs);
    let raw = max_ratio(&lhs(0.0), &rhs).0;
    finish(agg, eps, ratio, raw, false)
}
