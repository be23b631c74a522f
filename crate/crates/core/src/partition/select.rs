//! Pivot choice, the radius set, radius sampling and the partition loop.

use serde::Serialize;

use super::intervals::{next_down, IntervalSet};
use super::metric::MetricView;
use super::params::{Mode, PartitionParams};
use crate::error::{Error, Result};
use crate::instance::Clustering;
use crate::rng::{self, Rng};

/// Active point with the most active points within `r0`; lowest index wins ties.
pub fn select_pivot(view: &MetricView<'_>, r0: f64) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for u in view.active() {
        let size = view.ball_size(u, r0);
        if best.map_or(true, |(_, s)| size > s) {
            best = Some((u, size));
        }
    }
    best.map(|(u, _)| u)
}

pub fn is_heavy(view: &MetricView<'_>, z: usize, params: &PartitionParams) -> bool {
    let outer = view.ball_size(z, params.r1) as f64;
    let inner = view.ball_size(z, params.r0) as f64;
    outer >= params.rho * inner
}

/// Counts active `u` violating the shell inequality for the cluster `in_p`:
/// `sum_{v in Ball(u, r)} [u, v split] <= 25 beta D^2 sum_{v in Ball(u, 2R)} d(u,v)/R [u or v in P]`.
///
/// Direct `O(n^2)` evaluation, used by the verifiers and as an oracle.
pub fn shell_violations(view: &MetricView<'_>, in_p: &[bool], params: &PartitionParams) -> usize {
    let c = params.shell_constant() / params.big_r;
    let two_r = 2.0 * params.big_r;
    view.active()
        .filter(|&u| {
            let mut lhs = 0usize;
            let mut rhs = 0.0;
            for (d, v) in view.ball(u, two_r) {
                if d <= params.r && in_p[u] != in_p[v] {
                    lhs += 1;
                }
                if in_p[u] || in_p[v] {
                    rhs += d;
                }
            }
            lhs as f64 > c * rhs
        })
        .count()
}

/// The radii `s` in `(3 R0, R1]` for which `Ball(z, s)` satisfies the shell
/// inequality at every active point.
///
/// The ball only changes at distances from `z`, so the range splits into
/// elementary pieces `(3R0, b_1), [b_1, b_2), ..., [b_m, R1]` on which the
/// inequality is tested once. Per-point counts are updated as points join the
/// ball, for `O(n^2)` total work.
pub fn compute_s(view: &MetricView<'_>, z: usize, params: &PartitionParams) -> IntervalSet {
    let metric = view.metric();
    let n = metric.n();
    let lo = 3.0 * params.r0;
    let hi = params.r1;
    let r = params.r;
    let two_r = 2.0 * params.big_r;
    let c = params.shell_constant() / params.big_r;
    if !(lo < hi) {
        return IntervalSet::empty();
    }

    let active: Vec<usize> = view.active().collect();
    let mut in_p = vec![false; n];
    let mut ball_r = vec![0usize; n];
    let mut total = vec![0.0f64; n];
    let mut cnt_r = vec![0usize; n];
    let mut sum_p = vec![0.0f64; n];
    for &u in &active {
        for (d, _) in view.ball(u, two_r) {
            total[u] += d;
            if d <= r {
                ball_r[u] += 1;
            }
        }
    }
    let add = |v: usize, in_p: &mut [bool], cnt_r: &mut [usize], sum_p: &mut [f64]| {
        in_p[v] = true;
        for (d, u) in view.ball(v, two_r) {
            sum_p[u] += d;
            if d <= r {
                cnt_r[u] += 1;
            }
        }
    };

    let order: Vec<(f64, usize)> = view.ball(z, hi).collect();
    let mut next = 0;
    while next < order.len() && order[next].0 <= lo {
        add(order[next].1, &mut in_p, &mut cnt_r, &mut sum_p);
        next += 1;
    }
    let holds = |in_p: &[bool], cnt_r: &[usize], sum_p: &[f64]| {
        active.iter().all(|&u| {
            let (lhs, rhs) = if in_p[u] {
                (ball_r[u] - cnt_r[u], total[u])
            } else {
                (cnt_r[u], sum_p[u])
            };
            lhs as f64 <= c * rhs
        })
    };

    let mut pieces: Vec<(f64, f64)> = Vec::new();
    let mut closed_end = false;
    let mut start = lo;
    loop {
        let ok = holds(&in_p, &cnt_r, &sum_p);
        if next == order.len() {
            if ok {
                pieces.push((start, hi));
                closed_end = true;
            }
            break;
        }
        let b = order[next].0;
        if ok {
            pieces.push((start, b));
        }
        while next < order.len() && order[next].0 == b {
            add(order[next].1, &mut in_p, &mut cnt_r, &mut sum_p);
            next += 1;
        }
        start = b;
        if b == hi {
            // the single point R1 carries no measure
            break;
        }
    }
    IntervalSet::new(pieces, closed_end).expect("pieces are ordered")
}

/// CDF of the pre-image radius: `(1 - e^{-x/R0}) / (1 - e^{-R/(2 R0)})` on `[0, R/2]`.
pub fn f_cdf(x: f64, params: &PartitionParams) -> f64 {
    let x = x.clamp(0.0, params.big_r / 2.0);
    (-x / params.r0).exp_m1() / (-params.big_r / (2.0 * params.r0)).exp_m1()
}

/// Inverse of [`f_cdf`] at `u` in `[0, 1)`.
pub fn f_inverse(u: f64, params: &PartitionParams) -> f64 {
    let mass = -(-params.big_r / (2.0 * params.r0)).exp_m1();
    -params.r0 * (-u * mass).ln_1p()
}

pub fn sample_preimage(params: &PartitionParams, rng: &mut Rng) -> f64 {
    f_inverse(rng::uniform01(rng), params)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiusDraw {
    pub x: f64,
    pub t: f64,
    /// Practical mode only: `x` exceeded `mu(S)` and was lowered to it.
    pub clamped: bool,
}

/// Draws `x` from `F` and maps it into `S` through `pi_inv`.
pub fn sample_radius(s: &IntervalSet, params: &PartitionParams, rng: &mut Rng) -> Result<RadiusDraw> {
    let mu = s.measure();
    if s.is_empty() || mu <= 0.0 {
        return Err(Error::EmptyRadiusSet);
    }
    if params.mode == Mode::Strict && mu < params.big_r / 2.0 {
        return Err(Error::GuaranteeViolation {
            mu,
            required: params.big_r / 2.0,
        });
    }
    let x = sample_preimage(params, rng);
    if x >= mu {
        let sup = s.sup().expect("nonempty");
        let t = if s.closed_end() { sup } else { next_down(sup) };
        return Ok(RadiusDraw { x: mu, t, clamped: true });
    }
    Ok(RadiusDraw {
        x,
        t: s.pi_inv(x)?,
        clamped: false,
    })
}

/// One cluster-selection step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Selection {
    pub pivot: usize,
    pub heavy: bool,
    /// `mu(S)`; absent for heavy balls.
    pub mu_s: Option<f64>,
    /// Pre-image draw; absent for heavy balls.
    pub x: Option<f64>,
    pub t: f64,
    pub clamped: bool,
    pub members: Vec<usize>,
}

/// Picks one cluster from the active points.
pub fn cluster_select(view: &MetricView<'_>, params: &PartitionParams, rng: &mut Rng) -> Result<Selection> {
    let z = select_pivot(view, params.r0)
        .ok_or_else(|| Error::InvalidArgument("cannot select a cluster from an empty view".into()))?;
    if is_heavy(view, z, params) {
        return Ok(Selection {
            pivot: z,
            heavy: true,
            mu_s: None,
            x: None,
            t: params.r1,
            clamped: false,
            members: view.ball_members(z, params.r1),
        });
    }
    let s = compute_s(view, z, params);
    let draw = sample_radius(&s, params, rng)?;
    Ok(Selection {
        pivot: z,
        heavy: false,
        mu_s: Some(s.measure()),
        x: Some(draw.x),
        t: draw.t,
        clamped: draw.clamped,
        members: view.ball_members(z, draw.t),
    })
}

/// Repeated cluster selection until every point is assigned; clusters are
/// labelled in the order they are cut.
pub fn partition_metric(
    view: &MetricView<'_>,
    params: &PartitionParams,
    rng: &mut Rng,
) -> Result<(Clustering, Vec<Selection>)> {
    partition_metric_observed(view, params, rng, |_, _| {})
}

/// [`partition_metric`] that shows each selection, together with the view it
/// was cut from, to `observe`.
pub fn partition_metric_observed(
    view: &MetricView<'_>,
    params: &PartitionParams,
    rng: &mut Rng,
    mut observe: impl FnMut(&MetricView<'_>, &Selection),
) -> Result<(Clustering, Vec<Selection>)> {
    let mut view = view.clone();
    let n = view.metric().n();
    let mut labels = vec![usize::MAX; n];
    let mut trace = Vec::new();
    while !view.is_empty() {
        let sel = cluster_select(&view, params, rng)?;
        observe(&view, &sel);
        for &v in &sel.members {
            labels[v] = trace.len();
        }
        view.remove(&sel.members);
        trace.push(sel);
    }
    // points outside the initial view keep singleton labels after the rest
    let mut next = trace.len();
    for l in labels.iter_mut() {
        if *l == usize::MAX {
            *l = next;
            next += 1;
        }
    }
    Ok((Clustering::from_labels(labels)?, trace))
}
