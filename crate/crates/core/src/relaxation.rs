//! Convex relaxation over the metric polytope.
//!
//! Variables `x_uv` in `[0, 1]` form a pseudometric; the per-vertex cost is
//! `y_u = sum_{E+} w_uv x_uv + sum_{E-} w_uv (1 - x_uv)` and the objective is
//! `||y||_p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Clustering, Instance};
use crate::matrix::SquareMatrix;
use crate::norm::NormOrder;

/// Per-vertex relaxation cost.
pub fn eval_y(inst: &Instance, x: &SquareMatrix) -> Result<Vec<f64>> {
    let n = inst.n();
    if x.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.n(),
        });
    }
    Ok((0..n)
        .map(|u| {
            let row = x.row(u);
            let mut y = 0.0;
            for (v, &xv) in row.iter().enumerate() {
                if v == u {
                    continue;
                }
                let w = inst.weight(u, v);
                y += if inst.is_positive(u, v) { w * xv } else { w * (1.0 - xv) };
            }
            y
        })
        .collect())
}

pub fn objective(y: &[f64], p: NormOrder) -> f64 {
    p.norm(y)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub max_triangle_residual: f64,
    pub range_violations: usize,
    pub symmetry_violations: usize,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.range_violations == 0 && self.symmetry_violations == 0
    }
}

/// Largest `x_ik - x_ij - x_jk` over ordered triples of distinct vertices,
/// floored at 0.
pub fn max_triangle_residual(x: &SquareMatrix) -> f64 {
    let n = x.n();
    let mut worst = 0.0f64;
    for j in 0..n {
        let rj = x.row(j);
        for i in 0..n {
            if i == j {
                continue;
            }
            let ri = x.row(i);
            let xij = ri[j];
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let r = ri[k] - xij - rj[k];
                if r > worst {
                    worst = r;
                }
            }
        }
    }
    worst
}

/// Exhaustive scan of triangle, range and symmetry constraints; entries more
/// than `tol` outside `[0, 1]` or off-symmetric count as violations.
pub fn check_feasible(x: &SquareMatrix, tol: f64) -> FeasibilityReport {
    let n = x.n();
    let mut range_violations = 0;
    let mut symmetry_violations = 0;
    for u in 0..n {
        for v in 0..n {
            let a = x.get(u, v);
            if u == v {
                if a.abs() > tol {
                    range_violations += 1;
                }
                continue;
            }
            if !(a >= -tol && a <= 1.0 + tol) {
                range_violations += 1;
            }
            if v > u && (a - x.get(v, u)).abs() > tol {
                symmetry_violations += 1;
            }
        }
    }
    FeasibilityReport {
        max_triangle_residual: max_triangle_residual(x),
        range_violations,
        symmetry_violations,
    }
}

/// Min-plus closure (shortest paths) followed by clamping to `[0, 1]`.
pub fn project_metric(x: &SquareMatrix) -> SquareMatrix {
    let n = x.n();
    let mut d = x.clone();
    for u in 0..n {
        d.set(u, u, 0.0);
    }
    for k in 0..n {
        let rk: Vec<f64> = d.row(k).to_vec();
        for i in 0..n {
            let dik = d.get(i, k);
            for (j, &dkj) in rk.iter().enumerate() {
                let via = dik + dkj;
                if via < d.get(i, j) {
                    d.set(i, j, via);
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j).clamp(0.0, 1.0);
            d.set(i, j, v);
        }
    }
    d
}

/// 0/1 co-clustering matrix of `c`.
pub fn integral_x(c: &Clustering) -> SquareMatrix {
    SquareMatrix::from_fn(c.len(), |u, v| if c.same(u, v) { 0.0 } else { 1.0 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// `None` selects `1 / (n * max weight)`.
    pub step0: Option<f64>,
    pub tol_residual: f64,
    pub tol_obj: f64,
    pub projection_rounds: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iters: 5000,
            step0: None,
            tol_residual: 1e-6,
            tol_obj: 1e-8,
            projection_rounds: 2,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("{what} must be positive")));
        if self.max_iters == 0 {
            return bad("max_iters");
        }
        if self.projection_rounds == 0 {
            return bad("projection_rounds");
        }
        if !(self.tol_residual > 0.0) {
            return bad("tol_residual");
        }
        if !(self.tol_obj > 0.0) {
            return bad("tol_obj");
        }
        if let Some(s) = self.step0 {
            if !(s > 0.0 && s.is_finite()) {
                return bad("step0");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalSolution {
    pub p: NormOrder,
    pub objective: f64,
    pub x: SquareMatrix,
    pub y: Vec<f64>,
    pub max_triangle_residual: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Objective of the last descent iterate before the closure repair.
    pub pre_repair_objective: f64,
}

impl FractionalSolution {
    /// Wraps an externally supplied `x`, repairing it to an exact metric.
    pub fn from_x(inst: &Instance, x: &SquareMatrix, p: NormOrder) -> Result<Self> {
        let y0 = eval_y(inst, x)?;
        let fixed = project_metric(&symmetrized(x));
        let y = eval_y(inst, &fixed)?;
        Ok(FractionalSolution {
            p,
            objective: objective(&y, p),
            max_triangle_residual: max_triangle_residual(&fixed),
            x: fixed,
            y,
            converged: true,
            iterations: 0,
            pre_repair_objective: objective(&y0, p),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("solution serialization cannot fail")
    }
}

fn symmetrized(x: &SquareMatrix) -> SquareMatrix {
    SquareMatrix::from_fn(x.n(), |u, v| {
        if u == v {
            0.0
        } else {
            0.5 * (x.get(u, v) + x.get(v, u)).max(0.0)
        }
    })
}

/// Dykstra sweeps over all `3 * C(n, 3)` triangle half-spaces.
struct TriangleProjector {
    n: usize,
    triples: Vec<[usize; 3]>,
    corr: Vec<[f64; 3]>,
}

impl TriangleProjector {
    fn new(n: usize) -> Self {
        let mut triples = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    triples.push([i, j, k]);
                }
            }
        }
        let corr = vec![[0.0; 3]; triples.len() * 3];
        TriangleProjector { n, triples, corr }
    }

    fn project(&mut self, x: &mut [f64], rounds: usize) {
        let n = self.n;
        for c in self.corr.iter_mut() {
            *c = [0.0; 3];
        }
        for _ in 0..rounds {
            for (t, &[i, j, k]) in self.triples.iter().enumerate() {
                // long side first, then the two short ones
                let edges = [(i * n + k, i * n + j, j * n + k), (i * n + j, i * n + k, j * n + k), (j * n + k, i * n + j, i * n + k)];
                for (c, &(long, a, b)) in edges.iter().enumerate() {
                    let corr = &mut self.corr[3 * t + c];
                    let z = [x[long] + corr[0], x[a] + corr[1], x[b] + corr[2]];
                    let viol = z[0] - z[1] - z[2];
                    let p = if viol > 0.0 {
                        let s = viol / 3.0;
                        [z[0] - s, z[1] + s, z[2] + s]
                    } else {
                        z
                    };
                    *corr = [z[0] - p[0], z[1] - p[1], z[2] - p[2]];
                    x[long] = p[0];
                    x[a] = p[1];
                    x[b] = p[2];
                }
            }
        }
    }
}

/// Upper-triangular working vector <-> full symmetric matrix.
fn to_full(n: usize, x: &[f64]) -> SquareMatrix {
    SquareMatrix::from_fn(n, |u, v| match u.cmp(&v) {
        std::cmp::Ordering::Less => x[u * n + v],
        std::cmp::Ordering::Greater => x[v * n + u],
        std::cmp::Ordering::Equal => 0.0,
    })
}

/// Gradient of `||y||_p` with respect to `y`; `p = inf` picks the lowest
/// index attaining the maximum.
fn outer_gradient(y: &[f64], p: NormOrder) -> Vec<f64> {
    let mut g = vec![0.0; y.len()];
    match p {
        NormOrder::Infinity => {
            let mut best = 0;
            for (u, &v) in y.iter().enumerate() {
                if v > y[best] {
                    best = u;
                }
            }
            if !g.is_empty() {
                g[best] = 1.0;
            }
        }
        NormOrder::Finite(q) if q == 1.0 => g.iter_mut().for_each(|v| *v = 1.0),
        NormOrder::Finite(q) => {
            let norm = p.norm(y);
            if norm > 0.0 {
                for (gu, &yu) in g.iter_mut().zip(y) {
                    *gu = (yu / norm).powf(q - 1.0);
                }
            }
        }
    }
    g
}

/// Integral candidates from thresholding `x`: connected components of
/// `{x_uv < theta}`.
fn threshold_clusterings(x: &SquareMatrix) -> Vec<Clustering> {
    let n = x.n();
    let mut thetas: Vec<f64> = vec![-1.0, 0.5];
    for u in 0..n {
        for v in (u + 1)..n {
            thetas.push(x.get(u, v));
        }
    }
    thetas.push(1.0 + 1e-9);
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    let mut out: Vec<Clustering> = Vec::new();
    for &theta in &thetas {
        // strict threshold just above each distinct value
        let cut = theta + 1e-12;
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for v in 0..n {
                    if label[v] == usize::MAX && x.get(u, v) < cut {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        let c = Clustering::canonical(&label);
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

struct Best {
    objective: f64,
    x: SquareMatrix,
}

impl Best {
    fn offer(&mut self, inst: &Instance, x: SquareMatrix, p: NormOrder) {
        let y = eval_y(inst, &x).expect("dimensions match");
        let obj = objective(&y, p);
        if obj < self.objective {
            self.objective = obj;
            self.x = x;
        }
    }
}

/// Projected subgradient descent with Dykstra triangle fixing.
///
/// Every 10 iterations the min-plus closure of the iterate is evaluated and the
/// best exactly feasible point is kept; threshold roundings of the final
/// iterate are offered as further feasible candidates. The returned `x` is
/// always an exact metric.
pub fn solve_cp(inst: &Instance, p: NormOrder, opts: &SolverOptions) -> Result<FractionalSolution> {
    opts.validate()?;
    let n = inst.n();
    if n <= 1 {
        let x = SquareMatrix::zeros(n);
        let y = vec![0.0; n];
        return Ok(FractionalSolution {
            p,
            objective: 0.0,
            x,
            y,
            max_triangle_residual: 0.0,
            converged: true,
            iterations: 0,
            pre_repair_objective: 0.0,
        });
    }
    let wmax = inst.max_weight();
    let step0 = opts.step0.unwrap_or(1.0 / (n as f64 * wmax));

    let mut proj = TriangleProjector::new(n);
    // x lives in the upper triangle of a dense n*n buffer
    let mut x = vec![0.0; n * n];
    for u in 0..n {
        for v in (u + 1)..n {
            x[u * n + v] = if inst.is_positive(u, v) { 0.0 } else { 1.0 };
        }
    }
    proj.project(&mut x, opts.projection_rounds.max(4));
    clamp_upper(n, &mut x);

    let mut best = Best {
        objective: f64::INFINITY,
        x: SquareMatrix::zeros(n),
    };
    best.offer(inst, SquareMatrix::filled_off_diagonal(n, 1.0), p);
    best.offer(inst, SquareMatrix::zeros(n), p);

    let mut history: Vec<f64> = Vec::with_capacity(opts.max_iters + 1);
    let mut converged = false;
    let mut iterations = 0;
    let mut last_obj;
    {
        let full = to_full(n, &x);
        last_obj = objective(&eval_y(inst, &full)?, p);
        history.push(last_obj);
    }
    for k in 1..=opts.max_iters {
        iterations = k;
        let full = to_full(n, &x);
        let y = eval_y(inst, &full)?;
        let g = outer_gradient(&y, p);
        if g.iter().all(|&v| v == 0.0) {
            converged = true;
            break;
        }
        let step = step0 / (k as f64).sqrt();
        for u in 0..n {
            for v in (u + 1)..n {
                let s = if inst.is_positive(u, v) { 1.0 } else { -1.0 };
                let d = s * inst.weight(u, v) * (g[u] + g[v]);
                x[u * n + v] = (x[u * n + v] - step * d).clamp(0.0, 1.0);
            }
        }
        proj.project(&mut x, opts.projection_rounds);
        clamp_upper(n, &mut x);

        let full = to_full(n, &x);
        last_obj = objective(&eval_y(inst, &full)?, p);
        history.push(last_obj);
        if k % 10 == 0 {
            best.offer(inst, project_metric(&full), p);
        }
        if k >= 50 {
            let old = history[k - 50];
            let rel = (old - last_obj).abs() / old.abs().max(1e-300);
            if rel <= opts.tol_obj && max_triangle_residual(&full) <= opts.tol_residual {
                converged = true;
                break;
            }
        }
    }
    let full = to_full(n, &x);
    let pre_repair_objective = last_obj;
    best.offer(inst, project_metric(&full), p);
    for c in threshold_clusterings(&project_metric(&full)) {
        best.offer(inst, integral_x(&c), p);
    }
    let y = eval_y(inst, &best.x)?;
    Ok(FractionalSolution {
        p,
        objective: objective(&y, p),
        max_triangle_residual: max_triangle_residual(&best.x),
        x: best.x,
        y,
        converged,
        iterations,
        pre_repair_objective,
    })
}

fn clamp_upper(n: usize, x: &mut [f64]) {
    for u in 0..n {
        for v in (u + 1)..n {
            x[u * n + v] = x[u * n + v].clamp(0.0, 1.0);
        }
    }
}

/// Checks the integrality-gap shape produced by `gen_gap`.
pub fn is_gap_instance(inst: &Instance) -> bool {
    let n = inst.n();
    if n < 3 {
        return false;
    }
    let a = inst.alpha();
    for u in 0..n {
        for v in (u + 1)..n {
            let (pos, w) = (inst.is_positive(u, v), inst.weight(u, v));
            let ok = if v == u + 1 {
                pos && w == 1.0
            } else if u == 0 && v == n - 1 {
                !pos && w == 1.0
            } else {
                pos && w == a
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Closed-form fractional point for gap instances: `x_uv = |u - v| / (n - 1)`.
pub fn gap_fractional(inst: &Instance, p: NormOrder) -> Result<FractionalSolution> {
    if !is_gap_instance(inst) {
        return Err(Error::InvalidArgument(
            "instance does not have the integrality-gap path shape".into(),
        ));
    }
    let n = inst.n();
    let len = (n - 1) as f64;
    let x = SquareMatrix::from_fn(n, |u, v| u.abs_diff(v) as f64 / len);
    let y = eval_y(inst, &x)?;
    let obj = objective(&y, p);
    Ok(FractionalSolution {
        p,
        objective: obj,
        max_triangle_residual: max_triangle_residual(&x),
        x,
        y,
        converged: true,
        iterations: 0,
        pre_repair_objective: obj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_gap, Sign};

    fn mixed() -> Instance {
        Instance::from_fn(4, 0.5, 1.0, |u, v| {
            if (u + v) % 2 == 0 {
                (Sign::Positive, 0.5 + 0.1 * u as f64)
            } else {
                (Sign::Negative, 0.7 + 0.05 * v as f64)
            }
        })
        .unwrap()
    }

    #[test]
    fn y_at_zero_and_one() {
        let g = mixed();
        let y0 = eval_y(&g, &SquareMatrix::zeros(4)).unwrap();
        let y1 = eval_y(&g, &SquareMatrix::filled_off_diagonal(4, 1.0)).unwrap();
        for u in 0..4 {
            let (mut neg, mut pos) = (0.0, 0.0);
            for v in 0..4 {
                if v == u {
                    continue;
                }
                if g.is_positive(u, v) {
                    pos += g.weight(u, v);
                } else {
                    neg += g.weight(u, v);
                }
            }
            assert_eq!(y0[u], neg);
            assert_eq!(y1[u], pos);
        }
    }

    #[test]
    fn y_dimension_checked() {
        assert!(eval_y(&mixed(), &SquareMatrix::zeros(3)).is_err());
    }

    #[test]
    fn residual_arithmetic() {
        let mut x = SquareMatrix::zeros(3);
        x.set_sym(0, 2, 1.0);
        x.set_sym(0, 1, 0.2);
        x.set_sym(1, 2, 0.2);
        let r = check_feasible(&x, 1e-12);
        assert!((r.max_triangle_residual - 0.6).abs() < 1e-15);
        assert!(r.is_feasible());
        let fixed = project_metric(&x);
        assert!((fixed.get(0, 2) - 0.4).abs() < 1e-15);
        assert!(fixed.dominated_by(&x, 0.0));
    }

    #[test]
    fn closure_idempotent_on_metric() {
        let x = SquareMatrix::from_fn(5, |u, v| u.abs_diff(v) as f64 / 4.0);
        assert_eq!(project_metric(&x), x);
    }

    #[test]
    fn gap_quarter_point() {
        let g = gen_gap(0.25).unwrap();
        let s = gap_fractional(&g, NormOrder::Infinity).unwrap();
        assert_eq!(s.x.get(0, 1), 0.5);
        assert_eq!(s.x.get(1, 2), 0.5);
        assert_eq!(s.x.get(0, 2), 1.0);
        assert_eq!(s.max_triangle_residual, 0.0);
        let n = g.n() as f64;
        for &yu in &s.y {
            assert!(yu <= 2.0 / (n - 1.0) + 0.25 * n + 1e-15);
        }
    }

    #[test]
    fn gap_fractional_rejects_other_shapes() {
        assert!(gap_fractional(&mixed(), NormOrder::ONE).is_err());
    }

    #[test]
    fn integral_embedding_matches_disagreements() {
        let g = mixed();
        let c = Clustering::from_labels(vec![0, 1, 0, 1]).unwrap();
        let x = integral_x(&c);
        assert_eq!(max_triangle_residual(&x), 0.0);
        let y = eval_y(&g, &x).unwrap();
        // (u + v) even pairs are positive and co-clustered here, odd pairs
        // negative and split, so nothing disagrees
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn all_positive_solves_to_zero() {
        let g = Instance::from_fn(5, 0.5, 1.0, |_, _| (Sign::Positive, 0.8)).unwrap();
        for p in [NormOrder::ONE, NormOrder::TWO, NormOrder::Infinity] {
            let s = solve_cp(&g, p, &SolverOptions::default()).unwrap();
            assert!(s.objective <= 1e-9, "{p}: {}", s.objective);
        }
    }

    #[test]
    fn gap_quarter_solver_below_one() {
        let g = gen_gap(0.25).unwrap();
        let s = solve_cp(&g, NormOrder::Infinity, &SolverOptions::default()).unwrap();
        assert!(s.objective <= 1.0 + 1e-6);
        assert!(s.max_triangle_residual <= 1e-12);
    }

    #[test]
    fn solver_is_deterministic() {
        let g = mixed();
        let a = solve_cp(&g, NormOrder::TWO, &SolverOptions::default()).unwrap();
        let b = solve_cp(&g, NormOrder::TWO, &SolverOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn threshold_candidates_cover_extremes() {
        let x = SquareMatrix::from_fn(3, |u, v| u.abs_diff(v) as f64 / 2.0);
        let cs = threshold_clusterings(&x);
        assert!(cs.contains(&Clustering::singletons(3)));
        assert!(cs.contains(&Clustering::single(3)));
    }

    #[test]
    fn bad_options_rejected() {
        let o = SolverOptions {
            max_iters: 0,
            ..SolverOptions::default()
        };
        assert!(solve_cp(&mixed(), NormOrder::ONE, &o).is_err());
    }
}
