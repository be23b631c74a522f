//! Finite metric spaces and shrinking views over them.

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Tolerance for symmetry and triangle checks on construction.
pub const METRIC_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Metric {
    d: SquareMatrix,
    /// Per point, every point (itself included) sorted by distance then index.
    sorted: Vec<Vec<(f64, usize)>>,
}

impl Metric {
    pub fn new(d: SquareMatrix) -> Result<Self> {
        let n = d.n();
        for u in 0..n {
            if d.get(u, u) != 0.0 {
                return Err(Error::InvalidArgument(format!("d({u}, {u}) must be 0")));
            }
            for v in 0..n {
                let a = d.get(u, v);
                if !(a >= 0.0 && a.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "d({u}, {v}) = {a} is not a finite nonnegative distance"
                    )));
                }
                if (a - d.get(v, u)).abs() > METRIC_TOL {
                    return Err(Error::InvalidArgument(format!("d is asymmetric at ({u}, {v})")));
                }
            }
        }
        let worst = crate::relaxation::max_triangle_residual(&d);
        if worst > METRIC_TOL {
            return Err(Error::InvalidArgument(format!(
                "triangle inequality violated by {worst:e}"
            )));
        }
        let sorted = (0..n)
            .map(|u| {
                let mut row: Vec<(f64, usize)> = (0..n).map(|v| (d.get(u, v), v)).collect();
                row.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                row
            })
            .collect();
        Ok(Metric { d, sorted })
    }

    /// Euclidean distances between points in the plane.
    pub fn from_points(points: &[[f64; 2]]) -> Result<Self> {
        let d = SquareMatrix::from_fn(points.len(), |u, v| {
            let (a, b) = (points[u], points[v]);
            (a[0] - b[0]).hypot(a[1] - b[1])
        });
        Metric::new(d)
    }

    /// Distances `|x_u - x_v|` on the line.
    pub fn from_line(xs: &[f64]) -> Result<Self> {
        Metric::new(SquareMatrix::from_fn(xs.len(), |u, v| (xs[u] - xs[v]).abs()))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.d.n()
    }

    #[inline]
    pub fn d(&self, u: usize, v: usize) -> f64 {
        self.d.get(u, v)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.d
    }

    /// Neighbours of `u` by increasing distance.
    pub fn sorted_from(&self, u: usize) -> &[(f64, usize)] {
        &self.sorted[u]
    }

    pub fn full_view(&self) -> MetricView<'_> {
        MetricView {
            metric: self,
            active: vec![true; self.n()],
            count: self.n(),
        }
    }
}

/// The points of a [`Metric`] not yet assigned to a cluster.
#[derive(Clone, Debug)]
pub struct MetricView<'a> {
    metric: &'a Metric,
    active: Vec<bool>,
    count: usize,
}

impl<'a> MetricView<'a> {
    pub fn metric(&self) -> &'a Metric {
        self.metric
    }

    #[inline]
    pub fn d(&self, u: usize, v: usize) -> f64 {
        self.metric.d(u, v)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    #[inline]
    pub fn is_active(&self, u: usize) -> bool {
        self.active[u]
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.active.iter().enumerate().filter(|(_, &a)| a).map(|(u, _)| u)
    }

    /// Active points within `radius` of `u` (inclusive), by increasing distance.
    pub fn ball(&self, u: usize, radius: f64) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.metric
            .sorted_from(u)
            .iter()
            .take_while(move |(d, _)| *d <= radius)
            .filter(|(_, v)| self.active[*v])
            .copied()
    }

    pub fn ball_size(&self, u: usize, radius: f64) -> usize {
        self.ball(u, radius).count()
    }

    pub fn ball_members(&self, u: usize, radius: f64) -> Vec<usize> {
        let mut m: Vec<usize> = self.ball(u, radius).map(|(_, v)| v).collect();
        m.sort_unstable();
        m
    }

    pub fn remove(&mut self, members: &[usize]) {
        for &v in members {
            if self.active[v] {
                self.active[v] = false;
                self.count -= 1;
            }
        }
    }
}
