//! Integrality-gap table for the weighted-path family.

use serde::Serialize;

use crate::analysis::brute::{brute_force_opt, HARD_MAX_N};
use crate::error::Result;
use crate::instance::gen_gap;
use crate::norm::NormOrder;
use crate::relaxation::gap_fractional;

/// Integral lower bound: every clustering breaks a path edge or the negative edge.
pub const INTEGRAL_LB: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub alpha: f64,
    pub p: NormOrder,
    pub n: usize,
    pub fractional_cost: f64,
    pub integral_lb: f64,
    pub bruteforce_opt: Option<f64>,
    pub ratio: f64,
    pub triangle_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapSlope {
    pub p: NormOrder,
    pub slope: f64,
    /// `1/2 - 1/(2p)`.
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
    pub slopes: Vec<GapSlope>,
}

/// Exponent of `1/alpha` in the integrality gap lower bound.
pub fn expected_exponent(p: NormOrder) -> f64 {
    match p {
        NormOrder::Infinity => 0.5,
        NormOrder::Finite(p) => 0.5 - 0.5 / p,
    }
}

/// Least-squares slope of `ys` against `xs`. `None` for fewer than two distinct xs.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One row per `(alpha, p)`, alphas outer. Brute force runs when `n <= 12`.
pub fn gap_report(alphas: &[f64], ps: &[NormOrder]) -> Result<GapReport> {
    let mut rows = Vec::new();
    for &alpha in alphas {
        let inst = gen_gap(alpha)?;
        for &p in ps {
            let frac = gap_fractional(&inst, p)?;
            let brute = if inst.n() <= HARD_MAX_N {
                Some(brute_force_opt(&inst, p, HARD_MAX_N)?.0)
            } else {
                None
            };
            rows.push(GapRow {
                alpha,
                p,
                n: inst.n(),
                fractional_cost: frac.objective,
                integral_lb: INTEGRAL_LB,
                bruteforce_opt: brute,
                ratio: INTEGRAL_LB / frac.objective,
                triangle_residual: frac.max_triangle_residual,
            });
        }
    }
    let slopes = ps
        .iter()
        .filter_map(|&p| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.p == p)
                .map(|r| ((1.0 / r.alpha).ln(), r.ratio.ln()))
                .unzip();
            ls_slope(&xs, &ys).map(|slope| GapSlope {
                p,
                slope,
                expected: expected_exponent(p),
            })
        })
        .collect();
    Ok(GapReport { rows, slopes })
}

impl GapReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,p,n,fractional_cost,integral_lb,bruteforce_opt_or_null,ratio\n");
        for r in &self.rows {
            let brute = r.bruteforce_opt.map_or_else(|| "null".to_string(), |b| b.to_string());
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.alpha, r.p, r.n, r.fractional_cost, r.integral_lb, brute, r.ratio
            ));
        }
        out
    }
}
