//! Deterministic per-vertex bounds for a finished clustering.

use serde::Serialize;

use crate::analysis::disagreement::disagreement_vector;
use crate::error::Result;
use crate::instance::{Clustering, Instance};
use crate::matrix::SquareMatrix;
use crate::partition::PartitionParams;
use crate::relaxation::eval_y;

/// Relative slack for floating-point comparisons in the bound checks.
const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalGuaranteeReport {
    pub a1: f64,
    pub a_inf: f64,
    pub y: Vec<f64>,
    pub dis: Vec<f64>,
    /// `dis_u / y_u` (0 when both vanish, infinite when only `y_u` does).
    pub ratios: Vec<f64>,
    pub max_ratio_over_a_inf: f64,
    pub mean_ratio_over_a1: f64,
    /// Clusters whose diameter under `x` exceeds `2R`.
    pub diameter_violations: usize,
    /// Vertices where uncut negative weight exceeds `y_u / (1 - 2R)`.
    pub negative_violations: usize,
    /// Vertices where the positive weight on edges with `x >= r` exceeds `y_u / r`.
    pub long_weight_violations: usize,
    /// Vertices where the number of positive edges with `x >= r` exceeds `y_u / r`.
    pub long_count_violations: usize,
    /// Same count against `y_u / (alpha r)`, with weights in units of `w`.
    pub long_count_alpha_violations: usize,
}

pub fn verify_local_guarantee(
    inst: &Instance,
    x: &SquareMatrix,
    c: &Clustering,
    params: &PartitionParams,
) -> Result<LocalGuaranteeReport> {
    let n = inst.n();
    let alpha = inst.alpha();
    let a1 = (1.0 / alpha).ln();
    let a_inf = a1 / alpha.sqrt();
    let y = eval_y(inst, x)?;
    let dis = disagreement_vector(inst, c)?;
    let r = params.r;
    let two_r = 2.0 * params.big_r;
    let scale = inst.w_scale();

    let mut diameter_violations = 0;
    for members in c.clusters() {
        let too_wide = members
            .iter()
            .any(|&u| members.iter().any(|&v| x.get(u, v) > two_r * (1.0 + SLACK)));
        diameter_violations += usize::from(too_wide);
    }

    let mut negative_violations = 0;
    let mut long_weight_violations = 0;
    let mut long_count_violations = 0;
    let mut long_count_alpha_violations = 0;
    for u in 0..n {
        let mut neg_uncut = 0.0;
        let mut long_weight = 0.0;
        let mut long_count = 0usize;
        for v in 0..n {
            if v == u {
                continue;
            }
            if inst.is_positive(u, v) {
                if x.get(u, v) >= r {
                    long_weight += inst.weight(u, v);
                    long_count += 1;
                }
            } else if c.same(u, v) {
                neg_uncut += inst.weight(u, v);
            }
        }
        let yu = y[u];
        let tol = SLACK * yu.max(1e-300);
        if neg_uncut > yu / (1.0 - two_r) + tol {
            negative_violations += 1;
        }
        if long_weight > yu / r + tol / r {
            long_weight_violations += 1;
        }
        if long_count as f64 > yu / r + tol / r {
            long_count_violations += 1;
        }
        if (long_count as f64) * alpha * scale > yu / r + tol / r {
            long_count_alpha_violations += 1;
        }
    }

    let ratios: Vec<f64> = dis
        .iter()
        .zip(&y)
        .map(|(&d, &yu)| match (d > 0.0, yu > 0.0) {
            (false, _) => 0.0,
            (true, true) => d / yu,
            (true, false) => f64::INFINITY,
        })
        .collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let mean_ratio = if n == 0 { 0.0 } else { ratios.iter().sum::<f64>() / n as f64 };
    Ok(LocalGuaranteeReport {
        a1,
        a_inf,
        y,
        dis,
        ratios,
        max_ratio_over_a_inf: max_ratio / a_inf,
        mean_ratio_over_a1: mean_ratio / a1,
        diameter_violations,
        negative_violations,
        long_weight_violations,
        long_count_violations,
        long_count_alpha_violations,
    })
}

impl LocalGuaranteeReport {
    /// True when every bound that follows from the weight model holds.
    pub fn sound(&self) -> bool {
        self.diameter_violations == 0
            && self.negative_violations == 0
            && self.long_weight_violations == 0
            && self.long_count_alpha_violations == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_random, RandomSpec, Sign};
    use crate::partition::Mode;
    use crate::relaxation::integral_x;

    fn params() -> PartitionParams {
        PartitionParams::from_beta(0.02, 1.0 / 3.0, 2.0, Mode::Practical).unwrap()
    }

    #[test]
    fn planted_noiseless_all_zero() {
        let spec = RandomSpec {
            n: 6,
            alpha: 0.25,
            planted_k: 2,
            flip_prob: 0.0,
            seed: 1,
        };
        let (g, c) = gen_random(spec).unwrap();
        let rep = verify_local_guarantee(&g, &integral_x(&c), &c, &params()).unwrap();
        assert!(rep.ratios.iter().all(|&r| r == 0.0));
        assert!(rep.sound());
        assert_eq!(rep.long_count_violations, 0);
    }

    #[test]
    fn constants_from_alpha() {
        let g = Instance::from_fn(2, 0.25, 1.0, |_, _| (Sign::Positive, 1.0)).unwrap();
        let rep = verify_local_guarantee(&g, &SquareMatrix::zeros(2), &Clustering::single(2), &params()).unwrap();
        assert_eq!(rep.a1, 4f64.ln());
        assert_eq!(rep.a_inf, 4f64.ln() / 0.5);
    }

    #[test]
    fn light_long_edges_break_count_form_only() {
        // three light positive edges of length 1 around vertex 0 in a metric
        // where r is 0.5: y_0 = 3 * 0.1, so y_0 / r = 0.6 < 3 edges
        let g = Instance::from_fn(4, 0.1, 1.0, |_, _| (Sign::Positive, 0.1)).unwrap();
        let x = SquareMatrix::from_fn(4, |u, v| if u == v { 0.0 } else { 1.0 });
        let p = PartitionParams::unchecked(0.5, 1.0 / 3.0, 2.0, Mode::Practical);
        let rep = verify_local_guarantee(&g, &x, &Clustering::singletons(4), &p).unwrap();
        assert_eq!(rep.long_count_violations, 4);
        assert_eq!(rep.long_weight_violations, 0);
        assert_eq!(rep.long_count_alpha_violations, 0);
    }
}
