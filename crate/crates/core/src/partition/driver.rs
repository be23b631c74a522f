//! End-to-end pipeline: relaxation, metric repair, decomposition.

use serde::Serialize;

use crate::analysis::disagreement::{disagreements, DisagreementReport};
use crate::error::Result;
use crate::instance::{Clustering, Instance};
use crate::norm::NormOrder;
use crate::partition::{derive_params, partition_metric, Metric, Mode, PartitionParams, Selection};
use crate::relaxation::{project_metric, solve_cp, FractionalSolution, SolverOptions};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusterConfig {
    pub p: NormOrder,
    pub solver: SolverOptions,
    pub mode: Mode,
    pub q: f64,
    pub big_r: f64,
    /// Overrides the radius derived from `alpha`.
    pub beta: Option<f64>,
    pub seed: u64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            p: NormOrder::ONE,
            solver: SolverOptions::default(),
            mode: Mode::Practical,
            q: 2.0,
            big_r: 1.0 / 3.0,
            beta: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterOutcome {
    pub clustering: Clustering,
    pub solution: FractionalSolution,
    pub report: DisagreementReport,
    pub params: PartitionParams,
    /// `beta` was capped or `alpha` clamped when deriving the radii.
    pub beta_capped: bool,
    pub trace: Vec<Selection>,
}

/// Radii for `inst` under `cfg`.
pub fn params_for(inst: &Instance, cfg: &ClusterConfig) -> Result<(PartitionParams, bool)> {
    match cfg.beta {
        Some(b) => Ok((PartitionParams::from_beta(b, cfg.big_r, cfg.q, cfg.mode)?, false)),
        None => derive_params(inst.alpha(), cfg.q, cfg.big_r, cfg.mode),
    }
}

/// Solves the relaxation and rounds it.
pub fn cluster_instance(inst: &Instance, cfg: &ClusterConfig) -> Result<ClusterOutcome> {
    let solution = solve_cp(inst, cfg.p, &cfg.solver)?;
    cluster_with_solution(inst, solution, cfg)
}

/// Rounds a given fractional point.
pub fn cluster_with_solution(
    inst: &Instance,
    solution: FractionalSolution,
    cfg: &ClusterConfig,
) -> Result<ClusterOutcome> {
    let (params, beta_capped) = params_for(inst, cfg)?;
    let metric = Metric::new(project_metric(&solution.x))?;
    let (clustering, trace) = partition_metric(&metric.full_view(), &params, &mut rng::seeded(cfg.seed))?;
    let report = disagreements(inst, &clustering, cfg.p)?;
    Ok(ClusterOutcome {
        clustering,
        solution,
        report,
        params,
        beta_capped,
        trace,
    })
}
