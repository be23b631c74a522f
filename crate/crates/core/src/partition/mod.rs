//! Probabilistic low-diameter decomposition of a finite metric.

mod driver;
mod intervals;
mod metric;
mod params;
mod select;

pub use driver::{cluster_instance, cluster_with_solution, params_for, ClusterConfig, ClusterOutcome};
pub use intervals::{next_down, IntervalSet};
pub use metric::{Metric, MetricView, METRIC_TOL};
pub use params::{
    alpha_radius, alpha_star, beta_practical, beta_star, derive_params, strict_constraints, Mode,
    PartitionParams,
};
pub use select::{
    cluster_select, compute_s, f_cdf, f_inverse, is_heavy, partition_metric, partition_metric_observed,
    sample_preimage,
    sample_radius, select_pivot, shell_violations, RadiusDraw, Selection,
};
