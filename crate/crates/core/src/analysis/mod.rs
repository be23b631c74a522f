//! Disagreement accounting, exhaustive oracles and guarantee verifiers.

pub mod brute;
pub mod claims;
pub mod corpus;
pub mod decomposition;
pub mod disagreement;
pub mod gap;
pub mod local;
pub mod phi;

pub use brute::{bell, brute_force_opt, DEFAULT_MAX_N, HARD_MAX_N};
pub use claims::{
    check_f_claims, check_pi_properties, check_sampling_law, ks_statistic, FClaimsReport, PiReport, SamplingLawReport,
};
pub use corpus::{euclidean_metric, metric_corpus, random_interval_set, twin_lattice};
pub use decomposition::{hoeffding_epsilon, verify_cluster, verify_decomposition, DecompositionCheck};
pub use disagreement::{disagreement_vector, disagreements, DisagreementReport};
pub use gap::{gap_report, GapReport, GapRow, GapSlope};
pub use local::{verify_local_guarantee, LocalGuaranteeReport};
pub use phi::{check_phi_bound, PhiCheck};
