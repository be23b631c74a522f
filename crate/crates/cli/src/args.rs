use std::path::PathBuf;

use asymcc_core::norm::NormOrder;
use asymcc_core::partition::Mode;
use asymcc_core::relaxation::SolverOptions;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "asymcc", version, about = "l_p correlation clustering with asymmetric errors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance file.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Solve the convex relaxation.
    Solve(SolveArgs),
    /// Solve and round to a clustering.
    Cluster(ClusterArgs),
    /// Run a property verifier.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Integrality-gap table for the weighted-path family, as CSV.
    Gap(GapArgs),
    /// Wall-clock time per pipeline phase.
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Weighted path with one negative edge.
    Gap {
        #[arg(long)]
        alpha: f64,
        #[arg(long, short = 'o')]
        out: PathBuf,
    },
    /// Planted partition with random sign flips.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        flip: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short = 'o')]
        out: PathBuf,
        /// Planted labels; defaults to `<out stem>.labels.json`.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long)]
    pub step0: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_residual: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_obj: f64,
    #[arg(long, default_value_t = 2)]
    pub projection_rounds: usize,
}

impl SolverArgs {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            max_iters: self.max_iters,
            step0: self.step0,
            tol_residual: self.tol_residual,
            tol_obj: self.tol_obj,
            projection_rounds: self.projection_rounds,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, short = 'i')]
    pub input: PathBuf,
    #[arg(long, short = 'p', default_value = "1")]
    pub p: NormOrder,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DecompArgs {
    #[arg(long, default_value = "practical")]
    pub mode: Mode,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub big_r: f64,
    /// Fixes `beta = r/R` instead of deriving it.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long, short = 'i')]
    pub input: PathBuf,
    #[arg(long, short = 'p', default_value = "1")]
    pub p: NormOrder,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub decomp: DecompArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Fractional solution (from `solve`, or a bare distance matrix) to round
    /// instead of solving.
    #[arg(long)]
    pub x_in: Option<PathBuf>,
    /// One JSON object per cluster-selection step.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Single cluster selection on random metrics.
    Cluster(DecompositionArgs),
    /// Full partitions on random metrics.
    Decomposition(DecompositionArgs),
    /// Tail identity, increment bound and sampling law of the radius CDF.
    Claims(ClaimsArgs),
    /// Compression map of random radius sets.
    Pi(PiArgs),
    /// Ball-growth bound at light pivots in the strict regime.
    Phi(PhiArgs),
    /// Per-vertex bounds on an end-to-end run.
    Local(ClusterArgs),
}

#[derive(Debug, Args)]
pub struct DecompositionArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Number of random metrics.
    #[arg(long, default_value_t = 1)]
    pub metrics: usize,
    /// Distance matrix (JSON rows) used instead of random metrics.
    #[arg(long)]
    pub metric: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub decomp: DecompArgs,
    /// Largest accepted separation ratio.
    #[arg(long, default_value_t = 100.0)]
    pub ratio_bound: f64,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClaimsArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.01")]
    pub betas: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub big_r: f64,
    #[arg(long, default_value_t = 2001)]
    pub grid: usize,
    /// Pairs drawn from the grid; 0 sweeps all of them.
    #[arg(long, default_value_t = 100_000)]
    pub max_pairs: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub identity_tol: f64,
    /// Radius draws for the KS check; 0 skips it.
    #[arg(long, default_value_t = 1_000_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 0.002)]
    pub ks_max: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PiArgs {
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 100)]
    pub sets: usize,
    #[arg(long, default_value_t = 20)]
    pub max_intervals: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    /// Twin-lattice sites (each with a partner at distance r/2).
    #[arg(long, default_value_t = 51)]
    pub sites: usize,
    #[arg(long, default_value_t = 0.02)]
    pub spacing: f64,
    /// Distance matrix (JSON rows) used instead of the lattice.
    #[arg(long)]
    pub metric: Option<PathBuf>,
    /// Defaults to half the largest strict-regime value.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub big_r: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.0625,0.015625,0.00390625,0.0009765625")]
    pub alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,inf")]
    pub ps: Vec<NormOrder>,
    /// CSV table; stdout when absent.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Full report with fitted slopes.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    #[arg(long, default_value = "0.25")]
    pub alpha: f64,
    #[arg(long, short = 'p', default_value = "1")]
    pub p: NormOrder,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_norms() {
        let cli = Cli::try_parse_from(["asymcc", "gap", "--alphas", "0.0625,0.015625", "--ps", "1,inf"]).unwrap();
        match cli.command {
            Command::Gap(g) => {
                assert_eq!(g.alphas, vec![0.0625, 0.015625]);
                assert_eq!(g.ps, vec![NormOrder::ONE, NormOrder::Infinity]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_norm() {
        assert!(Cli::try_parse_from(["asymcc", "solve", "--input", "x", "-p", "0.5"]).is_err());
    }

    #[test]
    fn verify_defaults() {
        let cli = Cli::try_parse_from(["asymcc", "verify", "decomposition"]).unwrap();
        match cli.command {
            Command::Verify(VerifyCommand::Decomposition(a)) => {
                assert_eq!(a.n, 100);
                assert_eq!(a.trials, 10_000);
                assert_eq!(a.ratio_bound, 100.0);
                assert_eq!(a.decomp.mode, Mode::Practical);
            }
            other => panic!("{other:?}"),
        }
    }
}
