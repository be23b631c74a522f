//! Subcommand drivers.

use std::path::{Path, PathBuf};
use std::time::Instant;

use asymcc_core::analysis::{
    check_f_claims, check_pi_properties, check_sampling_law, gap_report, metric_corpus, random_interval_set,
    twin_lattice, verify_cluster, verify_decomposition, verify_local_guarantee, DecompositionCheck,
};
use asymcc_core::instance::{gen_gap, gen_random, Instance, RandomSpec};
use asymcc_core::matrix::SquareMatrix;
use asymcc_core::partition::{
    beta_star, cluster_with_solution, partition_metric, ClusterConfig, Metric, Mode, PartitionParams,
};
use asymcc_core::relaxation::{solve_cp, FractionalSolution, SolverOptions};
use asymcc_core::rng;
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{check_input, check_output, check_outputs, emit, read_json, to_json, CliError, CliResult};

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen(g) => gen(g),
        Command::Solve(a) => solve(a),
        Command::Cluster(a) => cluster(a),
        Command::Verify(v) => verify(v),
        Command::Gap(a) => gap(a),
        Command::Bench(a) => bench(a),
    }
}

fn solver_json(o: &SolverOptions) -> Value {
    json!({
        "max_iters": o.max_iters,
        "step0": o.step0,
        "tol_residual": o.tol_residual,
        "tol_obj": o.tol_obj,
        "projection_rounds": o.projection_rounds,
    })
}

fn labels_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.labels.json"))
}

fn gen(g: GenCommand) -> CliResult<()> {
    match g {
        GenCommand::Gap { alpha, out } => {
            check_output(&out)?;
            let inst = gen_gap(alpha)?;
            inst.save(&out)?;
            eprintln!("wrote gap instance with n = {} to {}", inst.n(), out.display());
        }
        GenCommand::Random {
            n,
            alpha,
            k,
            flip,
            seed,
            out,
            labels,
        } => {
            let labels = labels.unwrap_or_else(|| labels_path(&out));
            check_output(&out)?;
            check_output(&labels)?;
            let (inst, planted) = gen_random(RandomSpec {
                n,
                alpha,
                planted_k: k,
                flip_prob: flip,
                seed,
            })?;
            inst.save(&out)?;
            emit(Some(&labels), &format!("{}\n", planted.to_json()))?;
            eprintln!("seed {seed}: wrote {} and {}", out.display(), labels.display());
        }
    }
    Ok(())
}

fn load_instance(path: &Path) -> CliResult<Instance> {
    check_input(path)?;
    let inst = Instance::load(path)?;
    Ok(inst)
}

fn solve(a: SolveArgs) -> CliResult<()> {
    check_outputs([&a.out])?;
    let inst = load_instance(&a.input)?;
    let opts = a.solver.options();
    let sol = solve_cp(&inst, a.p, &opts)?;
    let doc = json!({
        "header": {
            "command": "solve",
            "input": a.input.display().to_string(),
            "p": a.p,
            "n": inst.n(),
            "alpha": inst.alpha(),
            "solver": solver_json(&opts),
        },
        "solution": sol,
    });
    emit(a.out.as_deref(), &to_json(&doc))
}

/// `x` from a `solve` report, a bare solution, or a bare matrix.
fn read_x(path: &Path) -> CliResult<SquareMatrix> {
    check_input(path)?;
    let v = read_json(path)?;
    let rows = v
        .get("solution")
        .and_then(|s| s.get("x"))
        .or_else(|| v.get("x"))
        .unwrap_or(&v)
        .clone();
    serde_json::from_value(rows).map_err(|e| CliError::Usage(format!("{}: no distance matrix: {e}", path.display())))
}

fn read_metric(path: &Path) -> CliResult<Metric> {
    Ok(Metric::new(read_x(path)?)?)
}

struct Clustered {
    inst: Instance,
    header: Value,
    outcome: asymcc_core::partition::ClusterOutcome,
}

fn run_cluster(a: &ClusterArgs, command: &str) -> CliResult<Clustered> {
    check_outputs([&a.out, &a.trace])?;
    let inst = load_instance(&a.input)?;
    let cfg = ClusterConfig {
        p: a.p,
        solver: a.solver.options(),
        mode: a.decomp.mode,
        q: a.decomp.q,
        big_r: a.decomp.big_r,
        beta: a.decomp.beta,
        seed: a.seed,
    };
    let solution = match &a.x_in {
        Some(path) => {
            let x = read_x(path)?;
            FractionalSolution::from_x(&inst, &x, a.p)?
        }
        None => solve_cp(&inst, a.p, &cfg.solver)?,
    };
    let outcome = cluster_with_solution(&inst, solution, &cfg)?;
    let header = json!({
        "command": command,
        "input": a.input.display().to_string(),
        "x_in": a.x_in.as_ref().map(|p| p.display().to_string()),
        "seed": a.seed,
        "p": a.p,
        "mode": a.decomp.mode,
        "params": outcome.params,
        "beta_capped": outcome.beta_capped,
        "solver": solver_json(&cfg.solver),
    });
    if let Some(path) = &a.trace {
        let mut lines = String::new();
        for (i, sel) in outcome.trace.iter().enumerate() {
            let mut v = serde_json::to_value(sel).expect("selection serializes");
            v["iteration"] = json!(i);
            lines.push_str(&serde_json::to_string(&v).expect("selection serializes"));
            lines.push('\n');
        }
        emit(Some(path), &lines)?;
    }
    if outcome.beta_capped {
        eprintln!("warning: radii derived from alpha were capped (beta = {})", outcome.params.beta);
    }
    Ok(Clustered { inst, header, outcome })
}

fn cluster(a: ClusterArgs) -> CliResult<()> {
    let Clustered { inst, header, outcome } = run_cluster(&a, "cluster")?;
    let local = verify_local_guarantee(&inst, &outcome.solution.x, &outcome.clustering, &outcome.params)?;
    let cost = outcome.report.norm(a.p);
    let frac = outcome.solution.objective;
    let doc = json!({
        "header": header,
        "clustering": outcome.clustering,
        "num_clusters": outcome.clustering.num_clusters(),
        "cost": cost,
        "fractional_objective": frac,
        "cost_over_objective": if frac > 0.0 { json!(cost / frac) } else { Value::Null },
        "disagreements": outcome.report,
        "local": local,
    });
    emit(a.out.as_deref(), &to_json(&doc))
}

fn verify(v: VerifyCommand) -> CliResult<()> {
    match v {
        VerifyCommand::Cluster(a) => verify_decomp(a, false),
        VerifyCommand::Decomposition(a) => verify_decomp(a, true),
        VerifyCommand::Claims(a) => verify_claims(a),
        VerifyCommand::Pi(a) => verify_pi(a),
        VerifyCommand::Phi(a) => verify_phi(a),
        VerifyCommand::Local(a) => verify_local(a),
    }
}

fn default_beta(mode: Mode, q: f64) -> f64 {
    match mode {
        Mode::Practical => 0.05,
        Mode::Strict => beta_star(q) / 2.0,
    }
}

/// Emits the report, then fails with exit 1 when `failures` is nonempty.
fn finish(out: Option<&Path>, doc: &Value, failures: Vec<String>) -> CliResult<()> {
    emit(out, &to_json(doc))?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violation(failures.join("; ")))
    }
}

fn decomposition_failures(c: &DecompositionCheck, ratio_bound: f64, label: &str) -> Vec<String> {
    let mut f = Vec::new();
    if !c.diameter_ok {
        f.push(format!("{label}: cluster diameter {} exceeds 2R", c.max_diameter));
    }
    if c.point_shell_violations > 0 || c.cluster_shell_violations > 0 {
        f.push(format!(
            "{label}: shell inequality failed ({} points, {} clusters)",
            c.point_shell_violations, c.cluster_shell_violations
        ));
    }
    if c.strict_mu_violations > 0 {
        f.push(format!("{label}: {} light balls with mu(S) < R/2", c.strict_mu_violations));
    }
    if c.size_violations > 0 {
        f.push(format!("{label}: {} cluster-size bound failures", c.size_violations));
    }
    if c.phi_failures > 0 {
        f.push(format!("{label}: {} ball-growth bound failures", c.phi_failures));
    }
    f.extend(c.errors.iter().map(|e| format!("{label}: {e}")));
    if !(c.sep_ratio <= ratio_bound) {
        f.push(format!(
            "{label}: separation ratio {} above bound {ratio_bound}",
            c.sep_ratio
        ));
    }
    f
}

fn verify_decomp(a: DecompositionArgs, full: bool) -> CliResult<()> {
    check_outputs([&a.out])?;
    let beta = a.decomp.beta.unwrap_or_else(|| default_beta(a.decomp.mode, a.decomp.q));
    let params = PartitionParams::from_beta(beta, a.decomp.big_r, a.decomp.q, a.decomp.mode)?;
    let metrics = match &a.metric {
        Some(path) => vec![read_metric(path)?],
        None => metric_corpus(a.metrics, a.n, a.seed)?,
    };
    let checks: Vec<DecompositionCheck> = metrics
        .iter()
        .map(|m| {
            if full {
                verify_decomposition(m, &params, a.trials, a.seed)
            } else {
                verify_cluster(m, &params, a.trials, a.seed)
            }
        })
        .collect();
    let failures: Vec<String> = checks
        .iter()
        .enumerate()
        .flat_map(|(i, c)| decomposition_failures(c, a.ratio_bound, &format!("metric {i}")))
        .collect();
    let max_ratio = checks.iter().map(|c| c.sep_ratio).fold(0.0f64, f64::max);
    let name = if full { "verify decomposition" } else { "verify cluster" };
    let doc = json!({
        "header": {
            "command": name,
            "seed": a.seed,
            "n": metrics.first().map_or(0, Metric::n),
            "metrics": metrics.len(),
            "metric_file": a.metric.as_ref().map(|p| p.display().to_string()),
            "trials": a.trials,
            "params": params,
            "ratio_bound": a.ratio_bound,
        },
        "checks": checks,
        "summary": {
            "max_sep_ratio": max_ratio,
            "passed": failures.is_empty(),
            "failures": failures,
        },
    });
    finish(a.out.as_deref(), &doc, failures)
}

fn verify_claims(a: ClaimsArgs) -> CliResult<()> {
    check_outputs([&a.out])?;
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for &beta in &a.betas {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(CliError::Usage(format!("beta must lie in (0, 1), got {beta}")));
        }
        let params = PartitionParams::unchecked(beta * a.big_r, a.big_r, a.q, Mode::Practical);
        let pairs = (a.max_pairs > 0).then_some(a.max_pairs);
        let f = check_f_claims(&params, a.grid, pairs, a.seed);
        if !f.passed(a.identity_tol) {
            failures.push(format!(
                "beta {beta}: identity residual {}, {} increment violations",
                f.identity_residual, f.violations
            ));
        }
        let ks = (a.draws > 0).then(|| check_sampling_law(&params, a.draws, a.seed));
        if let Some(k) = &ks {
            if k.ks > a.ks_max {
                failures.push(format!("beta {beta}: KS distance {} above {}", k.ks, a.ks_max));
            }
        }
        rows.push(json!({ "f_claims": f, "sampling_law": ks }));
    }
    let doc = json!({
        "header": {
            "command": "verify claims",
            "seed": a.seed,
            "q": a.q,
            "R": a.big_r,
            "grid": a.grid,
            "max_pairs": a.max_pairs,
            "draws": a.draws,
            "ks_max": a.ks_max,
        },
        "betas": rows,
        "passed": failures.is_empty(),
    });
    finish(a.out.as_deref(), &doc, failures)
}

fn verify_pi(a: PiArgs) -> CliResult<()> {
    check_outputs([&a.out])?;
    if a.sets == 0 || a.max_intervals == 0 {
        return Err(CliError::Usage("--sets and --max-intervals must be positive".into()));
    }
    let mut r = rng::seeded(a.seed);
    let mut total = None::<asymcc_core::analysis::PiReport>;
    for i in 0..a.sets {
        let per = a.samples / a.sets + usize::from(i < a.samples % a.sets);
        let s = random_interval_set(&mut r, a.max_intervals, 0.0, 1.0);
        let rep = check_pi_properties(&s, per, 1.0, &mut r);
        match &mut total {
            Some(t) => t.merge(&rep),
            None => total = Some(rep),
        }
    }
    let rep = total.expect("at least one set");
    let failures = if rep.passed() {
        Vec::new()
    } else {
        vec![format!("compression map checks failed: {rep:?}")]
    };
    let doc = json!({
        "header": {
            "command": "verify pi",
            "seed": a.seed,
            "samples": a.samples,
            "sets": a.sets,
            "max_intervals": a.max_intervals,
        },
        "report": rep,
        "passed": failures.is_empty(),
    });
    finish(a.out.as_deref(), &doc, failures)
}

fn verify_phi(a: PhiArgs) -> CliResult<()> {
    check_outputs([&a.out])?;
    let beta = a.beta.unwrap_or_else(|| default_beta(Mode::Strict, a.q));
    let params = PartitionParams::from_beta(beta, a.big_r, a.q, Mode::Strict)?;
    let metric = match &a.metric {
        Some(path) => read_metric(path)?,
        None => twin_lattice(a.sites, a.spacing, params.r / 2.0)?,
    };
    let c = verify_decomposition(&metric, &params, a.trials, a.seed);
    let failures = decomposition_failures(&c, f64::INFINITY, "lattice");
    let doc = json!({
        "header": {
            "command": "verify phi",
            "seed": a.seed,
            "n": metric.n(),
            "trials": a.trials,
            "params": params,
        },
        "light_calls": c.light_calls,
        "phi_checks": c.phi_checks,
        "phi_failures": c.phi_failures,
        "phi_skipped": c.phi_skipped,
        "mu_s_min": c.mu_s_min,
        "strict_mu_violations": c.strict_mu_violations,
        "check": c,
        "passed": failures.is_empty(),
    });
    finish(a.out.as_deref(), &doc, failures)
}

fn verify_local(a: ClusterArgs) -> CliResult<()> {
    let Clustered { inst, header, outcome } = run_cluster(&a, "verify local")?;
    let rep = verify_local_guarantee(&inst, &outcome.solution.x, &outcome.clustering, &outcome.params)?;
    let failures = if rep.sound() {
        Vec::new()
    } else {
        vec![format!(
            "diameter {}, negative-edge {}, long-edge weight {}, long-edge count (alpha) {}",
            rep.diameter_violations, rep.negative_violations, rep.long_weight_violations, rep.long_count_alpha_violations
        )]
    };
    let doc = json!({
        "header": header,
        "report": rep,
        "passed": failures.is_empty(),
    });
    finish(a.out.as_deref(), &doc, failures)
}

fn gap(a: GapArgs) -> CliResult<()> {
    check_outputs([&a.out, &a.json])?;
    let rep = gap_report(&a.alphas, &a.ps)?;
    if let Some(path) = &a.json {
        emit(Some(path), &to_json(&rep))?;
    }
    emit(a.out.as_deref(), &rep.to_csv())
}

fn bench(a: BenchArgs) -> CliResult<()> {
    let t = Instant::now();
    let (inst, _) = gen_random(RandomSpec {
        n: a.n,
        alpha: a.alpha,
        planted_k: 3,
        flip_prob: 0.1,
        seed: a.seed,
    })?;
    let t_gen = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let opts = a.solver.options();
    let sol = solve_cp(&inst, a.p, &opts)?;
    let t_solve = t.elapsed().as_secs_f64();
    let cfg = ClusterConfig {
        p: a.p,
        solver: opts,
        seed: a.seed,
        ..ClusterConfig::default()
    };
    let (params, _) = asymcc_core::partition::params_for(&inst, &cfg)?;
    let metric = Metric::new(sol.x.clone())?;
    let t = Instant::now();
    for i in 0..a.trials {
        partition_metric(&metric.full_view(), &params, &mut rng::seeded(rng::trial_seed(a.seed, i as u64)))?;
    }
    let t_part = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let check = verify_decomposition(&metric, &params, a.trials, a.seed);
    let t_verify = t.elapsed().as_secs_f64();
    let doc = json!({
        "header": {
            "command": "bench",
            "seed": a.seed,
            "n": a.n,
            "alpha": a.alpha,
            "p": a.p,
            "trials": a.trials,
            "params": params,
            "solver": solver_json(&opts),
        },
        "seconds": {
            "generate": t_gen,
            "solve": t_solve,
            "partition_total": t_part,
            "partition_mean": t_part / a.trials.max(1) as f64,
            "verify_decomposition": t_verify,
        },
        "solver_iterations": sol.iterations,
        "objective": sol.objective,
        "always_ok": check.always_ok(),
    });
    emit(None, &to_json(&doc))
}
