//! The `ranklim` command-line interface.
//!
//! One binary dispatches the whole pipeline: `graphgen`, `pagerank`, `wbp`
//! (weighted branching process / fixed-point simulation), `stats`, and
//! `experiment`. Every subcommand takes all randomness from `--seed`, and
//! each run writes a manifest JSON recording the exact command line, the
//! seed, a config digest, and timestamps; JSON outputs embed the digest so
//! artifacts can be traced back to the run that produced them.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::branching::{
    population_dynamics, sample_r_star, simulate_tree_rank, BranchingLaw, TreeRank,
    DEFAULT_NODE_BUDGET,
};
use crate::experiments::{
    run_convergence, run_tail, run_venn, ExperimentConfig, SimulationSizes,
};
use crate::graphgen::{
    build_dcm, build_ird, read_graph, sample_attributes, write_graph, AttributeKind,
    AttributeSequenceConfig, DcmBuild, DcmMode, Dependence, GraphHeader, ModelTag,
};
use crate::pagerank::{compute_pagerank, compute_pagerank_tol};
use crate::rng::StreamKey;
use crate::stats::{hill_index, wasserstein1, EmpiricalDistribution};

#[derive(Debug)]
enum CliError {
    /// Bad flags or malformed configuration: exit 1.
    Validation(String),
    /// Failures while running: exit 2.
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ranklim",
    version,
    about = "Generalized PageRank on scale-free random digraphs: generation, ranking, limits, diagnostics"
)]
struct Cli {
    /// Worker threads for parallel sections (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random digraph and write it as CSV + JSON header.
    Graphgen(GraphgenArgs),
    /// Compute scale-free PageRank on a stored graph.
    Pagerank(PagerankArgs),
    /// Simulate the limiting branching-process laws and sample R*.
    Wbp(WbpArgs),
    /// Empirical-distribution statistics.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Config-driven experiment harness.
    Experiment(ExperimentArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModelArg {
    Dcm,
    Ird,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Multigraph,
    Repeated,
    Erased,
}

impl From<ModeArg> for DcmMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Multigraph => DcmMode::Multigraph,
            ModeArg::Repeated => DcmMode::Repeated,
            ModeArg::Erased => DcmMode::Erased,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DependenceArg {
    Independent,
    Power,
}

impl From<DependenceArg> for Dependence {
    fn from(d: DependenceArg) -> Self {
        match d {
            DependenceArg::Independent => Dependence::Independent,
            DependenceArg::Power => Dependence::PowerCoupled,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ThetaArg {
    Empirical,
    Analytic,
}

#[derive(Args, Debug)]
struct GraphgenArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// DCM pairing variant (ignored for IRD).
    #[arg(long, value_enum, default_value_t = ModeArg::Multigraph)]
    mode: ModeArg,
    #[arg(long)]
    n: usize,
    /// In-side Pareto index.
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    /// In-side Pareto scale.
    #[arg(long, default_value_t = 8.0)]
    b: f64,
    /// Out-side Pareto index.
    #[arg(long, default_value_t = 2.5)]
    beta: f64,
    /// Out-side Pareto scale.
    #[arg(long, default_value_t = 12.0)]
    cscale: f64,
    #[arg(long, value_enum, default_value_t = DependenceArg::Independent)]
    dependence: DependenceArg,
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    /// Personalization value Q_i (default 1 - damping).
    #[arg(long)]
    q: Option<f64>,
    /// Weight zeta_i (default damping).
    #[arg(long)]
    zeta: Option<f64>,
    /// Kernel constant for the IRD edge probabilities.
    #[arg(long, value_enum, default_value_t = ThetaArg::Empirical)]
    theta_mode: ThetaArg,
    #[arg(long, default_value_t = 100)]
    max_attempts: u32,
    #[arg(long)]
    seed: u64,
    /// Output path prefix.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PagerankArgs {
    /// Path prefix of a stored graph.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    #[arg(long, default_value_t = 30)]
    iters: u32,
    /// Pick the smallest iteration count whose error bound meets this
    /// tolerance instead of using --iters.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct WbpArgs {
    #[arg(long, value_enum)]
    law: ModelArg,
    /// Attribute CSV path, or the literal `analytic`.
    #[arg(long)]
    source: String,
    #[arg(long, default_value_t = 100_000)]
    pool: usize,
    #[arg(long, default_value_t = 20)]
    gens: u32,
    /// Number of R* samples to draw.
    #[arg(long, default_value_t = 100_000)]
    rstar: usize,
    /// Tree depth for the explicit tree-rank samples.
    #[arg(long, default_value_t = 30)]
    depth: u32,
    /// Number of explicit tree-rank samples (0 = skip).
    #[arg(long, default_value_t = 0)]
    tree: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Analytic-law population size for the DCM (synthetic attribute draws).
    #[arg(long, default_value_t = 200_000)]
    population: usize,
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    #[arg(long, default_value_t = 8.0)]
    b: f64,
    #[arg(long, default_value_t = 2.5)]
    beta: f64,
    #[arg(long, default_value_t = 12.0)]
    cscale: f64,
    #[arg(long, value_enum, default_value_t = DependenceArg::Independent)]
    dependence: DependenceArg,
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    #[arg(long, value_enum, default_value_t = ThetaArg::Empirical)]
    theta_mode: ThetaArg,
}

#[derive(Subcommand, Debug)]
enum StatsCommand {
    /// Wasserstein-1 distance between two sample files.
    W1 {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hill tail-index estimate of a sample file.
    Hill {
        #[arg(long = "in")]
        input: PathBuf,
        /// Fraction of the sample used as the tail window.
        #[arg(long, default_value_t = 0.025)]
        k_frac: f64,
        /// Explicit order-statistics count (overrides --k-frac).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExperimentKind {
    Venn,
    Convergence,
    Tail,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(value_enum)]
    kind: ExperimentKind,
    /// JSON config file mirroring the experiment configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV emission prefix for plotting.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Run manifest written next to every output artifact.
#[derive(Serialize)]
struct RunManifest {
    command: Vec<String>,
    master_seed: Option<u64>,
    config_digest: String,
    started_at_unix_ms: u128,
    finished_at_unix_ms: u128,
    versions: BTreeMap<String, String>,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn digest_of(command: &[String], seed: Option<u64>) -> String {
    let mut hasher = Sha256::new();
    for part in command {
        hasher.update(part.as_bytes());
        hasher.update([0x1f]);
    }
    if let Some(s) = seed {
        hasher.update(s.to_le_bytes());
    }
    let bytes = hasher.finalize();
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// `out/ranks.csv -> out/ranks.manifest.json`, `out/g -> out/g.manifest.json`.
fn manifest_path(out: &Path) -> PathBuf {
    let stem = out.with_extension("");
    let mut name = stem.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    stem.with_file_name(name)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.with_extension("");
    let mut name = stem.file_name().unwrap_or_default().to_os_string();
    name.push(".json");
    stem.with_file_name(name)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Runtime(format!("creating {}: {e}", dir.display())))?;
        }
    }
    let json = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("serializing JSON: {e}")))?;
    fs::write(path, json + "\n")
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
}

fn write_manifest(
    out: &Path,
    command: &[String],
    seed: Option<u64>,
    started_at: u128,
) -> Result<String, CliError> {
    let digest = digest_of(command, seed);
    let manifest = RunManifest {
        command: command.to_vec(),
        master_seed: seed,
        config_digest: digest.clone(),
        started_at_unix_ms: started_at,
        finished_at_unix_ms: now_ms(),
        versions: BTreeMap::from([(
            "ranklim".to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        )]),
    };
    write_json(&manifest_path(out), &manifest)?;
    Ok(digest)
}

/// Parse a flat sample file: one value per line, optional header, multi-
/// column rows use the last column.
fn read_samples(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("reading {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if idx == 0 => continue, // header
            Err(e) => {
                return Err(CliError::Validation(format!(
                    "{}:{}: expected a number, got {field:?} ({e})",
                    path.display(),
                    idx + 1
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: no samples found",
            path.display()
        )));
    }
    Ok(out)
}

/// Parse and run; returns the process exit status without exiting, so the
/// dispatcher is callable in-process.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let command_strings: Vec<String> = argv
        .iter()
        .map(|s| s.to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build();
    let run = || match cli.command {
        Command::Graphgen(args) => run_graphgen(&args, &command_strings),
        Command::Pagerank(args) => run_pagerank(&args, &command_strings),
        Command::Wbp(args) => run_wbp(&args, &command_strings),
        Command::Stats(args) => run_stats(&args, &command_strings),
        Command::Experiment(args) => run_experiment(&args, &command_strings),
    };
    let outcome = match pool {
        Ok(pool) => pool.install(run),
        Err(e) => Err(CliError::Validation(format!("worker pool: {e}"))),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn run_graphgen(args: &GraphgenArgs, command: &[String]) -> Result<(), CliError> {
    let started = now_ms();
    let config = AttributeSequenceConfig {
        n: args.n,
        alpha: args.alpha,
        b: args.b,
        beta: args.beta,
        c_scale: args.cscale,
        dependence: args.dependence.into(),
        q_value: args.q.unwrap_or(1.0 - args.damping),
        zeta_value: args.zeta.unwrap_or(args.damping),
        damping: args.damping,
    };
    config
        .validate()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let key = StreamKey::new(args.seed);
    let (graph, theta, exhausted) = match args.model {
        ModelArg::Dcm => {
            let attrs =
                sample_attributes(&config, AttributeKind::DcmDegrees, &mut key.child(0).rng())
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
            match build_dcm(attrs, args.mode.into(), &mut key.child(1).rng(), args.max_attempts)
                .map_err(|e| CliError::Runtime(e.to_string()))?
            {
                DcmBuild::Built(g) => (g, None, false),
                DcmBuild::AttemptsExhausted { last, .. } => (last, None, true),
            }
        }
        ModelArg::Ird => {
            let attrs =
                sample_attributes(&config, AttributeKind::IrdWeights, &mut key.child(0).rng())
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
            let theta = match args.theta_mode {
                ThetaArg::Analytic => config.analytic_theta(),
                ThetaArg::Empirical => {
                    attrs.iter().map(|a| a.in_param + a.out_param).sum::<f64>()
                        / attrs.len() as f64
                }
            };
            let g = build_ird(attrs, theta, &mut key.child(1).rng())
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            (g, Some(theta), false)
        }
    };
    let digest = write_manifest(&args.out, command, Some(args.seed), started)?;
    let header = GraphHeader {
        model_tag: graph.model_tag(),
        n: graph.vertex_count(),
        edge_count: graph.edge_count(),
        seed: Some(args.seed),
        config: Some(config),
        theta,
        manifest_digest: Some(digest),
    };
    write_graph(&args.out, &graph, &header).map_err(|e| CliError::Runtime(e.to_string()))?;
    if exhausted {
        return Err(CliError::Runtime(format!(
            "repeated DCM found no simple pairing in {} attempts; \
             the last multigraph was written to {} (model_tag {:?})",
            args.max_attempts,
            args.out.display(),
            ModelTag::DcmMultigraph,
        )));
    }
    println!(
        "graphgen: n={} edges={} -> {}",
        graph.vertex_count(),
        graph.edge_count(),
        args.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct RankSidecar {
    iterations: u32,
    residual_bound: f64,
    damping: f64,
    n: usize,
    manifest_digest: String,
}

fn run_pagerank(args: &PagerankArgs, command: &[String]) -> Result<(), CliError> {
    let started = now_ms();
    let (graph, _header) =
        read_graph(&args.graph).map_err(|e| CliError::Runtime(e.to_string()))?;
    let ranks = match args.tol {
        Some(tol) => compute_pagerank_tol(&graph, args.damping, tol),
        None => compute_pagerank(&graph, args.damping, args.iters),
    }
    .map_err(|e| CliError::Validation(e.to_string()))?;
    let digest = write_manifest(&args.out, command, None, started)?;
    if let Some(dir) = args.out.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::Runtime(e.to_string()))?;
        }
    }
    let mut writer =
        csv::Writer::from_path(&args.out).map_err(|e| CliError::Runtime(e.to_string()))?;
    writer
        .write_record(["vertex", "rank"])
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    for (v, r) in ranks.values.iter().enumerate() {
        writer
            .write_record([v.to_string(), r.to_string()])
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::Runtime(e.to_string()))?;
    write_json(
        &sidecar_path(&args.out),
        &RankSidecar {
            iterations: ranks.iterations,
            residual_bound: ranks.residual_bound,
            damping: ranks.damping,
            n: ranks.values.len(),
            manifest_digest: digest,
        },
    )?;
    println!(
        "pagerank: k={} residual_bound={:.3e} -> {}",
        ranks.iterations,
        ranks.residual_bound,
        args.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct WbpSidecar {
    provenance: String,
    rho1_estimate: f64,
    pool_size: usize,
    generations: u32,
    pool_mean: f64,
    pool_variance: f64,
    r_star_samples: usize,
    r_star_mean: f64,
    tree_samples: usize,
    tree_budget_exceeded: usize,
    manifest_digest: String,
}

fn run_wbp(args: &WbpArgs, command: &[String]) -> Result<(), CliError> {
    let started = now_ms();
    let config = AttributeSequenceConfig {
        n: args.population.max(1),
        alpha: args.alpha,
        b: args.b,
        beta: args.beta,
        c_scale: args.cscale,
        dependence: args.dependence.into(),
        q_value: 1.0 - args.damping,
        zeta_value: args.damping,
        damping: args.damping,
    };
    let key = StreamKey::new(args.seed);
    let law = if args.source == "analytic" {
        config
            .validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        match args.law {
            ModelArg::Ird => BranchingLaw::from_ird_config(&config)
                .map_err(|e| CliError::Validation(e.to_string()))?,
            ModelArg::Dcm => {
                BranchingLaw::from_dcm_config(&config, args.population, &mut key.child(0).rng())
                    .map_err(|e| CliError::Validation(e.to_string()))?
            }
        }
    } else {
        let attrs = crate::graphgen::read_attributes(Path::new(&args.source))
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        match args.law {
            ModelArg::Dcm => BranchingLaw::from_dcm_attrs(&attrs)
                .map_err(|e| CliError::Validation(e.to_string()))?,
            ModelArg::Ird => {
                let theta = match args.theta_mode {
                    ThetaArg::Analytic => config.analytic_theta(),
                    ThetaArg::Empirical => {
                        attrs.iter().map(|a| a.in_param + a.out_param).sum::<f64>()
                            / attrs.len() as f64
                    }
                };
                BranchingLaw::from_ird_attrs(&attrs, theta)
                    .map_err(|e| CliError::Validation(e.to_string()))?
            }
        }
    };
    let pool = population_dynamics(&law, args.pool, args.gens, key.child(1))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let r_star = sample_r_star(&law, &pool, args.rstar, key.child(2))
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let digest = write_manifest(&args.out, command, Some(args.seed), started)?;
    if let Some(dir) = args.out.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::Runtime(e.to_string()))?;
        }
    }
    let body: String = r_star
        .sorted()
        .iter()
        .map(|v| format!("{v}\n"))
        .collect();
    fs::write(&args.out, body).map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut tree_exceeded = 0usize;
    if args.tree > 0 {
        let mut rng = key.child(3).rng();
        let mut values = Vec::with_capacity(args.tree);
        for _ in 0..args.tree {
            match simulate_tree_rank(&law, args.depth, &mut rng, args.node_budget) {
                TreeRank::Rank(r) => values.push(r),
                TreeRank::BudgetExceeded { .. } => tree_exceeded += 1,
            }
        }
        let stem = args.out.with_extension("");
        let mut name = stem.file_name().unwrap_or_default().to_os_string();
        name.push("_tree.csv");
        let tree_path = stem.with_file_name(name);
        let body: String = values.iter().map(|v| format!("{v}\n")).collect();
        fs::write(&tree_path, body).map_err(|e| CliError::Runtime(e.to_string()))?;
    }

    write_json(
        &sidecar_path(&args.out),
        &WbpSidecar {
            provenance: format!("{:?}", law.provenance()),
            rho1_estimate: pool.rho1_estimate,
            pool_size: pool.samples.len(),
            generations: pool.generations,
            pool_mean: pool.mean(),
            pool_variance: pool.variance(),
            r_star_samples: r_star.count(),
            r_star_mean: r_star.mean(),
            tree_samples: args.tree,
            tree_budget_exceeded: tree_exceeded,
            manifest_digest: digest,
        },
    )?;
    println!(
        "wbp: rho1~{:.3} pool_mean={:.4} r_star_mean={:.4} -> {}",
        pool.rho1_estimate,
        pool.mean(),
        r_star.mean(),
        args.out.display()
    );
    Ok(())
}

fn run_stats(cmd: &StatsCommand, command: &[String]) -> Result<(), CliError> {
    let started = now_ms();
    match cmd {
        StatsCommand::W1 { a, b, out } => {
            let da = EmpiricalDistribution::new(read_samples(a)?)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let db = EmpiricalDistribution::new(read_samples(b)?)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let value = wasserstein1(&da, &db);
            let mut report = serde_json::json!({
                "w1": value,
                "a_count": da.count(),
                "b_count": db.count(),
            });
            if let Some(out) = out {
                let digest = write_manifest(out, command, None, started)?;
                report["manifest_digest"] = serde_json::json!(digest);
                write_json(out, &report)?;
            }
            println!("{report}");
        }
        StatsCommand::Hill {
            input,
            k_frac,
            k,
            out,
        } => {
            let d = EmpiricalDistribution::new(read_samples(input)?)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            if !(k.is_some() || (*k_frac > 0.0 && *k_frac < 1.0)) {
                return Err(CliError::Validation(format!(
                    "k_frac must lie in (0,1), got {k_frac}"
                )));
            }
            let k_used = k.unwrap_or_else(|| {
                ((*k_frac * d.count() as f64).ceil() as usize)
                    .clamp(1, d.count().saturating_sub(1))
            });
            let report = hill_index(&d, k_used)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let mut json = serde_json::json!({
                "hill_index": report.hill_index,
                "k_used": report.k_used,
                "count": d.count(),
            });
            if let Some(out) = out {
                let digest = write_manifest(out, command, None, started)?;
                json["manifest_digest"] = serde_json::json!(digest);
                write_json(out, &json)?;
            }
            println!("{json}");
        }
    }
    Ok(())
}

/// Experiment config file: the experiment configuration plus optional
/// simulation knobs for the convergence and tail studies.
#[derive(serde::Deserialize, Debug)]
struct ExperimentFile {
    #[serde(flatten)]
    config: ExperimentConfig,
    #[serde(default)]
    ns: Option<Vec<usize>>,
    #[serde(default)]
    sim: Option<SimulationSizes>,
    #[serde(default)]
    mc_draws: Option<usize>,
    #[serde(default)]
    grid: Option<Vec<f64>>,
}

fn run_experiment(args: &ExperimentArgs, command: &[String]) -> Result<(), CliError> {
    let started = now_ms();
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Validation(format!("reading {}: {e}", args.config.display())))?;
    let file: ExperimentFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("config {}: {e}", args.config.display())))?;
    file.config
        .validate()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let digest = write_manifest(&args.out, command, Some(file.config.seed), started)?;
    let sim = file.sim.unwrap_or_default();
    match args.kind {
        ExperimentKind::Venn => {
            let result = run_venn(&file.config).map_err(|e| CliError::Runtime(e.to_string()))?;
            let report = serde_json::json!({
                "experiment": "venn",
                "config": file.config,
                "result": result,
                "manifest_digest": digest,
            });
            write_json(&args.out, &report)?;
            if let Some(prefix) = &args.csv {
                let mut rows = String::from("replication,label,count\n");
                for (r, rep) in result.per_replication.iter().enumerate() {
                    for (label, count) in rep.cells.iter().chain(rep.h_cells.iter()) {
                        rows.push_str(&format!("{r},{label},{count}\n"));
                    }
                }
                fs::write(prefix.with_extension("cells.csv"), rows)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
            }
            println!(
                "venn: reps={} a&b&C={:.2}% none={:.2}% -> {}",
                result.replications,
                result.cell("a&b&C"),
                result.cell("none"),
                args.out.display()
            );
        }
        ExperimentKind::Convergence => {
            let ns = file.ns.unwrap_or_else(|| vec![100, 1000, 10_000]);
            let points = run_convergence(&file.config, &ns, sim)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            let report = serde_json::json!({
                "experiment": "convergence",
                "config": file.config,
                "points": points,
                "manifest_digest": digest,
            });
            write_json(&args.out, &report)?;
            if let Some(prefix) = &args.csv {
                let mut rows = String::from("n,d1\n");
                for p in &points {
                    rows.push_str(&format!("{},{}\n", p.n, p.d1));
                }
                fs::write(prefix.with_extension("points.csv"), rows)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
            }
            println!("convergence: {points:?} -> {}", args.out.display());
        }
        ExperimentKind::Tail => {
            let grid = file.grid.unwrap_or_else(|| vec![0.1, 0.01, 0.001]);
            let mc = file.mc_draws.unwrap_or(1_000_000);
            let study = run_tail(&file.config, sim, mc, &grid)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            let report = serde_json::json!({
                "experiment": "tail",
                "config": file.config,
                "result": study,
                "manifest_digest": digest,
            });
            write_json(&args.out, &report)?;
            if let Some(prefix) = &args.csv {
                let mut rows = String::from("p,ratio\n");
                for (p, ratio) in &study.cn_vs_n0 {
                    rows.push_str(&format!("{p},{ratio}\n"));
                }
                fs::write(prefix.with_extension("ratios.csv"), rows)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
            }
            println!(
                "tail: hill(R)={:.3} hill(indeg)={:.3} -> {}",
                study.hill_pagerank,
                study.hill_in_degree,
                args.out.display()
            );
        }
    }
    Ok(())
}
