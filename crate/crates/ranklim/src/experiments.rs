//! Config-driven experiment harness: the Venn overlap study, the
//! distributional-convergence check, and the tail study.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branching::{population_dynamics, sample_r_star, BranchingError, BranchingLaw};
use crate::graphgen::{
    build_dcm, build_ird, sample_attributes, AttributeKind, AttributeSequenceConfig, DcmMode,
    Dependence, DiGraph, GraphGenError, VertexAttributes, DEFAULT_MAX_ATTEMPTS,
};
use crate::pagerank::{compute_pagerank, PageRankError};
use crate::rng::StreamKey;
use crate::stats::{
    default_hill_k, hill_index, tail_ratio, wasserstein1, EmpiricalDistribution, StatsError,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("replication {replication}: {source}")]
    Generation {
        replication: u32,
        #[source]
        source: GraphGenError,
    },
    #[error("replication {replication}: {source}")]
    Ranking {
        replication: u32,
        #[source]
        source: PageRankError,
    },
    #[error(transparent)]
    Branching(#[from] BranchingError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("top_fraction must lie in (0, 0.5), got {0}")]
    InvalidTopFraction(f64),
    #[error("replications must be at least 1")]
    NoReplications,
    #[error("{0}")]
    InvalidConfig(String),
}

/// Graph model selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    Dcm,
    Ird,
}

/// DCM pairing variant, mirrored for configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DcmVariant {
    #[default]
    Multigraph,
    Repeated,
    Erased,
}

impl From<DcmVariant> for DcmMode {
    fn from(v: DcmVariant) -> Self {
        match v {
            DcmVariant::Multigraph => DcmMode::Multigraph,
            DcmVariant::Repeated => DcmMode::Repeated,
            DcmVariant::Erased => DcmMode::Erased,
        }
    }
}

/// Which theta enters the IRD edge probabilities and mixed-Poisson laws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    /// Empirical mean of `W^- + W^+` over the sampled attributes.
    #[default]
    Empirical,
    /// Analytic `E[W^-] + E[W^+]` from the Pareto parameters.
    Analytic,
}

fn default_n() -> usize {
    10_000
}
fn default_alpha() -> f64 {
    1.5
}
fn default_b() -> f64 {
    8.0
}
fn default_beta() -> f64 {
    2.5
}
fn default_c_scale() -> f64 {
    12.0
}
fn default_damping() -> f64 {
    0.85
}
fn default_iterations() -> u32 {
    30
}
fn default_top_fraction() -> f64 {
    0.05
}
fn default_replications() -> u32 {
    20
}
fn default_model() -> ModelChoice {
    ModelChoice::Ird
}
fn default_dependence() -> Dependence {
    Dependence::Independent
}

/// Full experiment configuration; the defaults reproduce the benchmark
/// independent-case setup (n = 10^4, Pareto(1.5, 8) x Pareto(2.5, 12),
/// damping 0.85, 30 iterations, top 5%, 20 replications).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_model")]
    pub model: ModelChoice,
    #[serde(default)]
    pub dcm_mode: DcmVariant,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_b")]
    pub b: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_c_scale")]
    pub c_scale: f64,
    #[serde(default = "default_dependence")]
    pub dependence: Dependence,
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default = "default_iterations")]
    pub iterations: u32,
    #[serde(default = "default_top_fraction")]
    pub top_fraction: f64,
    #[serde(default = "default_replications")]
    pub replications: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub theta_mode: ThetaMode,
    /// Optional overrides; `q = 1 - damping` and `zeta = damping` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_value: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: default_model(),
            dcm_mode: DcmVariant::default(),
            n: default_n(),
            alpha: default_alpha(),
            b: default_b(),
            beta: default_beta(),
            c_scale: default_c_scale(),
            dependence: default_dependence(),
            damping: default_damping(),
            iterations: default_iterations(),
            top_fraction: default_top_fraction(),
            replications: default_replications(),
            seed: 0,
            theta_mode: ThetaMode::default(),
            q_value: None,
            zeta_value: None,
        }
    }
}

impl ExperimentConfig {
    /// The benchmark configuration for a dependence mode.
    pub fn benchmark(dependence: Dependence, seed: u64) -> Self {
        Self {
            dependence,
            seed,
            ..Self::default()
        }
    }

    pub fn attr_config(&self) -> AttributeSequenceConfig {
        AttributeSequenceConfig {
            n: self.n,
            alpha: self.alpha,
            b: self.b,
            beta: self.beta,
            c_scale: self.c_scale,
            dependence: self.dependence,
            q_value: self.q_value.unwrap_or(1.0 - self.damping),
            zeta_value: self.zeta_value.unwrap_or(self.damping),
            damping: self.damping,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(self.top_fraction > 0.0 && self.top_fraction < 0.5) {
            return Err(ExperimentError::InvalidTopFraction(self.top_fraction));
        }
        if self.replications == 0 {
            return Err(ExperimentError::NoReplications);
        }
        self.attr_config()
            .validate()
            .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
        Ok(())
    }

    pub fn theta_for(&self, attrs: &[VertexAttributes]) -> f64 {
        match self.theta_mode {
            ThetaMode::Analytic => self.attr_config().analytic_theta(),
            ThetaMode::Empirical => {
                attrs.iter().map(|a| a.in_param + a.out_param).sum::<f64>() / attrs.len() as f64
            }
        }
    }

    pub fn attribute_kind(&self) -> AttributeKind {
        match self.model {
            ModelChoice::Dcm => AttributeKind::DcmDegrees,
            ModelChoice::Ird => AttributeKind::IrdWeights,
        }
    }

    /// Sample attributes and materialize the graph from a derived stream
    /// key (child 0 drives the attribute sample, child 1 the edges).
    pub fn generate_graph_with_attrs(
        &self,
        key: StreamKey,
    ) -> Result<(DiGraph, Vec<VertexAttributes>), GraphGenError> {
        let attr_cfg = self.attr_config();
        let attrs = sample_attributes(&attr_cfg, self.attribute_kind(), &mut key.child(0).rng())?;
        let graph = match self.model {
            ModelChoice::Dcm => build_dcm(
                attrs.clone(),
                self.dcm_mode.into(),
                &mut key.child(1).rng(),
                DEFAULT_MAX_ATTEMPTS,
            )?
            .into_graph(),
            ModelChoice::Ird => {
                let theta = self.theta_for(&attrs);
                build_ird(attrs.clone(), theta, &mut key.child(1).rng())?
            }
        };
        Ok((graph, attrs))
    }

    pub fn generate_graph(&self, key: StreamKey) -> Result<DiGraph, GraphGenError> {
        self.generate_graph_with_attrs(key).map(|(g, _)| g)
    }

    /// Build the matching limit law from the same attribute sample.
    pub fn law_from_attrs(
        &self,
        attrs: &[VertexAttributes],
    ) -> Result<BranchingLaw, BranchingError> {
        match self.model {
            ModelChoice::Dcm => BranchingLaw::from_dcm_attrs(attrs),
            ModelChoice::Ird => BranchingLaw::from_ird_attrs(attrs, self.theta_for(attrs)),
        }
    }
}

/// The eight disjoint regions of the (A, B, C) Venn diagram; lowercase
/// letters denote complements.
pub const VENN_REGIONS: [&str; 8] = [
    "A&B&C", "A&B&c", "a&B&C", "A&b&C", "A&b&c", "a&B&c", "a&b&C", "none",
];

/// Overlap labels for the contribution set H.
pub const H_REGIONS: [&str; 3] = ["A&H", "A&h", "a&H"];

/// Raw per-replication tallies (vertex counts, not percentages).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VennReplication {
    pub cells: BTreeMap<String, u64>,
    pub h_cells: BTreeMap<String, u64>,
    pub edge_count: u64,
    pub set_sizes: BTreeMap<String, u64>,
}

/// Averaged Venn-region percentages over all replications.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VennResult {
    pub cell_percentages: BTreeMap<String, f64>,
    pub h_overlap: BTreeMap<String, f64>,
    pub replications: u32,
    pub per_replication: Vec<VennReplication>,
}

impl VennResult {
    pub fn cell(&self, label: &str) -> f64 {
        self.cell_percentages[label]
    }

    /// Percentage of vertices in C (sum of the four C-containing cells).
    pub fn c_size(&self) -> f64 {
        self.cell("A&B&C") + self.cell("a&B&C") + self.cell("A&b&C") + self.cell("a&b&C")
    }
}

/// Indexes of the `m` largest scores, ties broken by smaller vertex index.
fn top_m_by(scores: &[f64], m: usize) -> Vec<u32> {
    let mut order: Vec<u32> = (0..scores.len() as u32).collect();
    order.sort_by(|&a, &b| {
        scores[b as usize]
            .partial_cmp(&scores[a as usize])
            .expect("finite scores")
            .then(a.cmp(&b))
    });
    order.truncate(m);
    order
}

/// One Venn replication on a freshly generated graph.
fn venn_replication(
    cfg: &ExperimentConfig,
    key: StreamKey,
) -> Result<VennReplication, GraphGenError> {
    let graph = cfg.generate_graph(key)?;
    let n = graph.vertex_count();
    let ranks = compute_pagerank(&graph, cfg.damping, cfg.iterations)
        .expect("validated config produces a rankable graph");

    let m = ((cfg.top_fraction * n as f64).round() as usize).clamp(1, n);
    // A: top-m ranks, exact size.
    let a_members = top_m_by(&ranks.values, m);
    // B: top in-degrees including every vertex tied with the threshold.
    let in_degrees: Vec<f64> = (0..n).map(|v| graph.in_degree(v) as f64).collect();
    let b_threshold = {
        let mut sorted = in_degrees.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        sorted[m - 1]
    };
    // H: top-m contributions C_i R_i, exact size.
    let contributions: Vec<f64> = (0..n)
        .map(|v| {
            let c = graph.attrs()[v].zeta / graph.out_degree(v).max(1) as f64;
            c * ranks.values[v]
        })
        .collect();
    let h_members = top_m_by(&contributions, m);

    let mut in_a = vec![false; n];
    for &v in &a_members {
        in_a[v as usize] = true;
    }
    let mut in_h = vec![false; n];
    for &v in &h_members {
        in_h[v as usize] = true;
    }
    // C: vertices with at least one inbound neighbor in H.
    let mut in_c = vec![false; n];
    for &h in &h_members {
        for &t in graph.out_neighbors(h as usize) {
            in_c[t as usize] = true;
        }
    }

    let mut cells: BTreeMap<String, u64> =
        VENN_REGIONS.iter().map(|&r| (r.to_string(), 0)).collect();
    let mut h_cells: BTreeMap<String, u64> =
        H_REGIONS.iter().map(|&r| (r.to_string(), 0)).collect();
    let mut b_size = 0u64;
    for v in 0..n {
        let a = in_a[v];
        let b = in_degrees[v] >= b_threshold;
        let c = in_c[v];
        b_size += b as u64;
        let label = match (a, b, c) {
            (true, true, true) => "A&B&C",
            (true, true, false) => "A&B&c",
            (false, true, true) => "a&B&C",
            (true, false, true) => "A&b&C",
            (true, false, false) => "A&b&c",
            (false, true, false) => "a&B&c",
            (false, false, true) => "a&b&C",
            (false, false, false) => "none",
        };
        *cells.get_mut(label).expect("fixed region set") += 1;
        if a && in_h[v] {
            *h_cells.get_mut("A&H").expect("fixed") += 1;
        } else if a {
            *h_cells.get_mut("A&h").expect("fixed") += 1;
        } else if in_h[v] {
            *h_cells.get_mut("a&H").expect("fixed") += 1;
        }
    }
    let set_sizes = BTreeMap::from([
        ("A".to_string(), a_members.len() as u64),
        ("B".to_string(), b_size),
        ("H".to_string(), h_members.len() as u64),
        ("C".to_string(), in_c.iter().filter(|&&x| x).count() as u64),
    ]);
    Ok(VennReplication {
        cells,
        h_cells,
        edge_count: graph.edge_count() as u64,
        set_sizes,
    })
}

/// Run the Venn experiment: per replication, generate a graph, rank it,
/// form A (top ranks), B (top in-degrees, ties included), H (top
/// contributions `C_i R_i`), and C (vertices with an inbound neighbor in
/// H), then average the region percentages across replications.
///
/// Replications run in parallel on split streams; aggregation is a
/// sequential reduce, so the result is independent of the worker count.
pub fn run_venn(cfg: &ExperimentConfig) -> Result<VennResult, ExperimentError> {
    cfg.validate()?;
    let root = StreamKey::new(cfg.seed).child(0x7e11);
    let reps: Vec<Result<VennReplication, GraphGenError>> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| venn_replication(cfg, root.child(r as u64)))
        .collect();
    let mut per_replication = Vec::with_capacity(reps.len());
    for (r, rep) in reps.into_iter().enumerate() {
        per_replication.push(rep.map_err(|source| ExperimentError::Generation {
            replication: r as u32,
            source,
        })?);
    }
    let n = cfg.n as f64;
    let reps_f = cfg.replications as f64;
    let mut cell_percentages: BTreeMap<String, f64> =
        VENN_REGIONS.iter().map(|&r| (r.to_string(), 0.0)).collect();
    let mut h_overlap: BTreeMap<String, f64> =
        H_REGIONS.iter().map(|&r| (r.to_string(), 0.0)).collect();
    for rep in &per_replication {
        for (label, &count) in &rep.cells {
            *cell_percentages.get_mut(label).expect("fixed") +=
                count as f64 / n * 100.0 / reps_f;
        }
        for (label, &count) in &rep.h_cells {
            *h_overlap.get_mut(label).expect("fixed") += count as f64 / n * 100.0 / reps_f;
        }
    }
    Ok(VennResult {
        cell_percentages,
        h_overlap,
        replications: cfg.replications,
        per_replication,
    })
}

/// Monte Carlo sizes for the convergence and tail studies.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SimulationSizes {
    pub pool_size: usize,
    pub generations: u32,
    pub r_star_samples: usize,
}

impl Default for SimulationSizes {
    fn default() -> Self {
        Self {
            pool_size: 20_000,
            generations: 20,
            r_star_samples: 20_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub d1: f64,
}

/// For each graph size, compare the empirical rank distribution H_n with a
/// simulated sample of the limit R* built from the same attribute sequence,
/// and report the Wasserstein-1 distance.
pub fn run_convergence(
    cfg: &ExperimentConfig,
    ns: &[usize],
    sizes: SimulationSizes,
) -> Result<Vec<ConvergencePoint>, ExperimentError> {
    let mut points = Vec::with_capacity(ns.len());
    for (idx, &n) in ns.iter().enumerate() {
        let mut cfg_n = *cfg;
        cfg_n.n = n;
        cfg_n.validate()?;
        let key = StreamKey::new(cfg.seed).child(0xc0).child(idx as u64);
        let (graph, attrs) = cfg_n
            .generate_graph_with_attrs(key)
            .map_err(|source| ExperimentError::Generation {
                replication: idx as u32,
                source,
            })?;
        let ranks = compute_pagerank(&graph, cfg_n.damping, cfg_n.iterations).map_err(
            |source| ExperimentError::Ranking {
                replication: idx as u32,
                source,
            },
        )?;
        let h_n = EmpiricalDistribution::new(ranks.values)?;
        let law = cfg_n.law_from_attrs(&attrs)?;
        let pool = population_dynamics(&law, sizes.pool_size, sizes.generations, key.child(2))?;
        let r_star = sample_r_star(&law, &pool, sizes.r_star_samples, key.child(3))?;
        points.push(ConvergencePoint {
            n,
            d1: wasserstein1(&h_n, &r_star),
        });
    }
    Ok(points)
}

/// Tail study artifacts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailStudy {
    pub hill_pagerank: f64,
    pub hill_in_degree: f64,
    pub hill_r_star: f64,
    pub hill_pool: f64,
    /// Survival-ratio curve of the CN-law against the N0-law, one `(p,
    /// ratio)` pair per grid probability; ratios decaying with `p`
    /// diagnose the degenerate dependent case.
    pub cn_vs_n0: Vec<(f64, f64)>,
    /// Hill indexes of the size-biased neighbor in-degree law N and of the
    /// root in-degree law N0.
    pub hill_neighbor_n: f64,
    pub hill_root_n0: f64,
}

/// One-graph tail diagnostics plus law-level Monte Carlo tail comparisons.
pub fn run_tail(
    cfg: &ExperimentConfig,
    sizes: SimulationSizes,
    mc_draws: usize,
    grid: &[f64],
) -> Result<TailStudy, ExperimentError> {
    cfg.validate()?;
    let key = StreamKey::new(cfg.seed).child(0x7a11);
    let (graph, attrs) =
        cfg.generate_graph_with_attrs(key)
            .map_err(|source| ExperimentError::Generation {
                replication: 0,
                source,
            })?;
    let ranks = compute_pagerank(&graph, cfg.damping, cfg.iterations).map_err(|source| {
        ExperimentError::Ranking {
            replication: 0,
            source,
        }
    })?;

    let rank_dist = EmpiricalDistribution::new(ranks.values)?;
    let hill_pagerank = hill_index(&rank_dist, default_hill_k(rank_dist.count()))?.hill_index;
    let in_degrees: Vec<f64> = (0..graph.vertex_count())
        .map(|v| graph.in_degree(v) as f64)
        .collect();
    let indeg_dist = EmpiricalDistribution::new(in_degrees)?;
    let hill_in_degree = hill_index(&indeg_dist, default_hill_k(indeg_dist.count()))?.hill_index;

    let law = cfg.law_from_attrs(&attrs)?;
    let pool = population_dynamics(&law, sizes.pool_size, sizes.generations, key.child(2))?;
    let r_star = sample_r_star(&law, &pool, sizes.r_star_samples, key.child(3))?;
    let hill_r_star = hill_index(&r_star, default_hill_k(r_star.count()))?.hill_index;
    let pool_dist = EmpiricalDistribution::new(pool.samples.clone())?;
    let hill_pool = hill_index(&pool_dist, default_hill_k(pool_dist.count()))?.hill_index;

    // Law-level Monte Carlo: CN products, neighbor N, and root N0.
    let mut rng = key.child(4).rng();
    let mut cn = Vec::with_capacity(mc_draws);
    let mut neighbor_n = Vec::with_capacity(mc_draws);
    for _ in 0..mc_draws {
        let g = law.sample_generic(&mut rng);
        cn.push(g.weight * g.count as f64);
        neighbor_n.push(g.count as f64);
    }
    let mut root_n0 = Vec::with_capacity(mc_draws);
    for _ in 0..mc_draws {
        root_n0.push(law.sample_root(&mut rng).count as f64);
    }
    let cn_dist = EmpiricalDistribution::new(cn)?;
    let n_dist = EmpiricalDistribution::new(neighbor_n)?;
    let n0_dist = EmpiricalDistribution::new(root_n0)?;
    let cn_vs_n0 = tail_ratio(&cn_dist, &n0_dist, grid)?
        .into_iter()
        .zip(grid)
        .map(|((_, ratio), &p)| (p, ratio))
        .collect();
    let hill_neighbor_n = hill_index(&n_dist, default_hill_k(n_dist.count()))?.hill_index;
    let hill_root_n0 = hill_index(&n0_dist, default_hill_k(n0_dist.count()))?.hill_index;

    Ok(TailStudy {
        hill_pagerank,
        hill_in_degree,
        hill_r_star,
        hill_pool,
        cn_vs_n0,
        hill_neighbor_n,
        hill_root_n0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            n: 500,
            replications: 3,
            seed: 7,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn venn_cells_partition_every_replication() {
        let result = run_venn(&small_cfg()).unwrap();
        for rep in &result.per_replication {
            let total: u64 = rep.cells.values().sum();
            assert_eq!(total, 500);
            // A splits exactly between A&H and A&h.
            assert_eq!(rep.h_cells["A&H"] + rep.h_cells["A&h"], rep.set_sizes["A"]);
            // |A| = |H| by construction, so a&H mirrors A&h.
            assert_eq!(rep.h_cells["a&H"], rep.h_cells["A&h"]);
            // B includes threshold ties, so it is at least the exact cut.
            assert!(rep.set_sizes["B"] >= rep.set_sizes["A"]);
        }
        let pct_total: f64 = result.cell_percentages.values().sum();
        assert!((pct_total - 100.0).abs() < 1e-9);
    }

    #[test]
    fn venn_is_deterministic_in_the_seed() {
        let a = run_venn(&small_cfg()).unwrap();
        let b = run_venn(&small_cfg()).unwrap();
        assert_eq!(
            serde_json::to_string(&a.per_replication).unwrap(),
            serde_json::to_string(&b.per_replication).unwrap()
        );
    }

    #[test]
    fn venn_rejects_bad_fractions() {
        let mut cfg = small_cfg();
        cfg.top_fraction = 0.6;
        assert!(matches!(
            run_venn(&cfg),
            Err(ExperimentError::InvalidTopFraction(_))
        ));
    }

    #[test]
    fn degenerate_cycle_case_collapses_to_the_geometric_constant() {
        // All degrees 1: the DCM is a union of cycles, every rank equals
        // (1-c) sum_{j<=k} c^j, and the limit law is the deterministic
        // chain; d1 is tiny already at n = 1000.
        let n = 1000;
        let attrs = vec![
            VertexAttributes {
                in_param: 1.0,
                out_param: 1.0,
                q: 0.15,
                zeta: 0.85,
            };
            n
        ];
        let key = StreamKey::new(3);
        let graph = build_dcm(attrs.clone(), DcmMode::Multigraph, &mut key.child(1).rng(), 1)
            .unwrap()
            .into_graph();
        let ranks = compute_pagerank(&graph, 0.85, 30).unwrap();
        let h_n = EmpiricalDistribution::new(ranks.values).unwrap();
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let pool = population_dynamics(&law, 5000, 60, key.child(2)).unwrap();
        let r_star = sample_r_star(&law, &pool, 5000, key.child(3)).unwrap();
        let d1 = wasserstein1(&h_n, &r_star);
        assert!(d1 < 0.05, "degenerate-case d1 = {d1}");
        let c = 0.85f64;
        let expected = 0.15 * (1.0 - c.powi(31)) / (1.0 - c);
        assert!((h_n.mean() - expected).abs() < 1e-9);
        // The limit constant differs from the k-truncated one only by the
        // geometric tail.
        assert!((r_star.mean() - 0.15 / (1.0 - c)).abs() < 0.01);
    }

    #[test]
    fn convergence_runner_produces_finite_distances() {
        let cfg = ExperimentConfig {
            seed: 5,
            ..ExperimentConfig::default()
        };
        let points = run_convergence(
            &cfg,
            &[100, 1000],
            SimulationSizes {
                pool_size: 5000,
                generations: 15,
                r_star_samples: 5000,
            },
        )
        .unwrap();
        assert_eq!(points.len(), 2);
        assert!(points.iter().all(|p| p.d1.is_finite() && p.d1 >= 0.0));
    }

    #[test]
    fn self_distance_sits_at_the_two_sample_noise_floor() {
        // Same graph, rank sample split in half: d1 is pure fluctuation.
        let cfg = ExperimentConfig {
            n: 2000,
            seed: 11,
            ..ExperimentConfig::default()
        };
        let graph = cfg.generate_graph(StreamKey::new(11).child(1)).unwrap();
        let ranks = compute_pagerank(&graph, cfg.damping, cfg.iterations).unwrap();
        let evens: Vec<f64> = ranks.values.iter().step_by(2).copied().collect();
        let odds: Vec<f64> = ranks.values.iter().skip(1).step_by(2).copied().collect();
        let d_split = wasserstein1(
            &EmpiricalDistribution::new(evens).unwrap(),
            &EmpiricalDistribution::new(odds).unwrap(),
        );
        let full = EmpiricalDistribution::new(ranks.values.clone()).unwrap();
        assert_eq!(wasserstein1(&full, &full), 0.0);
        // Vertex parity is independent of rank, so the split-half distance
        // is a small sampling fluctuation, not a systematic offset.
        assert!(d_split < 0.25, "split-half d1 {d_split}");
    }
}
