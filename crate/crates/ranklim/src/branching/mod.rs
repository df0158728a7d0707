//! Limiting branching-process laws for PageRank and their Monte Carlo
//! machinery.
//!
//! The limit rank of a uniformly chosen vertex is
//! `R* = Q_0 + sum_{j<=N_0} X_j`, where the `X_j` are i.i.d. copies of the
//! attracting endogenous solution of the fixed-point equation
//! `X = C Q + sum_{j<=N} C X_j`, and `(N_0, Q_0)` / `(N, Q, C)` are the
//! root and generic branching vectors of the model:
//!
//! * DCM — the root takes the in-degree and personalization value of a
//!   uniform vertex; the generic vector takes them from an out-degree
//!   size-biased vertex `s` (probability `D_s^+ / L_n`) together with
//!   `C = zeta_s / (D_s^+ \/ 1)`.
//! * IRD — degrees are mixed Poisson: the root draws a uniform vertex `s`
//!   and `N_0 ~ Poisson(E[W^+] W_s^- / theta)`; the generic vector draws
//!   `s` with probability proportional to `W_s^+`, then
//!   `N ~ Poisson(E[W^+] W_s^- / theta)` and `C = zeta_s / (Z^+ + 1)` with
//!   `Z^+ ~ Poisson(E[W^-] W_s^+ / theta)` conditionally independent.
//!
//! [`population_dynamics`] approximates the law of `X` by iterating a
//! sample pool through the recursion from zero, [`sample_r_star`] draws
//! `R*` from the pool, and [`simulate_tree_rank`] grows the marked tree
//! explicitly to a finite depth as an independent route to the same limit.

mod alias;

pub use alias::AliasTable;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphgen::{pareto, AttributeSequenceConfig, Dependence, VertexAttributes};
use crate::rng::StreamKey;
use crate::stats::EmpiricalDistribution;

pub const DEFAULT_POOL_SIZE: usize = 100_000;
pub const DEFAULT_GENERATIONS: u32 = 20;
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum BranchingError {
    #[error("branching law requires a non-empty attribute sequence")]
    EmptyAttributes,
    #[error("size-biased sampling requires at least one positive out-parameter")]
    NoOutMass,
    #[error("mixed Poisson law requires theta > 0, got {0}")]
    InvalidTheta(f64),
    #[error("DCM law requires non-negative integer degrees, found {value} at vertex {vertex}")]
    NonIntegerDegree { vertex: usize, value: f64 },
    #[error("|zeta_{vertex}| = {zeta} must be strictly below 1 for a contracting law")]
    ZetaOutOfRange { vertex: usize, zeta: f64 },
    #[error("pool size must be at least 1")]
    EmptyPool,
    #[error("sample count must be at least 1")]
    EmptySample,
    #[error(
        "population dynamics diverged at generation {generation} (mean |X| = {mean:.3e}); \
         the law likely has rho_1 = E[N|C|] >= 1"
    )]
    PoolDiverged { generation: u32, mean: f64 },
}

/// Where a law's randomness comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    DcmEmpirical,
    DcmAnalytic,
    IrdEmpirical,
    IrdAnalytic,
}

/// One draw of the root vector `(N_0, Q_0)`.
#[derive(Clone, Copy, Debug)]
pub struct RootDraw {
    pub count: u64,
    pub q: f64,
}

/// One draw of the generic vector `(N, Q, C)`.
#[derive(Clone, Copy, Debug)]
pub struct GenericDraw {
    pub count: u64,
    pub q: f64,
    pub weight: f64,
}

#[derive(Clone, Debug)]
enum LawKind {
    Dcm {
        d_minus: Vec<u64>,
        q: Vec<f64>,
        cweight: Vec<f64>,
        size_biased: AliasTable,
    },
    Ird {
        w_minus: Vec<f64>,
        w_plus: Vec<f64>,
        q: Vec<f64>,
        zeta: Vec<f64>,
        mean_w_minus: f64,
        mean_w_plus: f64,
        theta: f64,
        size_biased: AliasTable,
    },
    IrdAnalytic {
        alpha: f64,
        b: f64,
        beta: f64,
        c_scale: f64,
        dependence: Dependence,
        q_value: f64,
        zeta_value: f64,
        mean_w_minus: f64,
        mean_w_plus: f64,
        theta: f64,
    },
}

/// Sampler pair for the root law `(N_0, Q_0)` and the generic law
/// `(N, Q, C)`.
#[derive(Clone, Debug)]
pub struct BranchingLaw {
    kind: LawKind,
    provenance: Provenance,
}

impl BranchingLaw {
    /// Empirical DCM law from an attribute table: the root is a uniform
    /// vertex, the generic vector an out-degree size-biased one.
    pub fn from_dcm_attrs(attrs: &[VertexAttributes]) -> Result<Self, BranchingError> {
        Self::dcm_with_provenance(attrs, Provenance::DcmEmpirical)
    }

    /// DCM law for an analytic attribute configuration, realized as the
    /// empirical law of a synthetic population of `population` fresh draws
    /// (floor-and-repair, same as graph generation).
    pub fn from_dcm_config(
        cfg: &AttributeSequenceConfig,
        population: usize,
        rng: &mut rand_chacha::ChaCha12Rng,
    ) -> Result<Self, BranchingError> {
        let mut cfg = *cfg;
        cfg.n = population;
        let attrs = crate::graphgen::sample_attributes(
            &cfg,
            crate::graphgen::AttributeKind::DcmDegrees,
            rng,
        )
        .map_err(|_| BranchingError::EmptyAttributes)?;
        Self::dcm_with_provenance(&attrs, Provenance::DcmAnalytic)
    }

    fn dcm_with_provenance(
        attrs: &[VertexAttributes],
        provenance: Provenance,
    ) -> Result<Self, BranchingError> {
        if attrs.is_empty() {
            return Err(BranchingError::EmptyAttributes);
        }
        let mut d_minus = Vec::with_capacity(attrs.len());
        let mut d_plus = Vec::with_capacity(attrs.len());
        let mut q = Vec::with_capacity(attrs.len());
        let mut cweight = Vec::with_capacity(attrs.len());
        for (vertex, a) in attrs.iter().enumerate() {
            for value in [a.in_param, a.out_param] {
                if !(value.is_finite() && value >= 0.0 && value.fract() == 0.0) {
                    return Err(BranchingError::NonIntegerDegree { vertex, value });
                }
            }
            if a.zeta.abs() >= 1.0 {
                return Err(BranchingError::ZetaOutOfRange {
                    vertex,
                    zeta: a.zeta,
                });
            }
            d_minus.push(a.in_param as u64);
            d_plus.push(a.out_param);
            q.push(a.q);
            cweight.push(a.zeta / a.out_param.max(1.0));
        }
        let size_biased = AliasTable::new(&d_plus).ok_or(BranchingError::NoOutMass)?;
        Ok(Self {
            kind: LawKind::Dcm {
                d_minus,
                q,
                cweight,
                size_biased,
            },
            provenance,
        })
    }

    /// Empirical IRD law from an attribute table and a kernel constant
    /// `theta` (empirical mean of `W^- + W^+`, or the analytic value).
    pub fn from_ird_attrs(
        attrs: &[VertexAttributes],
        theta: f64,
    ) -> Result<Self, BranchingError> {
        if attrs.is_empty() {
            return Err(BranchingError::EmptyAttributes);
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(BranchingError::InvalidTheta(theta));
        }
        let n = attrs.len() as f64;
        let mut w_minus = Vec::with_capacity(attrs.len());
        let mut w_plus = Vec::with_capacity(attrs.len());
        let mut q = Vec::with_capacity(attrs.len());
        let mut zeta = Vec::with_capacity(attrs.len());
        for (vertex, a) in attrs.iter().enumerate() {
            if a.zeta.abs() >= 1.0 {
                return Err(BranchingError::ZetaOutOfRange {
                    vertex,
                    zeta: a.zeta,
                });
            }
            w_minus.push(a.in_param);
            w_plus.push(a.out_param);
            q.push(a.q);
            zeta.push(a.zeta);
        }
        let size_biased = AliasTable::new(&w_plus).ok_or(BranchingError::NoOutMass)?;
        let mean_w_minus = w_minus.iter().sum::<f64>() / n;
        let mean_w_plus = w_plus.iter().sum::<f64>() / n;
        Ok(Self {
            kind: LawKind::Ird {
                w_minus,
                w_plus,
                q,
                zeta,
                mean_w_minus,
                mean_w_plus,
                theta,
                size_biased,
            },
            provenance: Provenance::IrdEmpirical,
        })
    }

    /// Exact analytic IRD law for Pareto-type weights.
    ///
    /// Size-biasing by `W^+` has a closed form here: independent mode
    /// tilts the out-weight to Pareto(beta - 1, c_scale) and leaves the
    /// in-weight untouched; power-coupled mode tilts the in-weight to
    /// Pareto(alpha (beta-1)/beta, b) and maps it through the coupling.
    pub fn from_ird_config(cfg: &AttributeSequenceConfig) -> Result<Self, BranchingError> {
        cfg.validate().map_err(|_| BranchingError::EmptyAttributes)?;
        if cfg.zeta_value.abs() >= 1.0 {
            return Err(BranchingError::ZetaOutOfRange {
                vertex: 0,
                zeta: cfg.zeta_value,
            });
        }
        Ok(Self {
            kind: LawKind::IrdAnalytic {
                alpha: cfg.alpha,
                b: cfg.b,
                beta: cfg.beta,
                c_scale: cfg.c_scale,
                dependence: cfg.dependence,
                q_value: cfg.q_value,
                zeta_value: cfg.zeta_value,
                mean_w_minus: cfg.mean_in_param(),
                mean_w_plus: cfg.mean_out_param(),
                theta: cfg.analytic_theta(),
            },
            provenance: Provenance::IrdAnalytic,
        })
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Draw the root vector `(N_0, Q_0)`.
    pub fn sample_root<R: Rng + ?Sized>(&self, rng: &mut R) -> RootDraw {
        match &self.kind {
            LawKind::Dcm { d_minus, q, .. } => {
                let s = rng.random_range(0..d_minus.len());
                RootDraw {
                    count: d_minus[s],
                    q: q[s],
                }
            }
            LawKind::Ird {
                w_minus,
                q,
                mean_w_plus,
                theta,
                ..
            } => {
                let s = rng.random_range(0..w_minus.len());
                RootDraw {
                    count: poisson_count(mean_w_plus * w_minus[s] / theta, rng),
                    q: q[s],
                }
            }
            LawKind::IrdAnalytic {
                alpha,
                b,
                q_value,
                mean_w_plus,
                theta,
                ..
            } => {
                let w_minus = pareto(rng, *alpha, *b);
                RootDraw {
                    count: poisson_count(mean_w_plus * w_minus / theta, rng),
                    q: *q_value,
                }
            }
        }
    }

    /// Draw the generic vector `(N, Q, C)`.
    pub fn sample_generic<R: Rng + ?Sized>(&self, rng: &mut R) -> GenericDraw {
        match &self.kind {
            LawKind::Dcm {
                d_minus,
                q,
                cweight,
                size_biased,
            } => {
                let s = size_biased.sample(rng);
                GenericDraw {
                    count: d_minus[s],
                    q: q[s],
                    weight: cweight[s],
                }
            }
            LawKind::Ird {
                w_minus,
                w_plus,
                q,
                zeta,
                mean_w_minus,
                mean_w_plus,
                theta,
                size_biased,
            } => {
                let s = size_biased.sample(rng);
                let count = poisson_count(mean_w_plus * w_minus[s] / theta, rng);
                let z_plus = poisson_count(mean_w_minus * w_plus[s] / theta, rng);
                GenericDraw {
                    count,
                    q: q[s],
                    weight: zeta[s] / (z_plus + 1) as f64,
                }
            }
            LawKind::IrdAnalytic {
                alpha,
                b,
                beta,
                c_scale,
                dependence,
                q_value,
                zeta_value,
                mean_w_minus,
                mean_w_plus,
                theta,
            } => {
                let (w_minus, w_plus) = match dependence {
                    Dependence::Independent => {
                        (pareto(rng, *alpha, *b), pareto(rng, *beta - 1.0, *c_scale))
                    }
                    Dependence::PowerCoupled => {
                        let tilted_index = alpha * (beta - 1.0) / beta;
                        let w_minus = pareto(rng, tilted_index, *b);
                        (w_minus, c_scale * (w_minus / b).powf(alpha / beta))
                    }
                };
                let count = poisson_count(mean_w_plus * w_minus / theta, rng);
                let z_plus = poisson_count(mean_w_minus * w_plus / theta, rng);
                GenericDraw {
                    count,
                    q: *q_value,
                    weight: zeta_value / (z_plus + 1) as f64,
                }
            }
        }
    }

    /// Monte Carlo estimate of `rho_1 = E[N |C|]`, the contraction rate of
    /// the fixed-point recursion.
    pub fn estimate_rho1<R: Rng + ?Sized>(&self, draws: usize, rng: &mut R) -> f64 {
        let mut total = 0.0;
        for _ in 0..draws {
            let g = self.sample_generic(rng);
            total += g.count as f64 * g.weight.abs();
        }
        total / draws as f64
    }
}

/// Mixed-Poisson count: zero mixing parameter short-circuits to zero,
/// otherwise delegates to the standard Poisson sampler (inversion for
/// small means, transformed rejection for large ones).
#[inline]
fn poisson_count<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda)
        .expect("positive finite mixing parameter")
        .sample(rng) as u64
}

/// Pool of approximate i.i.d. draws of the fixed point `X`.
#[derive(Clone, Debug)]
pub struct FixedPointPool {
    pub samples: Vec<f64>,
    pub generations: u32,
    pub rho1_estimate: f64,
    pub law_provenance: Provenance,
}

impl FixedPointPool {
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
            / self.samples.len() as f64
    }
}

const RHO_PROBE_DRAWS: usize = 20_000;
const DIVERGENCE_GUARD: f64 = 1e12;

/// Approximate the attracting endogenous solution of
/// `X = C Q + sum_{j<=N} C X_j` by population dynamics.
///
/// The pool starts at zero and each generation rebuilds every entry as
/// `C Q + sum_{j<=N} C pool[sigma_j]` with a fresh generic draw and uniform
/// indexes into the previous generation. Entries within a generation are
/// computed in parallel from per-entry derived streams, so results do not
/// depend on the worker count.
pub fn population_dynamics(
    law: &BranchingLaw,
    pool_size: usize,
    generations: u32,
    key: StreamKey,
) -> Result<FixedPointPool, BranchingError> {
    if pool_size == 0 {
        return Err(BranchingError::EmptyPool);
    }
    let rho1 = law.estimate_rho1(RHO_PROBE_DRAWS, &mut key.child(0).rng());
    if rho1 >= 0.98 {
        log::warn!(
            "population dynamics: estimated rho_1 = E[N|C|] = {rho1:.4} is at or above \
             the contraction threshold; the pool may not converge"
        );
    }
    let gen_key = key.child(1);
    let mut pool = vec![0.0f64; pool_size];
    for t in 0..generations {
        let level_key = gen_key.child(t as u64);
        let prev = &pool;
        let next: Vec<f64> = (0..pool_size)
            .into_par_iter()
            .map(|i| {
                let mut rng = level_key.child(i as u64).rng();
                let draw = law.sample_generic(&mut rng);
                let mut x = draw.weight * draw.q;
                for _ in 0..draw.count {
                    x += draw.weight * prev[rng.random_range(0..pool_size)];
                }
                x
            })
            .collect();
        pool = next;
        let mean_abs = pool.iter().map(|x| x.abs()).sum::<f64>() / pool_size as f64;
        if !mean_abs.is_finite() || mean_abs > DIVERGENCE_GUARD {
            return Err(BranchingError::PoolDiverged {
                generation: t,
                mean: mean_abs,
            });
        }
    }
    Ok(FixedPointPool {
        samples: pool,
        generations,
        rho1_estimate: rho1,
        law_provenance: law.provenance(),
    })
}

/// Draw `count` samples of `R* = Q_0 + sum_{j<=N_0} X_j`, resampling the
/// `X_j` uniformly with replacement from the pool.
pub fn sample_r_star(
    law: &BranchingLaw,
    pool: &FixedPointPool,
    count: usize,
    key: StreamKey,
) -> Result<EmpiricalDistribution, BranchingError> {
    if pool.samples.is_empty() {
        return Err(BranchingError::EmptyPool);
    }
    if count == 0 {
        return Err(BranchingError::EmptySample);
    }
    let mut rng = key.rng();
    let p = pool.samples.len();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let root = law.sample_root(&mut rng);
        let mut r = root.q;
        for _ in 0..root.count {
            r += pool.samples[rng.random_range(0..p)];
        }
        out.push(r);
    }
    EmpiricalDistribution::new(out).map_err(|_| BranchingError::EmptySample)
}

/// Outcome of one explicit tree simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TreeRank {
    Rank(f64),
    BudgetExceeded { nodes: u64 },
}

/// One draw of the depth-`k` tree rank `R^(k) = sum_{r<=k} sum_{j in A_r}
/// Pi_j Q_j`, grown breadth-first with fresh marks.
///
/// The truncation error in mean obeys the geometric bound
/// `c^(k+1)/(1-c) * E|Q_0|`. A draw whose live population exceeds
/// `node_budget` is abandoned and reported as such.
pub fn simulate_tree_rank<R: Rng + ?Sized>(
    law: &BranchingLaw,
    depth: u32,
    rng: &mut R,
    node_budget: u64,
) -> TreeRank {
    let root = law.sample_root(rng);
    let mut total = root.q;
    let mut nodes: u64 = 1;
    // (path weight Pi, offspring count) per live node of the current level.
    let mut frontier: Vec<(f64, u64)> = vec![(1.0, root.count)];
    for level in 1..=depth {
        let mut next: Vec<(f64, u64)> =
            Vec::with_capacity(frontier.iter().map(|&(_, n)| n as usize).sum());
        for &(pi, offspring) in &frontier {
            for _ in 0..offspring {
                nodes += 1;
                if nodes > node_budget {
                    return TreeRank::BudgetExceeded { nodes };
                }
                let mark = law.sample_generic(rng);
                let pi_child = pi * mark.weight;
                total += pi_child * mark.q;
                if level < depth {
                    next.push((pi_child, mark.count));
                }
            }
        }
        if next.is_empty() && level < depth {
            break;
        }
        frontier = next;
    }
    TreeRank::Rank(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::{AttributeKind, sample_attributes};
    use crate::stats::wasserstein1;

    fn attrs_const(n: usize, d_in: f64, d_out: f64, q: f64, zeta: f64) -> Vec<VertexAttributes> {
        vec![
            VertexAttributes {
                in_param: d_in,
                out_param: d_out,
                q,
                zeta,
            };
            n
        ]
    }

    #[test]
    fn dcm_size_bias_picks_heavy_vertex_three_quarters() {
        let attrs = vec![
            VertexAttributes {
                in_param: 1.0,
                out_param: 3.0,
                q: 0.5,
                zeta: 0.4,
            },
            VertexAttributes {
                in_param: 2.0,
                out_param: 1.0,
                q: 0.7,
                zeta: 0.4,
            },
        ];
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let mut rng = StreamKey::new(1).rng();
        let draws = 100_000;
        let mut heavy = 0u64;
        for _ in 0..draws {
            // Vertex 0 has C = 0.4/3, vertex 1 has C = 0.4/1.
            let g = law.sample_generic(&mut rng);
            if g.count == 1 {
                heavy += 1;
            }
        }
        let freq = heavy as f64 / draws as f64;
        let sigma = (0.75 * 0.25 / draws as f64).sqrt();
        assert!((freq - 0.75).abs() < 4.0 * sigma, "freq {freq}");
    }

    #[test]
    fn identical_vertices_give_a_deterministic_generic_weight() {
        let attrs = attrs_const(10, 2.0, 4.0, 0.15, 0.85);
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let mut rng = StreamKey::new(2).rng();
        for _ in 0..100 {
            let g = law.sample_generic(&mut rng);
            assert_eq!(g.weight, 0.85 / 4.0);
            assert_eq!(g.count, 2);
        }
    }

    #[test]
    fn dcm_generic_mean_nc_matches_direct_summation() {
        // Oracle: E[NC] = (zeta / L_n) * sum_s D_s^- 1(D_s^+ >= 1).
        let cfg = AttributeSequenceConfig::benchmark(100_000, Dependence::Independent);
        let key = StreamKey::new(14);
        let attrs = sample_attributes(&cfg, AttributeKind::DcmDegrees, &mut key.child(0).rng())
            .unwrap();
        let l_n: f64 = attrs.iter().map(|a| a.out_param).sum();
        let oracle = 0.85 / l_n
            * attrs
                .iter()
                .filter(|a| a.out_param >= 1.0)
                .map(|a| a.in_param)
                .sum::<f64>();
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let mut rng = key.child(1).rng();
        let draws = 200_000;
        let samples: Vec<f64> = (0..draws)
            .map(|_| {
                let g = law.sample_generic(&mut rng);
                g.count as f64 * g.weight
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / draws as f64;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / draws as f64;
        let se = (var / draws as f64).sqrt();
        assert!(
            (mean - oracle).abs() < 3.0 * se,
            "mean {mean} vs oracle {oracle} (se {se})"
        );
    }

    #[test]
    fn ird_zero_in_weights_make_the_root_childless() {
        let attrs = attrs_const(50, 0.0, 2.0, 0.3, 0.5);
        let law = BranchingLaw::from_ird_attrs(&attrs, 2.0).unwrap();
        let mut rng = StreamKey::new(3).rng();
        for _ in 0..200 {
            assert_eq!(law.sample_root(&mut rng).count, 0);
        }
        // R* = Q_0 always.
        let pool = population_dynamics(&law, 100, 3, StreamKey::new(4)).unwrap();
        let r = sample_r_star(&law, &pool, 500, StreamKey::new(5)).unwrap();
        assert!(r.sorted().iter().all(|&x| x == 0.3));
    }

    #[test]
    fn analytic_ird_root_mean_matches_10_91() {
        let cfg = AttributeSequenceConfig::benchmark(1, Dependence::Independent);
        let law = BranchingLaw::from_ird_config(&cfg).unwrap();
        let mut rng = StreamKey::new(6).rng();
        let draws = 100_000;
        let counts: Vec<f64> = (0..draws)
            .map(|_| law.sample_root(&mut rng).count as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / draws as f64;
        let var = counts.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / draws as f64;
        let se = (var / draws as f64).sqrt();
        assert!(
            (mean - 10.909090909090908).abs() < 3.0 * se,
            "mean N_0 = {mean}, se {se}"
        );
    }

    #[test]
    fn constant_weight_generic_c_matches_poisson_identity() {
        // W^- = W^+ = w and zeta = c give C = c/(Z^+ + 1) with
        // Z^+ ~ Poisson(lambda), lambda = E[W^-] w / theta = w/2, and
        // E[1/(Z^+ + 1)] = (1 - e^-lambda)/lambda.
        let w = 5.0;
        let zeta = 0.85;
        let attrs = attrs_const(20, w, w, 0.15, zeta);
        let law = BranchingLaw::from_ird_attrs(&attrs, 2.0 * w).unwrap();
        let lambda = w / 2.0;
        let closed_form = zeta * (1.0 - (-lambda).exp()) / lambda;
        let mut rng = StreamKey::new(7).rng();
        let draws = 200_000;
        let weights: Vec<f64> = (0..draws)
            .map(|_| law.sample_generic(&mut rng).weight)
            .collect();
        let mean = weights.iter().sum::<f64>() / draws as f64;
        let var = weights.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / draws as f64;
        let se = (var / draws as f64).sqrt();
        assert!(
            (mean - closed_form).abs() < 3.0 * se,
            "E[C] {mean} vs {closed_form} (se {se})"
        );
    }

    #[test]
    fn deterministic_chain_pool_matches_geometric_series() {
        // N = 1, C = 0.5, Q = 0.3: pool_J = c q (1 - c^J) / (1 - c).
        let (c, q, gens) = (0.5, 0.3, 40u32);
        let attrs = attrs_const(5, 1.0, 1.0, q, c);
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let pool = population_dynamics(&law, 200, gens, StreamKey::new(8)).unwrap();
        let expected = c * q * (1.0 - c.powi(gens as i32)) / (1.0 - c);
        for &x in &pool.samples {
            assert!((x - expected).abs() < 1e-9, "{x} vs {expected}");
        }
    }

    #[test]
    fn childless_generic_law_collapses_to_cq() {
        let attrs = attrs_const(5, 0.0, 2.0, 0.4, 0.6);
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let pool = population_dynamics(&law, 100, 1, StreamKey::new(9)).unwrap();
        for &x in &pool.samples {
            assert_eq!(x, 0.6 / 2.0 * 0.4);
        }
    }

    #[test]
    fn pool_mean_matches_fixed_point_identity() {
        // E[X] = E[CQ] / (1 - E[NC]) for contracting laws; oracle moments
        // by direct Monte Carlo on the generic sampler.
        let cfg = AttributeSequenceConfig::benchmark(20_000, Dependence::PowerCoupled);
        let key = StreamKey::new(10);
        let attrs = sample_attributes(&cfg, AttributeKind::DcmDegrees, &mut key.child(0).rng())
            .unwrap();
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let mut rng = key.child(1).rng();
        let draws = 400_000;
        let (mut cq_sum, mut cq_sq, mut nc_sum, mut nc_sq) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..draws {
            let g = law.sample_generic(&mut rng);
            let cq = g.weight * g.q;
            let nc = g.count as f64 * g.weight;
            cq_sum += cq;
            cq_sq += cq * cq;
            nc_sum += nc;
            nc_sq += nc * nc;
        }
        let d = draws as f64;
        let (cq_mean, nc_mean) = (cq_sum / d, nc_sum / d);
        let cq_se = ((cq_sq / d - cq_mean * cq_mean) / d).sqrt();
        let nc_se = ((nc_sq / d - nc_mean * nc_mean) / d).sqrt();
        let predicted = cq_mean / (1.0 - nc_mean);
        // Delta-method propagation of the two oracle errors.
        let pred_se = ((cq_se / (1.0 - nc_mean)).powi(2)
            + (cq_mean * nc_se / (1.0 - nc_mean).powi(2)).powi(2))
        .sqrt();

        let pool = population_dynamics(&law, 50_000, 25, key.child(2)).unwrap();
        let pool_se = (pool.variance() / pool.samples.len() as f64).sqrt();
        let tol = 3.0 * (pred_se.powi(2) + pool_se.powi(2)).sqrt();
        assert!(
            (pool.mean() - predicted).abs() < tol,
            "pool mean {} vs predicted {predicted} (tol {tol})",
            pool.mean()
        );
    }

    #[test]
    fn r_star_passthrough_when_root_is_a_single_zero_mark() {
        // N_0 = 1, Q_0 = 0: R* resamples the pool.
        let attrs = attrs_const(5, 1.0, 1.0, 0.0, 0.5);
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let pool = FixedPointPool {
            samples: vec![1.0, 2.0, 4.0],
            generations: 0,
            rho1_estimate: 0.5,
            law_provenance: Provenance::DcmEmpirical,
        };
        let r = sample_r_star(&law, &pool, 30_000, StreamKey::new(11)).unwrap();
        assert!(r.sorted().iter().all(|&x| [1.0, 2.0, 4.0].contains(&x)));
        // Uniform resampling: each atom near 1/3.
        let third = r.sorted().iter().filter(|&&x| x == 2.0).count() as f64 / 30_000.0;
        assert!((third - 1.0 / 3.0).abs() < 0.02, "{third}");
    }

    #[test]
    fn r_star_mean_obeys_walds_identity() {
        let cfg = AttributeSequenceConfig::benchmark(20_000, Dependence::Independent);
        let key = StreamKey::new(12);
        let attrs = sample_attributes(&cfg, AttributeKind::DcmDegrees, &mut key.child(0).rng())
            .unwrap();
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let pool = population_dynamics(&law, 50_000, 25, key.child(1)).unwrap();
        let count = 100_000;
        let r = sample_r_star(&law, &pool, count, key.child(2)).unwrap();
        // Oracle: E[R*] = E[Q_0] + E[N_0] E[X] with direct moments.
        let n = attrs.len() as f64;
        let e_q0 = attrs.iter().map(|a| a.q).sum::<f64>() / n;
        let e_n0 = attrs.iter().map(|a| a.in_param).sum::<f64>() / n;
        let predicted = e_q0 + e_n0 * pool.mean();
        let var = r
            .sorted()
            .iter()
            .map(|x| (x - r.mean()) * (x - r.mean()))
            .sum::<f64>()
            / count as f64;
        let se = (var / count as f64).sqrt();
        // Pool-mean uncertainty scaled by E[N_0] adds to the R* noise.
        let pool_se = (pool.variance() / pool.samples.len() as f64).sqrt();
        let tol = 3.0 * (se.powi(2) + (e_n0 * pool_se).powi(2)).sqrt();
        assert!(
            (r.mean() - predicted).abs() < tol,
            "R* mean {} vs {predicted} (tol {tol})",
            r.mean()
        );
    }

    #[test]
    fn tree_rank_depth_zero_returns_q0() {
        let attrs = attrs_const(5, 3.0, 2.0, 0.7, 0.5);
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let mut rng = StreamKey::new(13).rng();
        for _ in 0..20 {
            assert_eq!(
                simulate_tree_rank(&law, 0, &mut rng, DEFAULT_NODE_BUDGET),
                TreeRank::Rank(0.7)
            );
        }
    }

    #[test]
    fn deterministic_chain_tree_rank_is_a_geometric_sum() {
        let (c, q) = (0.5, 0.4);
        let attrs = attrs_const(5, 1.0, 1.0, q, c);
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let mut rng = StreamKey::new(14).rng();
        for k in [0u32, 1, 3, 10] {
            let expected = q * (1.0 - c.powi(k as i32 + 1)) / (1.0 - c);
            match simulate_tree_rank(&law, k, &mut rng, DEFAULT_NODE_BUDGET) {
                TreeRank::Rank(r) => assert!((r - expected).abs() < 1e-12, "k={k}: {r}"),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn tree_rank_respects_the_node_budget() {
        let attrs = attrs_const(5, 5.0, 5.0, 0.15, 0.85);
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let mut rng = StreamKey::new(15).rng();
        match simulate_tree_rank(&law, 10, &mut rng, 100) {
            TreeRank::BudgetExceeded { nodes } => assert!(nodes > 100),
            TreeRank::Rank(_) => panic!("a 5-ary tree of depth 10 must blow the budget"),
        }
    }

    #[test]
    fn tree_rank_and_r_star_distributions_converge_together() {
        // Subcritical offspring so depth 30 is cheap; the Wasserstein gap
        // is bounded by twice the geometric tail plus Monte Carlo noise.
        let (c, q, depth) = (0.6f64, 0.4, 30u32);
        let attrs = vec![
            VertexAttributes {
                in_param: 0.0,
                out_param: 1.0,
                q,
                zeta: c,
            },
            VertexAttributes {
                in_param: 2.0,
                out_param: 1.0,
                q,
                zeta: c,
            },
        ];
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let key = StreamKey::new(16);
        let pool = population_dynamics(&law, 50_000, 40, key.child(0)).unwrap();
        let draws = 100_000;
        let r_star = sample_r_star(&law, &pool, draws, key.child(1)).unwrap();
        let mut rng = key.child(2).rng();
        let tree: Vec<f64> = (0..draws)
            .map(|_| match simulate_tree_rank(&law, depth, &mut rng, DEFAULT_NODE_BUDGET) {
                TreeRank::Rank(r) => r,
                TreeRank::BudgetExceeded { .. } => panic!("subcritical law within budget"),
            })
            .collect();
        let tree_dist = EmpiricalDistribution::new(tree).unwrap();
        let d1 = wasserstein1(&r_star, &tree_dist);
        let geometric_tail = 2.0 * c.powi(depth as i32 + 1) / (1.0 - c) * q.abs();
        // Monte Carlo allowance: two-sample fluctuation at 1e5 draws.
        let allowance = 0.02;
        assert!(
            d1 <= geometric_tail + allowance,
            "d1 {d1} vs bound {}",
            geometric_tail + allowance
        );
    }

    #[test]
    fn pool_entries_respect_the_chain_worst_case_bound() {
        // For offspring counts <= 1 the recursion's deterministic worst
        // case is |X| <= c max|Q| / (1 - c).
        let (c, q) = (0.7, 1.3);
        let attrs = vec![
            VertexAttributes {
                in_param: 1.0,
                out_param: 2.0,
                q,
                zeta: c,
            },
            VertexAttributes {
                in_param: 0.0,
                out_param: 1.0,
                q: -q,
                zeta: -c,
            },
        ];
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let pool = population_dynamics(&law, 20_000, 30, StreamKey::new(17)).unwrap();
        let bound = c * q / (1.0 - c) + 1e-12;
        assert!(pool.samples.iter().all(|x| x.abs() <= bound));
    }

    #[test]
    fn regenerated_pool_shifts_r_star_within_the_two_sample_fluctuation() {
        let cfg = AttributeSequenceConfig::benchmark(10_000, Dependence::Independent);
        let key = StreamKey::new(18);
        let attrs = sample_attributes(&cfg, AttributeKind::DcmDegrees, &mut key.child(0).rng())
            .unwrap();
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let draws = 40_000;
        let pool_a = population_dynamics(&law, 30_000, 20, key.child(1)).unwrap();
        let pool_b = population_dynamics(&law, 30_000, 20, key.child(2)).unwrap();
        let ra = sample_r_star(&law, &pool_a, draws, key.child(3)).unwrap();
        let rb = sample_r_star(&law, &pool_b, draws, key.child(4)).unwrap();
        let cross = wasserstein1(&ra, &rb);
        // Calibration: two independent sampling runs over the same pool
        // measure the pure two-sample Monte Carlo fluctuation.
        let rc1 = sample_r_star(&law, &pool_a, draws, key.child(5)).unwrap();
        let rc2 = sample_r_star(&law, &pool_a, draws, key.child(6)).unwrap();
        let calib = wasserstein1(&rc1, &rc2);
        assert!(
            cross <= 2.0 * calib,
            "cross-pool d1 {cross} vs calibration {calib}"
        );
    }

    #[test]
    fn tree_rank_means_stabilize_in_depth() {
        let (c, q) = (0.6, 0.4);
        let attrs = vec![
            VertexAttributes {
                in_param: 0.0,
                out_param: 1.0,
                q,
                zeta: c,
            },
            VertexAttributes {
                in_param: 2.0,
                out_param: 1.0,
                q,
                zeta: c,
            },
        ];
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        let key = StreamKey::new(19);
        let draws = 50_000;
        let mean_at = |depth: u32, branch: u64| -> f64 {
            let mut rng = key.child(branch).rng();
            (0..draws)
                .map(|_| match simulate_tree_rank(&law, depth, &mut rng, DEFAULT_NODE_BUDGET) {
                    TreeRank::Rank(r) => r,
                    _ => unreachable!(),
                })
                .sum::<f64>()
                / draws as f64
        };
        let (k, shallow_branch, deep_branch) = (8u32, 0u64, 1u64);
        let shallow = mean_at(k, shallow_branch);
        let deep = mean_at(k + 10, deep_branch);
        let bound = crate::pagerank::iteration_error_bound(c, k, q);
        // 3 standard errors of the difference of two independent means.
        let se = 3.0 * (2.0 * 1.0 / draws as f64).sqrt();
        assert!(
            (deep - shallow).abs() <= bound + se,
            "depth gap {} vs {}",
            (deep - shallow).abs(),
            bound + se
        );
    }

    #[test]
    fn divergent_law_is_reported() {
        // N = 3 children each with C = 0.85: rho_1 = 2.55 > 1.
        let attrs = attrs_const(5, 3.0, 1.0, 1.0, 0.85);
        let law = BranchingLaw::from_dcm_attrs(&attrs).unwrap();
        match population_dynamics(&law, 500, 200, StreamKey::new(20)) {
            Err(BranchingError::PoolDiverged { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn constructor_validation() {
        assert!(matches!(
            BranchingLaw::from_dcm_attrs(&[]),
            Err(BranchingError::EmptyAttributes)
        ));
        let zero_out = attrs_const(3, 2.0, 0.0, 0.1, 0.5);
        assert!(matches!(
            BranchingLaw::from_dcm_attrs(&zero_out),
            Err(BranchingError::NoOutMass)
        ));
        let fractional = attrs_const(3, 1.5, 1.0, 0.1, 0.5);
        assert!(matches!(
            BranchingLaw::from_dcm_attrs(&fractional),
            Err(BranchingError::NonIntegerDegree { .. })
        ));
        let ird = attrs_const(3, 1.0, 1.0, 0.1, 0.5);
        assert!(matches!(
            BranchingLaw::from_ird_attrs(&ird, -1.0),
            Err(BranchingError::InvalidTheta(_))
        ));
    }
}
