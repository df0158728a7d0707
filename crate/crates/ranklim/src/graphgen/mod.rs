//! Scale-free attribute sampling and directed random graph generation.
//!
//! Two models are supported:
//!
//! * the directed configuration model (DCM): every vertex gets a prescribed
//!   number of inbound and outbound half-edges, and a uniform random
//!   permutation pairs them (multigraph, repeated-until-simple, and erased
//!   variants);
//! * the inhomogeneous random digraph (IRD): every ordered pair `(i, j)`,
//!   `i != j`, receives an edge independently with probability
//!   `min(1, W_i^+ W_j^- / (theta n))` — the directed Chung-Lu model.
//!
//! Vertex attributes are drawn from Pareto-type distributions, either
//! independently on the in and out side or deterministically power-coupled
//! to create positive in/out correlation.

mod dcm;
mod graph;
mod ird;
mod io;

pub use dcm::{build_dcm, DcmBuild, DcmMode, DEFAULT_MAX_ATTEMPTS};
pub use graph::{DiGraph, ModelTag};
pub use ird::{build_ird, build_ird_with, expected_edge_count, IrdMethod};
pub use io::{read_attributes, read_graph, write_graph, GraphHeader};

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphGenError {
    #[error("vertex count must be positive")]
    EmptySequence,
    #[error("Pareto index {name} must exceed 1 for finite means, got {value}")]
    InfiniteMeanIndex { name: &'static str, value: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("damping factor must lie in (0,1), got {0}")]
    InvalidDamping(f64),
    #[error("|zeta| = {zeta} exceeds the damping factor {damping}")]
    ZetaExceedsDamping { zeta: f64, damping: f64 },
    #[error("attribute table length {found} does not match vertex count {expected}")]
    AttributeLengthMismatch { expected: usize, found: usize },
    #[error("vertex id {id} out of range for n = {n}")]
    VertexOutOfRange { id: u32, n: usize },
    #[error("vertex count {0} exceeds the 32-bit id space")]
    TooManyVertices(usize),
    #[error("DCM requires non-negative integer degrees, found {value} at vertex {vertex}")]
    NonIntegerDegree { vertex: usize, value: f64 },
    #[error("DCM half-edges are unbalanced: sum(D-) = {in_sum}, sum(D+) = {out_sum}")]
    UnbalancedDegrees { in_sum: u64, out_sum: u64 },
    #[error("repeated DCM requires max_attempts >= 1")]
    ZeroAttempts,
    #[error("IRD weights must be finite and non-negative, found {value} at vertex {vertex}")]
    InvalidWeight { vertex: usize, value: f64 },
    #[error("IRD requires theta > 0, got {0}")]
    InvalidTheta(f64),
    #[error("graph file error: {0}")]
    Io(#[from] std::io::Error),
    #[error("graph csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("graph file parse error: {0}")]
    Parse(String),
}

/// Per-vertex generation tuple: in/out degree parameters (integers for the
/// DCM, positive reals for the IRD), the personalization value `Q_i`, and
/// the weight `zeta_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexAttributes {
    pub in_param: f64,
    pub out_param: f64,
    pub q: f64,
    pub zeta: f64,
}

/// In/out dependence structure of the attribute sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dependence {
    /// `W^-` and `W^+` drawn independently.
    Independent,
    /// `W^+ = c_scale (W^- / b)^(alpha/beta)` exactly; same Pareto marginal
    /// for `W^+`, positive in/out correlation.
    PowerCoupled,
}

/// Parameters of the Pareto-type attribute sampler.
///
/// `in_param` has survival function `(x/b)^(-alpha)` for `x >= b`;
/// `out_param` is Pareto(`beta`, `c_scale`), either independent or
/// power-coupled. `q` and `zeta` are constant per sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeSequenceConfig {
    pub n: usize,
    pub alpha: f64,
    pub b: f64,
    pub beta: f64,
    pub c_scale: f64,
    pub dependence: Dependence,
    pub q_value: f64,
    pub zeta_value: f64,
    pub damping: f64,
}

impl AttributeSequenceConfig {
    /// The benchmark parameter set: Pareto(1.5, 8) in-weights,
    /// Pareto(2.5, 12) out-weights, damping 0.85, so the mean limiting
    /// degree is `E[W^-]E[W^+]/theta = 24 * 20 / 44 = 10.909...`.
    pub fn benchmark(n: usize, dependence: Dependence) -> Self {
        let damping = 0.85;
        Self {
            n,
            alpha: 1.5,
            b: 8.0,
            beta: 2.5,
            c_scale: 12.0,
            dependence,
            q_value: 1.0 - damping,
            zeta_value: damping,
            damping,
        }
    }

    pub fn validate(&self) -> Result<(), GraphGenError> {
        if self.n == 0 {
            return Err(GraphGenError::EmptySequence);
        }
        if self.alpha <= 1.0 {
            return Err(GraphGenError::InfiniteMeanIndex {
                name: "alpha",
                value: self.alpha,
            });
        }
        if self.beta <= 1.0 {
            return Err(GraphGenError::InfiniteMeanIndex {
                name: "beta",
                value: self.beta,
            });
        }
        if self.b <= 0.0 {
            return Err(GraphGenError::NonPositive {
                name: "b",
                value: self.b,
            });
        }
        if self.c_scale <= 0.0 {
            return Err(GraphGenError::NonPositive {
                name: "c_scale",
                value: self.c_scale,
            });
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(GraphGenError::InvalidDamping(self.damping));
        }
        if self.zeta_value.abs() > self.damping {
            return Err(GraphGenError::ZetaExceedsDamping {
                zeta: self.zeta_value,
                damping: self.damping,
            });
        }
        Ok(())
    }

    /// The deterministic out-parameter under power coupling.
    pub fn power_coupling(&self, w_minus: f64) -> f64 {
        self.c_scale * (w_minus / self.b).powf(self.alpha / self.beta)
    }

    /// Analytic `E[W^-] = b alpha / (alpha - 1)`.
    pub fn mean_in_param(&self) -> f64 {
        self.b * self.alpha / (self.alpha - 1.0)
    }

    /// Analytic `E[W^+] = c_scale beta / (beta - 1)`; the power coupling
    /// preserves the Pareto(beta, c_scale) marginal, so this holds in both
    /// dependence modes.
    pub fn mean_out_param(&self) -> f64 {
        self.c_scale * self.beta / (self.beta - 1.0)
    }

    /// Analytic `theta = E[W^- + W^+]`.
    pub fn analytic_theta(&self) -> f64 {
        self.mean_in_param() + self.mean_out_param()
    }
}

/// Whether sampled attributes are integer degrees (DCM) or real weights (IRD).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttributeKind {
    DcmDegrees,
    IrdWeights,
}

/// Pareto draw with survival `(x/scale)^(-shape)` for `x >= scale`.
#[inline]
pub(crate) fn pareto<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64) -> f64 {
    let u: f64 = rng.sample(rand::distr::OpenClosed01);
    scale * u.powf(-1.0 / shape)
}

/// Sample `n` i.i.d. attribute tuples.
///
/// In [`AttributeKind::DcmDegrees`] mode each Pareto draw is floored to an
/// integer degree and the half-edge imbalance `sum(D-) - sum(D+)` is then
/// repaired so the sequence is pairable: the deficit is spread as evenly as
/// possible, one base increment per vertex plus the remainder at distinct
/// vertices chosen uniformly without replacement.
pub fn sample_attributes(
    config: &AttributeSequenceConfig,
    kind: AttributeKind,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<VertexAttributes>, GraphGenError> {
    config.validate()?;
    let mut attrs = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let w_minus = pareto(rng, config.alpha, config.b);
        let w_plus = match config.dependence {
            Dependence::Independent => pareto(rng, config.beta, config.c_scale),
            Dependence::PowerCoupled => config.power_coupling(w_minus),
        };
        let (in_param, out_param) = match kind {
            AttributeKind::IrdWeights => (w_minus, w_plus),
            AttributeKind::DcmDegrees => (w_minus.floor(), w_plus.floor()),
        };
        attrs.push(VertexAttributes {
            in_param,
            out_param,
            q: config.q_value,
            zeta: config.zeta_value,
        });
    }
    if kind == AttributeKind::DcmDegrees {
        repair_half_edge_balance(&mut attrs, rng);
    }
    Ok(attrs)
}

/// Add `|delta|` unit degrees on the deficient side so that
/// `sum(D-) == sum(D+)`.
fn repair_half_edge_balance(attrs: &mut [VertexAttributes], rng: &mut ChaCha12Rng) {
    let in_sum: i64 = attrs.iter().map(|a| a.in_param as i64).sum();
    let out_sum: i64 = attrs.iter().map(|a| a.out_param as i64).sum();
    let delta = in_sum - out_sum;
    if delta == 0 {
        return;
    }
    let deficit = delta.unsigned_abs();
    let n = attrs.len() as u64;
    let base = deficit / n;
    let remainder = (deficit % n) as usize;
    let bump = |a: &mut VertexAttributes, units: f64| {
        if delta > 0 {
            a.out_param += units;
        } else {
            a.in_param += units;
        }
    };
    if base > 0 {
        for a in attrs.iter_mut() {
            bump(a, base as f64);
        }
    }
    // Partial Fisher-Yates: the first `remainder` entries of a uniformly
    // shuffled index vector are a without-replacement sample.
    let mut indexes: Vec<usize> = (0..attrs.len()).collect();
    for i in 0..remainder {
        let j = rng.random_range(i..indexes.len());
        indexes.swap(i, j);
    }
    for &v in &indexes[..remainder] {
        bump(&mut attrs[v], 1.0);
    }
}

/// Validate a DCM degree sequence and return `(degrees-, degrees+, L_n)`.
pub(crate) fn dcm_degrees(
    attrs: &[VertexAttributes],
) -> Result<(Vec<u64>, Vec<u64>, u64), GraphGenError> {
    if attrs.is_empty() {
        return Err(GraphGenError::EmptySequence);
    }
    let mut d_in = Vec::with_capacity(attrs.len());
    let mut d_out = Vec::with_capacity(attrs.len());
    for (vertex, a) in attrs.iter().enumerate() {
        for value in [a.in_param, a.out_param] {
            if !(value.is_finite() && value >= 0.0 && value.fract() == 0.0) {
                return Err(GraphGenError::NonIntegerDegree { vertex, value });
            }
        }
        d_in.push(a.in_param as u64);
        d_out.push(a.out_param as u64);
    }
    let in_sum: u64 = d_in.iter().sum();
    let out_sum: u64 = d_out.iter().sum();
    if in_sum != out_sum {
        return Err(GraphGenError::UnbalancedDegrees { in_sum, out_sum });
    }
    Ok((d_in, d_out, in_sum))
}
