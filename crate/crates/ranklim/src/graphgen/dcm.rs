//! Directed configuration model: uniform pairing of half-edges.

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use super::graph::{DiGraph, ModelTag};
use super::{dcm_degrees, GraphGenError, VertexAttributes};

/// How self-loops and parallel edges are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcmMode {
    /// Keep the raw pairing, multi-edges and all.
    Multigraph,
    /// Re-pair until the realization is simple.
    Repeated,
    /// Pair once, then delete self-loops and collapse parallel edges.
    Erased,
}

pub const DEFAULT_MAX_ATTEMPTS: u32 = 100;

/// Outcome of a DCM build. Repeated mode may exhaust its attempt budget
/// without finding a simple realization, in which case the last multigraph
/// pairing is returned for inspection.
#[derive(Debug)]
pub enum DcmBuild {
    Built(DiGraph),
    AttemptsExhausted { attempts: u32, last: DiGraph },
}

impl DcmBuild {
    /// Unwrap the graph regardless of outcome.
    pub fn into_graph(self) -> DiGraph {
        match self {
            DcmBuild::Built(g) => g,
            DcmBuild::AttemptsExhausted { last, .. } => last,
        }
    }

    pub fn graph(&self) -> &DiGraph {
        match self {
            DcmBuild::Built(g) => g,
            DcmBuild::AttemptsExhausted { last, .. } => last,
        }
    }
}

/// Materialize a DCM from a balanced integer degree sequence.
///
/// Each vertex `i` contributes `D_i^-` inbound and `D_i^+` outbound
/// half-edges; a uniform random permutation of the outbound half-edges is
/// matched against the inbound ones in order, which realizes the uniform
/// pairing.
pub fn build_dcm(
    attrs: Vec<VertexAttributes>,
    mode: DcmMode,
    rng: &mut ChaCha12Rng,
    max_attempts: u32,
) -> Result<DcmBuild, GraphGenError> {
    let (d_in, d_out, _l_n) = dcm_degrees(&attrs)?;
    if mode == DcmMode::Repeated && max_attempts == 0 {
        return Err(GraphGenError::ZeroAttempts);
    }
    let n = attrs.len();
    let in_owner = stub_owners(&d_in);
    let mut out_owner = stub_owners(&d_out);

    match mode {
        DcmMode::Multigraph => {
            let edges = pair(&mut out_owner, &in_owner, rng);
            Ok(DcmBuild::Built(DiGraph::from_edges(
                n,
                &edges,
                attrs,
                ModelTag::DcmMultigraph,
            )?))
        }
        DcmMode::Repeated => {
            let mut last = pair(&mut out_owner, &in_owner, rng);
            for attempt in 1..=max_attempts {
                if is_simple_edge_list(&mut last) {
                    return Ok(DcmBuild::Built(DiGraph::from_edges(
                        n,
                        &last,
                        attrs,
                        ModelTag::DcmRepeated,
                    )?));
                }
                if attempt < max_attempts {
                    last = pair(&mut out_owner, &in_owner, rng);
                }
            }
            Ok(DcmBuild::AttemptsExhausted {
                attempts: max_attempts,
                last: DiGraph::from_edges(n, &last, attrs, ModelTag::DcmMultigraph)?,
            })
        }
        DcmMode::Erased => {
            let mut edges = pair(&mut out_owner, &in_owner, rng);
            edges.retain(|&(s, d)| s != d);
            edges.sort_unstable();
            edges.dedup();
            Ok(DcmBuild::Built(DiGraph::from_edges(
                n,
                &edges,
                attrs,
                ModelTag::DcmErased,
            )?))
        }
    }
}

/// Expand a degree vector into one owner id per half-edge.
fn stub_owners(degrees: &[u64]) -> Vec<u32> {
    let total: u64 = degrees.iter().sum();
    let mut owners = Vec::with_capacity(total as usize);
    for (v, &d) in degrees.iter().enumerate() {
        owners.extend(std::iter::repeat(v as u32).take(d as usize));
    }
    owners
}

/// Shuffle the outbound owners and zip them with the inbound owners.
fn pair(out_owner: &mut [u32], in_owner: &[u32], rng: &mut ChaCha12Rng) -> Vec<(u32, u32)> {
    // Fisher-Yates; a fresh uniform permutation every call.
    for i in (1..out_owner.len()).rev() {
        let j = rng.random_range(0..=i);
        out_owner.swap(i, j);
    }
    out_owner
        .iter()
        .zip(in_owner)
        .map(|(&s, &d)| (s, d))
        .collect()
}

/// Simplicity test on a raw edge list; sorts the list in place.
fn is_simple_edge_list(edges: &mut [(u32, u32)]) -> bool {
    if edges.iter().any(|&(s, d)| s == d) {
        return false;
    }
    edges.sort_unstable();
    edges.windows(2).all(|w| w[0] != w[1])
}
