//! Immutable directed multigraph in compressed adjacency form.

use serde::{Deserialize, Serialize};

use super::{GraphGenError, VertexAttributes};

/// Which generator produced the graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    DcmMultigraph,
    DcmRepeated,
    DcmErased,
    Ird,
}

/// Directed multigraph with per-vertex attributes.
///
/// Edges are stored twice, as forward (out-neighbor) and reverse
/// (in-neighbor) compressed adjacency lists encoding the same edge
/// multiset; neighbor lists are kept sorted so that equal graphs have
/// identical representations. The structure is immutable after
/// construction and safe to share across threads.
#[derive(Clone, Debug)]
pub struct DiGraph {
    n: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    attrs: Vec<VertexAttributes>,
    model_tag: ModelTag,
}

impl DiGraph {
    /// Build from an edge list. Vertex ids must lie in `0..n` and the
    /// attribute table must have length `n`.
    pub fn from_edges(
        n: usize,
        edges: &[(u32, u32)],
        attrs: Vec<VertexAttributes>,
        model_tag: ModelTag,
    ) -> Result<Self, GraphGenError> {
        if attrs.len() != n {
            return Err(GraphGenError::AttributeLengthMismatch {
                expected: n,
                found: attrs.len(),
            });
        }
        if n > u32::MAX as usize {
            return Err(GraphGenError::TooManyVertices(n));
        }
        for &(s, d) in edges {
            if s as usize >= n || d as usize >= n {
                return Err(GraphGenError::VertexOutOfRange {
                    id: s.max(d),
                    n,
                });
            }
        }
        let (out_offsets, out_targets) = bucket(n, edges.iter().map(|&(s, d)| (s, d)));
        let (in_offsets, in_sources) = bucket(n, edges.iter().map(|&(s, d)| (d, s)));
        Ok(Self {
            n,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            attrs,
            model_tag,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    /// Targets of edges leaving `v`, sorted, with multiplicity.
    pub fn out_neighbors(&self, v: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    /// Sources of edges entering `v`, sorted, with multiplicity.
    pub fn in_neighbors(&self, v: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn attrs(&self) -> &[VertexAttributes] {
        &self.attrs
    }

    pub fn model_tag(&self) -> ModelTag {
        self.model_tag
    }

    /// Iterate all edges `(src, dst)` in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n).flat_map(move |v| {
            self.out_neighbors(v)
                .iter()
                .map(move |&d| (v as u32, d))
        })
    }

    /// True when the graph has no self-loops and no parallel edges in the
    /// same direction.
    pub fn is_simple(&self) -> bool {
        for v in 0..self.n {
            let targets = self.out_neighbors(v);
            for (idx, &d) in targets.iter().enumerate() {
                if d as usize == v {
                    return false;
                }
                if idx > 0 && targets[idx - 1] == d {
                    return false;
                }
            }
        }
        true
    }
}

/// Counting-sort pairs into a CSR layout with sorted buckets.
fn bucket(n: usize, pairs: impl Iterator<Item = (u32, u32)> + Clone) -> (Vec<usize>, Vec<u32>) {
    let mut offsets = vec![0usize; n + 1];
    for (key, _) in pairs.clone() {
        offsets[key as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut values = vec![0u32; offsets[n]];
    let mut cursor = offsets.clone();
    for (key, value) in pairs {
        values[cursor[key as usize]] = value;
        cursor[key as usize] += 1;
    }
    for v in 0..n {
        values[offsets[v]..offsets[v + 1]].sort_unstable();
    }
    (offsets, values)
}
