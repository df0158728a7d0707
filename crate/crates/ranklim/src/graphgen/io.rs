//! Graph persistence: `{prefix}.edges.csv`, `{prefix}.attrs.csv`, and a
//! `{prefix}.json` header recording the model tag and provenance.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::graph::{DiGraph, ModelTag};
use super::{AttributeSequenceConfig, GraphGenError, VertexAttributes};

/// JSON header written next to the CSV pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphHeader {
    pub model_tag: ModelTag,
    pub n: usize,
    pub edge_count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config: Option<AttributeSequenceConfig>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifest_digest: Option<String>,
}

fn path_with(prefix: &Path, suffix: &str) -> std::path::PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    prefix.with_file_name(name)
}

/// Write the three graph files under the given path prefix.
pub fn write_graph(prefix: &Path, graph: &DiGraph, header: &GraphHeader) -> Result<(), GraphGenError> {
    if let Some(dir) = prefix.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut edges = csv::Writer::from_path(path_with(prefix, ".edges.csv"))?;
    edges
        .write_record(["src", "dst"])
        .map_err(|e| GraphGenError::Parse(e.to_string()))?;
    for (s, d) in graph.edges() {
        edges
            .write_record([s.to_string(), d.to_string()])
            .map_err(|e| GraphGenError::Parse(e.to_string()))?;
    }
    edges.flush()?;

    let mut attrs = csv::Writer::from_path(path_with(prefix, ".attrs.csv"))?;
    attrs
        .write_record(["vertex", "in_param", "out_param", "q", "zeta"])
        .map_err(|e| GraphGenError::Parse(e.to_string()))?;
    for (v, a) in graph.attrs().iter().enumerate() {
        attrs
            .write_record([
                v.to_string(),
                a.in_param.to_string(),
                a.out_param.to_string(),
                a.q.to_string(),
                a.zeta.to_string(),
            ])
            .map_err(|e| GraphGenError::Parse(e.to_string()))?;
    }
    attrs.flush()?;

    let json = serde_json::to_string_pretty(header)
        .map_err(|e| GraphGenError::Parse(e.to_string()))?;
    fs::write(path_with(prefix, ".json"), json + "\n")?;
    Ok(())
}

/// Read a graph written by [`write_graph`].
pub fn read_graph(prefix: &Path) -> Result<(DiGraph, GraphHeader), GraphGenError> {
    let header: GraphHeader = serde_json::from_str(
        &fs::read_to_string(path_with(prefix, ".json"))?,
    )
    .map_err(|e| GraphGenError::Parse(format!("header: {e}")))?;

    let attrs = read_attributes(&path_with(prefix, ".attrs.csv"))?;
    if attrs.len() != header.n {
        return Err(GraphGenError::AttributeLengthMismatch {
            expected: header.n,
            found: attrs.len(),
        });
    }

    let mut edges = Vec::new();
    let mut reader = csv::Reader::from_path(path_with(prefix, ".edges.csv"))?;
    for record in reader.records() {
        let record = record.map_err(|e| GraphGenError::Parse(e.to_string()))?;
        let src: u32 = record
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GraphGenError::Parse(format!("bad edge row: {record:?}")))?;
        let dst: u32 = record
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GraphGenError::Parse(format!("bad edge row: {record:?}")))?;
        edges.push((src, dst));
    }
    let graph = DiGraph::from_edges(header.n, &edges, attrs, header.model_tag)?;
    Ok((graph, header))
}

/// Read a bare attribute CSV (`vertex,in_param,out_param,q,zeta`).
pub fn read_attributes(path: &Path) -> Result<Vec<VertexAttributes>, GraphGenError> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows: Vec<(usize, VertexAttributes)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| GraphGenError::Parse(e.to_string()))?;
        let field = |i: usize| -> Result<f64, GraphGenError> {
            record
                .get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| GraphGenError::Parse(format!("bad attribute row: {record:?}")))
        };
        let vertex = field(0)? as usize;
        rows.push((
            vertex,
            VertexAttributes {
                in_param: field(1)?,
                out_param: field(2)?,
                q: field(3)?,
                zeta: field(4)?,
            },
        ));
    }
    rows.sort_by_key(|&(v, _)| v);
    for (pos, &(v, _)) in rows.iter().enumerate() {
        if pos != v {
            return Err(GraphGenError::Parse(format!(
                "attribute rows must cover 0..n, missing vertex {pos}, found {v}"
            )));
        }
    }
    Ok(rows.into_iter().map(|(_, a)| a).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::{
        build_dcm, sample_attributes, AttributeKind, DcmMode,
        Dependence,
    };
    use crate::rng::StreamKey;

    #[test]
    fn round_trips_a_graph_through_csv() {
        let cfg = AttributeSequenceConfig::benchmark(200, Dependence::Independent);
        let key = StreamKey::new(4);
        let attrs =
            sample_attributes(&cfg, AttributeKind::DcmDegrees, &mut key.child(0).rng()).unwrap();
        let graph = build_dcm(attrs, DcmMode::Multigraph, &mut key.child(1).rng(), 1)
            .unwrap()
            .into_graph();
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("g");
        let header = GraphHeader {
            model_tag: graph.model_tag(),
            n: graph.vertex_count(),
            edge_count: graph.edge_count(),
            seed: Some(4),
            config: Some(cfg),
            theta: None,
            manifest_digest: None,
        };
        write_graph(&prefix, &graph, &header).unwrap();
        let (loaded, loaded_header) = read_graph(&prefix).unwrap();
        assert_eq!(loaded.vertex_count(), graph.vertex_count());
        assert_eq!(loaded.edge_count(), graph.edge_count());
        assert_eq!(
            loaded.edges().collect::<Vec<_>>(),
            graph.edges().collect::<Vec<_>>()
        );
        assert_eq!(loaded.attrs(), graph.attrs());
        assert_eq!(loaded_header.seed, Some(4));
    }
}
