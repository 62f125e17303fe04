use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::partition::PartitionedGraph;

/// Dataset characteristics in the column layout of the input-graph table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DatasetStats {
    pub vertices: usize,
    pub edges: usize,
    /// Sum of boundary-vertex counts over all partitions.
    pub boundary_vertices: usize,
    pub parts: usize,
    pub cut_edges: usize,
    pub edge_cut_pct: f64,
    /// `max_i |(|V| - n * |V_i|) / |V|| * 100`.
    pub imbalance_pct: f64,
}

impl DatasetStats {
    pub fn compute(pg: &PartitionedGraph) -> Self {
        let v = pg.graph.vertex_count();
        let e = pg.graph.edge_count();
        let n = pg.partitions.len();
        let cut = pg.cut_edges();
        let imbalance = pg
            .partitions
            .iter()
            .map(|p| (v as f64 - (n * p.vertices.len()) as f64).abs() / v.max(1) as f64)
            .fold(0.0, f64::max);
        DatasetStats {
            vertices: v,
            edges: e,
            boundary_vertices: pg.partitions.iter().map(|p| p.boundary_count()).sum(),
            parts: n,
            cut_edges: cut,
            edge_cut_pct: if e == 0 { 0.0 } else { 100.0 * cut as f64 / e as f64 },
            imbalance_pct: 100.0 * imbalance,
        }
    }
}

/// Degree -> number of vertices with that degree.
pub fn degree_histogram(graph: &Graph) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for v in graph.vertices() {
        *h.entry(graph.degree(v)).or_default() += 1;
    }
    h
}
