use std::collections::HashMap;

use serde::Serialize;

use crate::graph::{Graph, VertexId};

/// Closed walk `v_0, ..., v_m` with `v_0 == v_m`; empty for an edgeless graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EulerCircuit {
    pub walk: Vec<VertexId>,
}

impl EulerCircuit {
    pub fn edge_count(&self) -> usize {
        self.walk.len().saturating_sub(1)
    }

    /// Traversed undirected edges as sorted `(min, max)` pairs.
    pub fn edge_multiset(&self) -> Vec<(VertexId, VertexId)> {
        edge_multiset(&self.walk)
    }
}

pub fn edge_multiset(walk: &[VertexId]) -> Vec<(VertexId, VertexId)> {
    let mut e: Vec<_> = walk.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
    e.sort_unstable();
    e
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CircuitReport {
    pub pass: bool,
    pub closed: bool,
    pub edges: usize,
    /// Consecutive pairs that are not edges of the graph.
    pub non_edges: Vec<(VertexId, VertexId)>,
    /// Edges traversed more often than their multiplicity.
    pub duplicates: Vec<(VertexId, VertexId)>,
    /// Edges traversed fewer times than their multiplicity.
    pub missing: Vec<(VertexId, VertexId)>,
}

pub fn validate_circuit(graph: &Graph, walk: &[VertexId]) -> CircuitReport {
    let n = graph.vertex_count() as VertexId;
    let mut balance: HashMap<(VertexId, VertexId), i64> = HashMap::new();
    for (u, v) in graph.edges() {
        *balance.entry((u, v)).or_default() += 1;
    }
    let mut report = CircuitReport {
        closed: walk.first() == walk.last(),
        edges: walk.len().saturating_sub(1),
        ..Default::default()
    };
    for w in walk.windows(2) {
        let key = (w[0].min(w[1]), w[0].max(w[1]));
        match balance.get_mut(&key) {
            Some(c) if key.1 < n => *c -= 1,
            _ => report.non_edges.push(key),
        }
    }
    for (&key, &c) in &balance {
        if c < 0 {
            report.duplicates.push(key);
        } else if c > 0 {
            report.missing.push(key);
        }
    }
    report.duplicates.sort_unstable();
    report.missing.sort_unstable();
    report.pass = report.closed
        && report.non_edges.is_empty()
        && report.duplicates.is_empty()
        && report.missing.is_empty()
        && (walk.len() != 1 || graph.edge_count() == 0);
    report
}
