//! Undirected multigraphs stored as mirrored arc pairs.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};

/// Dense, 0-based vertex identifier.
pub type VertexId = u32;

/// An undirected multigraph in compressed adjacency form.
///
/// Every undirected edge `{u, v}` is stored as the arc `u -> v` in the
/// neighbor list of `u` and the arc `v -> u` in the list of `v`. Neighbor
/// lists are sorted, so parallel edges show up as repeated entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
}

impl Graph {
    /// Builds a graph over `vertex_count` vertices from undirected edges.
    ///
    /// Self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(vertex_count: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut degree = vec![0usize; vertex_count];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop { vertex: u as u64 });
            }
            for w in [u, v] {
                if w as usize >= vertex_count {
                    return Err(Error::InvalidConfig(format!(
                        "edge endpoint {w} out of range for {vertex_count} vertices"
                    )));
                }
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..vertex_count].to_vec();
        let mut targets = vec![0; offsets[vertex_count]];
        for &(u, v) in edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for v in 0..vertex_count {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Ok(Self { offsets, targets })
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Sorted neighbor multiset of `v`.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        0..self.vertex_count() as VertexId
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, repeated per multiplicity.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (u, v))
        })
    }

    /// Number of parallel edges between `u` and `v`.
    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> usize {
        let n = self.neighbors(u);
        let lo = n.partition_point(|&x| x < v);
        let hi = n.partition_point(|&x| x <= v);
        hi - lo
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Connected components restricted to vertices with at least one edge,
    /// each sorted, ordered by smallest member.
    pub fn edge_components(&self) -> Vec<Vec<VertexId>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for s in self.vertices() {
            if seen[s as usize] || self.degree(s) == 0 {
                continue;
            }
            seen[s as usize] = true;
            queue.push_back(s);
            let mut members = Vec::new();
            while let Some(u) = queue.pop_front() {
                members.push(u);
                for &w in self.neighbors(u) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EulerianReport {
    pub pass: bool,
    pub odd_vertices: Vec<VertexId>,
    /// Sizes of the edge-bearing components; more than one means disconnected.
    pub component_sizes: Vec<usize>,
}

/// Checks that every degree is even and all edge-bearing vertices are connected.
pub fn validate_eulerian(graph: &Graph) -> EulerianReport {
    let odd_vertices: Vec<VertexId> = graph
        .vertices()
        .filter(|&v| graph.degree(v) % 2 == 1)
        .collect();
    let component_sizes: Vec<usize> = graph.edge_components().iter().map(Vec::len).collect();
    EulerianReport {
        pass: odd_vertices.is_empty() && component_sizes.len() <= 1,
        odd_vertices,
        component_sizes,
    }
}
