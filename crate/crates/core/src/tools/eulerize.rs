use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

const PAIR_RETRIES: usize = 8;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EulerizeReport {
    pub original_edges: usize,
    pub added_edges: Vec<(VertexId, VertexId)>,
    /// Endpoints of doubled bridging edges; only these may change degree
    /// without having been odd.
    pub bridge_vertices: BTreeSet<VertexId>,
    pub components_joined: usize,
    pub odd_vertices_before: usize,
}

impl EulerizeReport {
    pub fn added_ratio(&self) -> f64 {
        if self.original_edges == 0 {
            0.0
        } else {
            self.added_edges.len() as f64 / self.original_edges as f64
        }
    }
}

/// Adds edges until every degree is even and all edges form one component.
///
/// Edge-bearing components are chained in order of their smallest vertex.
/// A link between two odd vertices is a single edge; otherwise the link is a
/// doubled edge, which keeps both endpoint parities. Remaining odd vertices
/// are shuffled and paired, swapping partners to avoid existing adjacency
/// where a few retries allow it.
pub fn eulerize(graph: &Graph, seed: u64) -> Result<(Graph, EulerizeReport)> {
    if graph.vertex_count() == 0 {
        return Err(Error::InvalidConfig("cannot eulerize an empty graph".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degree: Vec<usize> = graph.vertices().map(|v| graph.degree(v)).collect();
    let mut report = EulerizeReport {
        original_edges: graph.edge_count(),
        odd_vertices_before: degree.iter().filter(|&&d| d % 2 == 1).count(),
        ..Default::default()
    };
    let mut added_set: HashSet<(VertexId, VertexId)> = HashSet::new();
    let add = |report: &mut EulerizeReport, degree: &mut [usize], u: VertexId, v: VertexId| {
        report.added_edges.push((u.min(v), u.max(v)));
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    };

    let components = graph.edge_components();
    report.components_joined = components.len().saturating_sub(1);
    for pair in components.windows(2) {
        let pick = |c: &[VertexId], degree: &[usize]| {
            c.iter()
                .copied()
                .find(|&v| degree[v as usize] % 2 == 1)
                .unwrap_or(c[0])
        };
        let x = pick(&pair[0], &degree);
        let y = pick(&pair[1], &degree);
        if degree[x as usize] % 2 == 1 && degree[y as usize] % 2 == 1 {
            add(&mut report, &mut degree, x, y);
        } else {
            add(&mut report, &mut degree, x, y);
            add(&mut report, &mut degree, x, y);
            report.bridge_vertices.insert(x);
            report.bridge_vertices.insert(y);
        }
    }

    let mut odd: Vec<VertexId> = graph
        .vertices()
        .filter(|&v| degree[v as usize] % 2 == 1)
        .collect();
    odd.shuffle(&mut rng);
    let adjacent = |u: VertexId, v: VertexId, added: &HashSet<(VertexId, VertexId)>| {
        graph.has_edge(u, v) || added.contains(&(u.min(v), u.max(v)))
    };
    let pairs = odd.len() / 2;
    for i in 0..pairs {
        let (u, v) = (odd[2 * i], odd[2 * i + 1]);
        if adjacent(u, v, &added_set) && i + 1 < pairs {
            for _ in 0..PAIR_RETRIES {
                let j = rng.gen_range(i + 1..pairs);
                let w = odd[2 * j];
                let z = odd[2 * j + 1];
                if !adjacent(u, w, &added_set) && !adjacent(v, z, &added_set) {
                    odd.swap(2 * i + 1, 2 * j);
                    break;
                }
            }
        }
        let (u, v) = (odd[2 * i], odd[2 * i + 1]);
        added_set.insert((u.min(v), u.max(v)));
        add(&mut report, &mut degree, u, v);
    }

    let mut edges: Vec<(VertexId, VertexId)> = graph.edges().collect();
    edges.extend_from_slice(&report.added_edges);
    Ok((Graph::from_edges(graph.vertex_count(), &edges)?, report))
}
