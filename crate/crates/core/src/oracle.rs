//! Sequential Hierholzer reference circuit.

use serde::Serialize;

use crate::circuit::EulerCircuit;
use crate::error::{Error, Result};
use crate::graph::{validate_eulerian, Graph, VertexId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OracleConfig {
    /// `None` starts at the smallest vertex with an edge.
    pub start: Option<VertexId>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleStats {
    /// Adjacency-cursor advances plus stack pushes and pops.
    pub operations: u64,
}

pub fn hierholzer(graph: &Graph) -> Result<EulerCircuit> {
    hierholzer_with(graph, OracleConfig::default()).map(|(c, _)| c)
}

/// Stack-based Hierholzer, always leaving a vertex by its lowest unused
/// neighbor.
pub fn hierholzer_with(graph: &Graph, cfg: OracleConfig) -> Result<(EulerCircuit, OracleStats)> {
    let report = validate_eulerian(graph);
    if !report.pass {
        return Err(Error::NotEulerian(format!(
            "{} odd vertices, {} edge components",
            report.odd_vertices.len(),
            report.component_sizes.len()
        )));
    }
    let mut stats = OracleStats::default();
    let Some(start) = cfg.start.or_else(|| graph.vertices().find(|&v| graph.degree(v) > 0)) else {
        return Ok((EulerCircuit::default(), stats));
    };
    if start as usize >= graph.vertex_count() || graph.degree(start) == 0 {
        return Err(Error::InvalidConfig(format!("start vertex {start} has no edges")));
    }

    // Arc k of vertex u is the k-th entry of its sorted neighbor list; the
    // mirror arc is the matching occurrence in the neighbor's list.
    let n = graph.vertex_count();
    let mut offset = vec![0usize; n + 1];
    for v in graph.vertices() {
        offset[v as usize + 1] = offset[v as usize] + graph.degree(v);
    }
    let mut mirror = vec![0usize; offset[n]];
    for u in graph.vertices() {
        let nu = graph.neighbors(u);
        for (k, &w) in nu.iter().enumerate() {
            if u < w {
                // i-th copy of (u,w) in u's list pairs with the i-th copy in w's.
                let i = k - nu.partition_point(|&x| x < w);
                let j = graph.neighbors(w).partition_point(|&x| x < u) + i;
                let (a, b) = (offset[u as usize] + k, offset[w as usize] + j);
                mirror[a] = b;
                mirror[b] = a;
            }
        }
    }

    let mut used = vec![false; offset[n]];
    let mut cursor = offset[..n].to_vec();
    let mut stack = vec![start];
    let mut walk = Vec::with_capacity(graph.edge_count() + 1);
    while let Some(&u) = stack.last() {
        let end = offset[u as usize + 1];
        let c = &mut cursor[u as usize];
        while *c < end && used[*c] {
            *c += 1;
            stats.operations += 1;
        }
        if *c < end {
            let arc = *c;
            used[arc] = true;
            used[mirror[arc]] = true;
            *c += 1;
            stats.operations += 2;
            stack.push(graph.neighbors(u)[arc - offset[u as usize]]);
        } else {
            stats.operations += 1;
            walk.push(stack.pop().unwrap());
        }
    }
    walk.reverse();
    Ok((EulerCircuit { walk }, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::validate_circuit;

    #[test]
    fn triangle() {
        let g = Graph::from_edges(4, &[(1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(hierholzer(&g).unwrap().walk, vec![1, 2, 3, 1]);
    }

    #[test]
    fn k5_is_linear_and_valid() {
        let mut e = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                e.push((u, v));
            }
        }
        let g = Graph::from_edges(5, &e).unwrap();
        let (c, s) = hierholzer_with(&g, OracleConfig::default()).unwrap();
        assert_eq!(c.edge_count(), 10);
        assert!(validate_circuit(&g, &c.walk).pass);
        assert!(s.operations <= 6 * 10 + 1);
    }

    #[test]
    fn parallel_edges() {
        let g = Graph::from_edges(3, &[(0, 1), (0, 1), (1, 2), (1, 2)]).unwrap();
        let c = hierholzer(&g).unwrap();
        assert!(validate_circuit(&g, &c.walk).pass);
    }

    #[test]
    fn rejects_odd_graph() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(hierholzer(&g), Err(Error::NotEulerian(_))));
    }
}
