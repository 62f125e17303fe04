//! Partitions `<I, B, L, R>` of an undirected graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::path::{EdgeRef, PathId};

pub type PartitionId = u32;

/// Arc from a boundary vertex of this partition to a vertex elsewhere.
/// `remote_partition` is the leaf partition of `remote`; it never changes
/// as partitions merge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RemoteArc {
    pub local: VertexId,
    pub remote: VertexId,
    pub remote_partition: PartitionId,
}

/// Undirected local edge, `u < v`. Coarse edges carry the id of the path they replace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub via: EdgeRef,
}

impl LocalEdge {
    pub fn new(a: VertexId, b: VertexId, via: EdgeRef) -> Self {
        LocalEdge {
            u: a.min(b),
            v: a.max(b),
            via,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum VertexClass {
    Internal,
    OddBoundary,
    EvenBoundary,
}

/// A partition at some level of the merge tree.
///
/// `vertices` holds `I ∪ B` sorted; `remote_degree[i]` is the number of
/// remote edges at `vertices[i]` (zero for internal vertices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub id: PartitionId,
    pub level: usize,
    pub vertices: Vec<VertexId>,
    pub remote_degree: Vec<u32>,
    pub edges: Vec<LocalEdge>,
    pub remote: Vec<RemoteArc>,
}

impl Partition {
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index_of(v).is_some()
    }

    /// Local degree per vertex, aligned with `vertices`.
    pub fn local_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.vertices.len()];
        for e in &self.edges {
            for w in [e.u, e.v] {
                if let Some(i) = self.index_of(w) {
                    deg[i] += 1;
                }
            }
        }
        deg
    }

    pub fn boundary(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .iter()
            .zip(&self.remote_degree)
            .filter(|(_, &d)| d > 0)
            .map(|(&v, _)| v)
    }

    pub fn boundary_count(&self) -> usize {
        self.remote_degree.iter().filter(|&&d| d > 0).count()
    }

    pub fn internal_count(&self) -> usize {
        self.vertices.len() - self.boundary_count()
    }

    pub fn coarse_edge_count(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| matches!(e.via, EdgeRef::Path(_)))
            .count()
    }

    /// Checks the structural invariants: endpoints of local edges and local
    /// ends of remote arcs belong to the partition, no self-loops, and held
    /// arcs never exceed the recorded remote degree.
    pub fn validate(&self) -> Result<()> {
        if self.vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Structural(format!(
                "partition {} vertex list not strictly sorted",
                self.id
            )));
        }
        if self.remote_degree.len() != self.vertices.len() {
            return Err(Error::Structural("remote degree length mismatch".into()));
        }
        for e in &self.edges {
            if e.u == e.v {
                return Err(Error::SelfLoop { vertex: e.u as u64 });
            }
            for w in [e.u, e.v] {
                if !self.contains(w) {
                    return Err(Error::UnknownVertex {
                        partition: self.id,
                        vertex: w,
                    });
                }
            }
        }
        let mut held = vec![0u32; self.vertices.len()];
        for a in &self.remote {
            let i = self.index_of(a.local).ok_or(Error::UnknownVertex {
                partition: self.id,
                vertex: a.local,
            })?;
            if self.contains(a.remote) {
                return Err(Error::Structural(format!(
                    "remote arc {}->{} stays inside partition {}",
                    a.local, a.remote, self.id
                )));
            }
            held[i] += 1;
        }
        if held.iter().zip(&self.remote_degree).any(|(h, d)| h > d) {
            return Err(Error::Structural(format!(
                "partition {} holds more remote arcs than its remote degree",
                self.id
            )));
        }
        Ok(())
    }
}

/// Assigns every vertex one class; rejects odd total degree.
pub fn classify_vertices(partition: &Partition) -> Result<BTreeMap<VertexId, VertexClass>> {
    let local = partition.local_degrees();
    let mut classes = BTreeMap::new();
    for (i, &v) in partition.vertices.iter().enumerate() {
        let remote = partition.remote_degree[i];
        if (local[i] + remote) % 2 == 1 {
            return Err(Error::OddDegree {
                partition: partition.id,
                vertex: v,
            });
        }
        let class = match (remote > 0, local[i] % 2 == 1) {
            (false, _) => VertexClass::Internal,
            (true, true) => VertexClass::OddBoundary,
            (true, false) => VertexClass::EvenBoundary,
        };
        classes.insert(v, class);
    }
    Ok(classes)
}

/// A graph together with its vertex-to-partition assignment and the derived
/// level-0 partitions (ordered by id).
#[derive(Clone, Debug)]
pub struct PartitionedGraph {
    pub graph: Graph,
    pub assignment: Vec<PartitionId>,
    pub partitions: Vec<Partition>,
}

impl PartitionedGraph {
    pub fn from_assignment(graph: Graph, assignment: Vec<PartitionId>) -> Result<Self> {
        if assignment.len() != graph.vertex_count() {
            return Err(Error::InvalidConfig(format!(
                "partition assignment covers {} vertices, graph has {}",
                assignment.len(),
                graph.vertex_count()
            )));
        }
        if let Some(&p) = assignment.iter().find(|&&p| p > PathId::MAX_PARTITION) {
            return Err(Error::InvalidConfig(format!(
                "partition id {p} exceeds {}",
                PathId::MAX_PARTITION
            )));
        }
        let ids: BTreeSet<PartitionId> = assignment.iter().copied().collect();
        let slot: BTreeMap<PartitionId, usize> =
            ids.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut partitions: Vec<Partition> = ids
            .iter()
            .map(|&id| Partition {
                id,
                level: 0,
                vertices: Vec::new(),
                remote_degree: Vec::new(),
                edges: Vec::new(),
                remote: Vec::new(),
            })
            .collect();
        for v in graph.vertices() {
            let part = &mut partitions[slot[&assignment[v as usize]]];
            let pv = assignment[v as usize];
            let mut remote = 0;
            for &w in graph.neighbors(v) {
                let pw = assignment[w as usize];
                if pw == pv {
                    if v < w {
                        part.edges.push(LocalEdge::new(v, w, EdgeRef::Real));
                    }
                } else {
                    remote += 1;
                    part.remote.push(RemoteArc {
                        local: v,
                        remote: w,
                        remote_partition: pw,
                    });
                }
            }
            part.vertices.push(v);
            part.remote_degree.push(remote);
        }
        Ok(Self {
            graph,
            assignment,
            partitions,
        })
    }

    pub fn partition_ids(&self) -> Vec<PartitionId> {
        self.partitions.iter().map(|p| p.id).collect()
    }

    pub fn partition(&self, id: PartitionId) -> Option<&Partition> {
        self.partitions.iter().find(|p| p.id == id)
    }

    /// Undirected edges crossing partitions.
    pub fn cut_edges(&self) -> usize {
        self.partitions.iter().map(|p| p.remote.len()).sum::<usize>() / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sample_graph;

    #[test]
    fn sample_p2_classes() {
        let sg = sample_graph();
        let p2 = sg.partitioned.partition(2).unwrap();
        let classes = classify_vertices(p2).unwrap();
        assert_eq!(classes[&sg.v(3)], VertexClass::EvenBoundary);
        assert_eq!(classes[&sg.v(4)], VertexClass::Internal);
        assert_eq!(classes[&sg.v(5)], VertexClass::Internal);
    }

    #[test]
    fn sample_partitions_match_layout() {
        let sg = sample_graph();
        let members: Vec<Vec<u64>> = sg
            .partitioned
            .partitions
            .iter()
            .map(|p| p.vertices.iter().map(|&v| sg.original(v)).collect())
            .collect();
        assert_eq!(
            members,
            vec![
                vec![1, 2],
                vec![3, 4, 5],
                vec![6, 7, 8, 9],
                vec![10, 11, 12, 13, 14]
            ]
        );
        for p in &sg.partitioned.partitions {
            p.validate().unwrap();
        }
        assert_eq!(sg.partitioned.cut_edges(), 5);
    }

    #[test]
    fn no_remote_arcs_means_all_internal() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let pg = PartitionedGraph::from_assignment(g, vec![0, 0, 0]).unwrap();
        let classes = classify_vertices(&pg.partitions[0]).unwrap();
        assert!(classes.values().all(|&c| c == VertexClass::Internal));
    }

    #[test]
    fn odd_total_degree_rejected() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let pg = PartitionedGraph::from_assignment(g, vec![0, 0, 1]).unwrap();
        assert!(matches!(
            classify_vertices(&pg.partitions[0]),
            Err(Error::OddDegree { vertex: 0, .. })
        ));
    }
}
