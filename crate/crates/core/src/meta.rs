use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::partition::{Partition, PartitionId};

/// Partition-adjacency graph. Keys of `edges` are `(min, max)` pairs and
/// weights count undirected remote edges between the two partitions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MetaGraph {
    pub vertices: BTreeSet<PartitionId>,
    pub edges: BTreeMap<(PartitionId, PartitionId), u64>,
}

impl MetaGraph {
    pub fn weight(&self, a: PartitionId, b: PartitionId) -> u64 {
        self.edges.get(&(a.min(b), a.max(b))).copied().unwrap_or(0)
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Sum of weights of meta-edges incident to `p`.
    pub fn incident_weight(&self, p: PartitionId) -> u64 {
        self.edges
            .iter()
            .filter(|((a, b), _)| *a == p || *b == p)
            .map(|(_, w)| w)
            .sum()
    }

    pub(crate) fn add(&mut self, a: PartitionId, b: PartitionId, w: u64) {
        *self.edges.entry((a.min(b), a.max(b))).or_default() += w;
    }
}

/// Builds the meta-graph from level-0 partitions whose remote arcs are
/// mirrored (every undirected remote edge appears once on each side).
pub fn build_meta_graph(partitions: &[Partition]) -> Result<MetaGraph> {
    let mut meta = MetaGraph {
        vertices: partitions.iter().map(|p| p.id).collect(),
        ..Default::default()
    };
    // Undirected remote edge -> signed count: +1 from the smaller partition side,
    // -1 from the larger one. Every entry must cancel.
    let mut balance: BTreeMap<(PartitionId, PartitionId, VertexId, VertexId), i64> =
        BTreeMap::new();
    for p in partitions {
        for arc in &p.remote {
            if !meta.vertices.contains(&arc.remote_partition) || arc.remote_partition == p.id {
                return Err(Error::Structural(format!(
                    "remote arc {}->{} targets unknown partition {}",
                    arc.local, arc.remote, arc.remote_partition
                )));
            }
            let (lo, hi) = (p.id.min(arc.remote_partition), p.id.max(arc.remote_partition));
            let (vlo, vhi) = if p.id == lo {
                (arc.local, arc.remote)
            } else {
                (arc.remote, arc.local)
            };
            *balance.entry((lo, hi, vlo, vhi)).or_default() += if p.id == lo { 1 } else { -1 };
            if p.id == lo {
                meta.add(lo, hi, 1);
            }
        }
    }
    if let Some(((a, b, u, v), _)) = balance.iter().find(|(_, &c)| c != 0) {
        return Err(Error::Structural(format!(
            "remote edge {u}-{v} between partitions {a} and {b} has no mirror arc"
        )));
    }
    Ok(meta)
}
