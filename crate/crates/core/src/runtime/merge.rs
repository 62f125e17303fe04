use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::partition::{LocalEdge, Partition, PartitionId, RemoteArc};
use crate::path::{EdgeRef, PathMap};

use super::ledger::audit_path_map;
use super::strategy::MergeStrategy;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MergeRecord {
    pub a: PartitionId,
    pub b: PartitionId,
    pub parent: PartitionId,
    /// Remote edges between the pair that became local edges.
    pub converted_edges: usize,
    /// Path entries of both children carried as single local edges.
    pub coarse_edges: usize,
    /// Parked arcs handed to this merge (deferred strategy only).
    pub delivered_arcs: usize,
    /// Audited size of the child state shipped to the parent.
    pub transferred: u64,
}

/// Next-level partition of a partition that sits out a merge level.
pub fn promote(pm: &PathMap, level: usize) -> Result<Partition> {
    build(pm.partition, level, &[pm], &[], pm.remote.clone())
}

/// Merges two children after their Phase 1.
///
/// `owner` maps a leaf partition id to its current ancestor; arcs held by one
/// child whose remote leaf belongs to the other become local edges.
/// `delivered` are parked arcs between the two children, if any.
pub fn merge_partitions(
    a: &PathMap,
    b: &PathMap,
    parent: PartitionId,
    level: usize,
    strategy: MergeStrategy,
    owner: &dyn Fn(PartitionId) -> PartitionId,
    delivered: &[RemoteArc],
) -> Result<(Partition, MergeRecord)> {
    if parent != a.partition && parent != b.partition {
        return Err(Error::Structural(format!(
            "parent {parent} is neither child {} nor {}",
            a.partition, b.partition
        )));
    }
    let split = |pm: &PathMap, other: PartitionId| {
        let (between, rest): (Vec<RemoteArc>, Vec<RemoteArc>) = pm
            .remote
            .iter()
            .partition(|arc| owner(arc.remote_partition) == other);
        (between, rest)
    };
    let (ab, a_rest) = split(a, b.partition);
    let (ba, b_rest) = split(b, a.partition);

    let key = |arc: &RemoteArc| (arc.local.min(arc.remote), arc.local.max(arc.remote));
    let mut converted: Vec<(VertexId, VertexId)>;
    if strategy.mirrored() {
        converted = ab.iter().map(key).collect();
        let mut mirror: Vec<_> = ba.iter().map(key).collect();
        converted.sort_unstable();
        mirror.sort_unstable();
        if converted != mirror {
            return Err(Error::Structural(format!(
                "remote arcs between partitions {} and {} are not mirrored",
                a.partition, b.partition
            )));
        }
    } else {
        converted = ab.iter().chain(&ba).chain(delivered).map(key).collect();
        converted.sort_unstable();
    }

    let mut remote = a_rest;
    remote.extend(b_rest);
    let partition = build(parent, level, &[a, b], &converted, remote)?;
    let sender = if parent == a.partition { b } else { a };
    let record = MergeRecord {
        a: a.partition.min(b.partition),
        b: a.partition.max(b.partition),
        parent,
        converted_edges: converted.len(),
        coarse_edges: partition.coarse_edge_count(),
        delivered_arcs: delivered.len(),
        transferred: audit_path_map(sender),
    };
    Ok((partition, record))
}

fn build(
    id: PartitionId,
    level: usize,
    maps: &[&PathMap],
    converted: &[(VertexId, VertexId)],
    mut remote: Vec<RemoteArc>,
) -> Result<Partition> {
    let mut boundary: Vec<_> = maps.iter().flat_map(|pm| pm.boundary.iter().copied()).collect();
    boundary.sort_unstable();
    if boundary.windows(2).any(|w| w[0].vertex == w[1].vertex) {
        return Err(Error::Structural(format!(
            "merged children of partition {id} share a boundary vertex"
        )));
    }
    let vertices: Vec<VertexId> = boundary.iter().map(|b| b.vertex).collect();
    let mut remote_degree: Vec<u32> = boundary.iter().map(|b| b.remote_degree).collect();

    let mut edges: Vec<LocalEdge> = maps
        .iter()
        .flat_map(|pm| pm.ob_paths())
        .map(|h| LocalEdge::new(h.source, h.sink.expect("path has a sink"), EdgeRef::Path(h.id)))
        .collect();
    for &(u, v) in converted {
        for w in [u, v] {
            let i = vertices.binary_search(&w).map_err(|_| {
                Error::Structural(format!("converted edge {u}-{v} leaves partition {id}"))
            })?;
            if remote_degree[i] == 0 {
                return Err(Error::Structural(format!(
                    "vertex {w} has more converted edges than remote edges"
                )));
            }
            remote_degree[i] -= 1;
        }
        edges.push(LocalEdge::new(u, v, EdgeRef::Real));
    }
    edges.sort_unstable();
    remote.sort_unstable();
    let p = Partition {
        id,
        level,
        vertices,
        remote_degree,
        edges,
        remote,
    };
    p.validate()?;
    Ok(p)
}
