//! Paths, cycles and the per-partition catalog that is shipped between levels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::partition::{PartitionId, RemoteArc};

/// Run-unique identifier of a path or cycle.
///
/// Packs `(level, partition, sequence)` so identifiers are assigned without
/// coordination between workers and sort by level first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathId(pub u64);

impl PathId {
    pub const MAX_PARTITION: PartitionId = (1 << 24) - 1;

    pub fn new(level: usize, partition: PartitionId, seq: u32) -> Self {
        debug_assert!(level < 256 && partition <= Self::MAX_PARTITION);
        PathId(((level as u64) << 56) | ((partition as u64) << 32) | seq as u64)
    }

    pub fn level(self) -> usize {
        (self.0 >> 56) as usize
    }

    pub fn partition(self) -> PartitionId {
        ((self.0 >> 32) & 0xFF_FFFF) as PartitionId
    }

    pub fn seq(self) -> u32 {
        self.0 as u32
    }
}

impl fmt::Display for PathId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}P{}#{}", self.level(), self.partition(), self.seq())
    }
}

/// What an edge of a walk stands for: an original edge, or a coarse edge
/// replacing a previously recorded path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeRef {
    Real,
    Path(PathId),
}

impl EdgeRef {
    pub(crate) fn encode(self) -> u64 {
        match self {
            EdgeRef::Real => 0,
            EdgeRef::Path(id) => id.0 + 1,
        }
    }

    pub(crate) fn decode(raw: u64) -> Self {
        match raw {
            0 => EdgeRef::Real,
            x => EdgeRef::Path(PathId(x - 1)),
        }
    }
}

/// A walk `v0, v1, ..., vm` where `via[i]` is the edge taken from `v_i` to `v_{i+1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Walk {
    pub vertices: Vec<VertexId>,
    pub via: Vec<EdgeRef>,
}

impl Walk {
    pub fn singleton(v: VertexId) -> Self {
        Walk {
            vertices: vec![v],
            via: Vec::new(),
        }
    }

    /// Walk made only of original edges.
    pub fn from_vertices(vertices: Vec<VertexId>) -> Self {
        let via = vec![EdgeRef::Real; vertices.len().saturating_sub(1)];
        Walk { vertices, via }
    }

    pub fn edge_count(&self) -> usize {
        self.via.len()
    }

    pub fn first(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn last(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    pub fn is_closed(&self) -> bool {
        self.first() == self.last()
    }

    /// Closed walk rotated so it starts (and ends) at position `pos`.
    pub fn rotated(&self, pos: usize) -> Walk {
        debug_assert!(self.is_closed());
        let m = self.via.len();
        if m == 0 || pos == 0 || pos == m {
            return self.clone();
        }
        let mut vertices = Vec::with_capacity(m + 1);
        vertices.extend_from_slice(&self.vertices[pos..m]);
        vertices.extend_from_slice(&self.vertices[..=pos]);
        let mut via = Vec::with_capacity(m);
        via.extend_from_slice(&self.via[pos..]);
        via.extend_from_slice(&self.via[..pos]);
        Walk { vertices, via }
    }

    /// Inserts the closed walk `cycle` (which must start at `vertices[pos]`) at `pos`.
    pub fn splice(&mut self, pos: usize, cycle: &Walk) {
        debug_assert_eq!(self.vertices[pos], cycle.first());
        debug_assert!(cycle.is_closed());
        let tail_v = self.vertices.split_off(pos + 1);
        let tail_e = self.via.split_off(pos);
        self.vertices.extend_from_slice(&cycle.vertices[1..]);
        self.vertices.extend(tail_v);
        self.via.extend_from_slice(&cycle.via);
        self.via.extend(tail_e);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PathKind {
    /// Maximal path between two odd boundary vertices.
    ObPath,
    /// Closed walk from an even boundary vertex.
    EbCycle,
    /// Zero-edge tour at an even boundary vertex with no unvisited local edges.
    Singleton,
    /// Closed walk that shares no vertex with the partition's other entries at
    /// its level; it is stitched in while unrolling.
    Cycle,
}

impl PathKind {
    pub(crate) fn code(self) -> u8 {
        match self {
            PathKind::ObPath => 0,
            PathKind::EbCycle => 1,
            PathKind::Singleton => 2,
            PathKind::Cycle => 3,
        }
    }

    pub(crate) fn from_code(c: u8) -> Result<Self> {
        Ok(match c {
            0 => PathKind::ObPath,
            1 => PathKind::EbCycle,
            2 => PathKind::Singleton,
            3 => PathKind::Cycle,
            _ => return Err(Error::Spill(format!("unknown entry kind {c}"))),
        })
    }

    pub fn is_closed(self) -> bool {
        !matches!(self, PathKind::ObPath)
    }
}

/// In-memory part of an entry; the walk itself lives in spill storage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathHeader {
    pub id: PathId,
    pub kind: PathKind,
    pub source: VertexId,
    pub sink: Option<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathEntry {
    pub header: PathHeader,
    pub walk: Walk,
}

impl PathEntry {
    pub fn id(&self) -> PathId {
        self.header.id
    }
}

/// Boundary vertex with its remote degree. Under the deduplicating strategies
/// the degree also counts remote edges held by the other side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundaryVertex {
    pub vertex: VertexId,
    pub remote_degree: u32,
}

/// Resident state of a partition after its local edges were released:
/// entry headers, surviving boundary vertices and held remote arcs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathMap {
    pub partition: PartitionId,
    pub level: usize,
    pub entries: Vec<PathHeader>,
    pub boundary: Vec<BoundaryVertex>,
    pub remote: Vec<RemoteArc>,
}

impl PathMap {
    pub fn ob_paths(&self) -> impl Iterator<Item = &PathHeader> {
        self.entries.iter().filter(|h| h.kind == PathKind::ObPath)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splice_inserts_cycle_at_pivot() {
        let mut host = Walk::from_vertices(vec![0, 1, 2]);
        let cycle = Walk::from_vertices(vec![1, 7, 8, 1]);
        host.splice(1, &cycle);
        assert_eq!(host.vertices, vec![0, 1, 7, 8, 1, 2]);
        assert_eq!(host.via.len(), 5);
    }

    #[test]
    fn splice_at_host_start_grows_by_cycle_length() {
        let mut host = Walk::from_vertices(vec![3, 4, 5, 3]);
        let cycle = Walk::from_vertices(vec![3, 9, 10, 3]);
        host.splice(0, &cycle);
        assert_eq!(host.vertices, vec![3, 9, 10, 3, 4, 5, 3]);
        assert_eq!(host.edge_count(), 6);
    }

    #[test]
    fn rotation_keeps_closure() {
        let c = Walk::from_vertices(vec![1, 2, 3, 1]);
        assert_eq!(c.rotated(2).vertices, vec![3, 1, 2, 3]);
    }

    #[test]
    fn path_id_packing() {
        let id = PathId::new(3, 4711, 9);
        assert_eq!((id.level(), id.partition(), id.seq()), (3, 4711, 9));
        assert!(PathId::new(0, 99, 5) < PathId::new(1, 0, 0));
        for r in [EdgeRef::Real, EdgeRef::Path(id)] {
            assert_eq!(EdgeRef::decode(r.encode()), r);
        }
    }
}
