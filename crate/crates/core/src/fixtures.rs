//! The 14-vertex, 4-partition sample graph used throughout the docs and tests.

use std::path::Path;

use crate::graph::VertexId;
use crate::io::{parse_edge_list, LoadedGraph};
use crate::partition::{PartitionId, PartitionedGraph};

/// Edge list with original ids `1..=14`.
pub const SAMPLE_EDGES: &str = "\
# local edges
1 2
3 4
4 5
3 5
6 7
7 8
8 9
10 12
11 12
12 13
12 14
# remote edges
2 3
1 14
3 13
6 11
9 10
";

pub struct SampleGraph {
    pub loaded: LoadedGraph,
    pub partitioned: PartitionedGraph,
}

impl SampleGraph {
    /// Compacted id of original vertex `v_k`.
    pub fn v(&self, original: u64) -> VertexId {
        self.loaded.compact(original).expect("vertex of the sample graph")
    }

    pub fn original(&self, v: VertexId) -> u64 {
        self.loaded.original(v)
    }
}

/// Partition of original vertex `k`: `{1,2}`, `{3,4,5}`, `{6..9}`, `{10..14}`.
pub fn sample_partition_of(original: u64) -> PartitionId {
    match original {
        1..=2 => 1,
        3..=5 => 2,
        6..=9 => 3,
        _ => 4,
    }
}

pub fn sample_graph() -> SampleGraph {
    let loaded = parse_edge_list(SAMPLE_EDGES.as_bytes(), Path::new("<sample>"))
        .expect("sample graph parses");
    let assignment = loaded
        .original_ids
        .iter()
        .map(|&o| sample_partition_of(o))
        .collect();
    let partitioned = PartitionedGraph::from_assignment(loaded.graph.clone(), assignment)
        .expect("sample partitioning is valid");
    SampleGraph {
        loaded,
        partitioned,
    }
}
