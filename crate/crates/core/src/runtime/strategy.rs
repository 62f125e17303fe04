use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::meta::MetaGraph;
use crate::partition::PartitionId;

/// How remote edges are held between levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeStrategy {
    /// Both endpoints' partitions hold the arc; mirrors are checked at merge.
    Baseline,
    /// Each remote edge is held by exactly one of its two partitions.
    Dedup,
    /// As `Dedup`, but after Phase 1 arcs stay parked on the leaf that owns
    /// their local endpoint and are delivered only to the merge that
    /// converts them.
    DedupDeferred,
}

impl MergeStrategy {
    pub const ALL: [MergeStrategy; 3] = [
        MergeStrategy::Baseline,
        MergeStrategy::Dedup,
        MergeStrategy::DedupDeferred,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MergeStrategy::Baseline => "baseline",
            MergeStrategy::Dedup => "dedup",
            MergeStrategy::DedupDeferred => "dedup-deferred",
        }
    }

    pub fn mirrored(self) -> bool {
        self == MergeStrategy::Baseline
    }

    pub fn deferred(self) -> bool {
        self == MergeStrategy::DedupDeferred
    }
}

impl fmt::Display for MergeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MergeStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        MergeStrategy::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown strategy {s:?}")))
    }
}

/// Chooses which partition of every meta-edge keeps the remote arcs.
///
/// Meta-edges are visited by descending weight (ties by `(min, max)`). Of
/// the two endpoints, the one with the larger running remote-edge total
/// drops its copies and its total shrinks by the edge weight; on equal
/// totals the smaller id drops.
pub fn dedup_holders(meta: &MetaGraph) -> BTreeMap<(PartitionId, PartitionId), PartitionId> {
    let mut load: BTreeMap<PartitionId, u64> =
        meta.vertices.iter().map(|&p| (p, meta.incident_weight(p))).collect();
    let mut edges: Vec<_> = meta.edges.iter().map(|(&k, &w)| (k, w)).collect();
    edges.sort_by_key(|&(k, w)| (std::cmp::Reverse(w), k));
    let mut holders = BTreeMap::new();
    for ((i, j), w) in edges {
        let (drop, keep) = if load[&i] >= load[&j] { (i, j) } else { (j, i) };
        *load.get_mut(&drop).unwrap() -= w;
        holders.insert((i, j), keep);
    }
    holders
}
