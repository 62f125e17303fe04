//! Static binary merge schedule built by greedy matching on the meta-graph.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::meta::MetaGraph;
use crate::partition::PartitionId;

/// Two partitions merged at one level; `a < b` and the parent is `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MergePair {
    pub a: PartitionId,
    pub b: PartitionId,
    pub parent: PartitionId,
    pub weight: u64,
    /// Zero-weight pairing of partitions that share no remote edge.
    #[serde(rename = "virtual")]
    pub is_virtual: bool,
}

impl MergePair {
    fn new(x: PartitionId, y: PartitionId, weight: u64) -> Self {
        let (a, b) = (x.min(y), x.max(y));
        MergePair {
            a,
            b,
            parent: b,
            weight,
            is_virtual: weight == 0,
        }
    }

    pub fn contains(&self, p: PartitionId) -> bool {
        self.a == p || self.b == p
    }

    /// The child that is not the parent, i.e. the one that ships its state.
    pub fn sender(&self) -> PartitionId {
        self.a
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Matching {
    pub pairs: Vec<MergePair>,
    pub unmatched: Option<PartitionId>,
}

/// Greedy maximal matching: meta-edges by descending weight (ties by the
/// smaller `(min, max)` pair), then leftover partitions paired in ascending
/// id order. With an odd count, the leftover with the least incident weight
/// stays unmatched.
pub fn maximal_matching(meta: &MetaGraph) -> Matching {
    let mut edges: Vec<(&(PartitionId, PartitionId), &u64)> = meta.edges.iter().collect();
    edges.sort_by_key(|&(&key, &w)| (Reverse(w), key));

    let mut matched = BTreeSet::new();
    let mut pairs = Vec::new();
    for (&(a, b), &w) in edges {
        if w == 0 || matched.contains(&a) || matched.contains(&b) {
            continue;
        }
        matched.insert(a);
        matched.insert(b);
        pairs.push(MergePair::new(a, b, w));
    }

    let mut rest: Vec<PartitionId> = meta
        .vertices
        .iter()
        .copied()
        .filter(|p| !matched.contains(p))
        .collect();
    let unmatched = if rest.len() % 2 == 1 {
        let skip = *rest
            .iter()
            .min_by_key(|&&p| (meta.incident_weight(p), p))
            .unwrap();
        rest.retain(|&p| p != skip);
        Some(skip)
    } else {
        None
    };
    for chunk in rest.chunks(2) {
        pairs.push(MergePair::new(chunk[0], chunk[1], meta.weight(chunk[0], chunk[1])));
    }
    Matching { pairs, unmatched }
}

/// Collapses every pair onto its parent; intra-pair weight vanishes and
/// weights to outside partitions add up.
pub fn rebuild_meta_graph(previous: &MetaGraph, pairs: &[MergePair]) -> Result<MetaGraph> {
    let mut parent: BTreeMap<PartitionId, PartitionId> =
        previous.vertices.iter().map(|&p| (p, p)).collect();
    let mut seen = BTreeSet::new();
    for pair in pairs {
        for p in [pair.a, pair.b] {
            if !previous.vertices.contains(&p) {
                return Err(Error::Structural(format!(
                    "merge pair references unknown partition {p}"
                )));
            }
            if !seen.insert(p) {
                return Err(Error::Structural(format!(
                    "partition {p} appears in two merge pairs"
                )));
            }
            parent.insert(p, pair.parent);
        }
    }
    let mut next = MetaGraph {
        vertices: parent.values().copied().collect(),
        ..Default::default()
    };
    for (&(a, b), &w) in &previous.edges {
        let (pa, pb) = (parent[&a], parent[&b]);
        if pa != pb {
            next.add(pa, pb, w);
        }
    }
    Ok(next)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MergeLevel {
    pub pairs: Vec<MergePair>,
    pub carried: Option<PartitionId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MergeTree {
    pub leaves: Vec<PartitionId>,
    pub levels: Vec<MergeLevel>,
    pub root: PartitionId,
}

impl MergeTree {
    pub fn height(&self) -> usize {
        self.levels.len()
    }

    /// Phase-1 supersteps: one per tree level plus the leaf level.
    pub fn supersteps(&self) -> usize {
        self.height() + 1
    }

    pub fn has_virtual_pairs(&self) -> bool {
        self.levels
            .iter()
            .flat_map(|l| &l.pairs)
            .any(|p| p.is_virtual)
    }

    /// Partitions alive at the start of `level` (level 0 is the leaves).
    pub fn partitions_at(&self, level: usize) -> Vec<PartitionId> {
        let mut alive: BTreeSet<PartitionId> = self.leaves.iter().copied().collect();
        for l in &self.levels[..level.min(self.levels.len())] {
            for p in &l.pairs {
                alive.remove(&p.a);
                alive.remove(&p.b);
                alive.insert(p.parent);
            }
        }
        alive.into_iter().collect()
    }

    /// Tree level at which leaves `x` and `y` end up in the same partition.
    pub fn join_level(&self, x: PartitionId, y: PartitionId) -> Option<usize> {
        let (mut ax, mut ay) = (x, y);
        for (l, level) in self.levels.iter().enumerate() {
            for p in &level.pairs {
                if p.contains(ax) && p.contains(ay) {
                    return Some(l);
                }
            }
            for p in &level.pairs {
                if p.contains(ax) {
                    ax = p.parent;
                }
                if p.contains(ay) {
                    ay = p.parent;
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "leaves": self.leaves,
            "levels": self.levels,
            "root": self.root,
            "height": self.height(),
            "predictedSupersteps": self.supersteps(),
            "virtualPairs": self.has_virtual_pairs(),
        })
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "merge tree: {} leaves, root P{}", self.leaves.len(), self.root);
        for (l, level) in self.levels.iter().enumerate() {
            let _ = writeln!(s, "level {l}:");
            for p in &level.pairs {
                let _ = writeln!(
                    s,
                    "  P{} + P{} -> P{}  (weight {}{})",
                    p.a,
                    p.b,
                    p.parent,
                    p.weight,
                    if p.is_virtual { ", virtual" } else { "" }
                );
            }
            if let Some(c) = level.carried {
                let _ = writeln!(s, "  P{c} carried");
            }
        }
        let _ = writeln!(s, "supersteps: {}", self.supersteps());
        s
    }
}

pub fn generate_merge_tree(meta: &MetaGraph) -> Result<MergeTree> {
    if meta.vertices.is_empty() {
        return Err(Error::InvalidConfig("meta-graph has no partitions".into()));
    }
    let leaves: Vec<PartitionId> = meta.vertices.iter().copied().collect();
    let mut levels = Vec::new();
    let mut current = meta.clone();
    while current.vertices.len() > 1 {
        let m = maximal_matching(&current);
        current = rebuild_meta_graph(&current, &m.pairs)?;
        levels.push(MergeLevel {
            pairs: m.pairs,
            carried: m.unmatched,
        });
    }
    Ok(MergeTree {
        leaves,
        levels,
        root: *current.vertices.iter().next().unwrap(),
    })
}
