//! Superstep execution of a merge tree.
//!
//! Every level runs Phase 1 on all active partitions in parallel, records
//! the ledger snapshot, then performs that level's merges in parallel. The
//! executor returns only when every task of a step has finished, which is
//! the barrier between steps.

mod ledger;
mod merge;
mod strategy;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::meta::build_meta_graph;
use crate::partition::{Partition, PartitionId, PartitionedGraph, RemoteArc};
use crate::path::{PathHeader, PathMap};
use crate::phase1::{do_phase1, Phase1Stats};
use crate::planner::MergeTree;
use crate::spill::SpillStore;

pub use ledger::{
    audit_path_map, strategy_ledger_compare, LedgerComparison, LedgerLevel, MemoryLedger,
    PartitionUsage, StrategyCurve, ARC_VALUES, BOUNDARY_VALUES,
};
pub use merge::{merge_partitions, promote, MergeRecord};
pub use strategy::{dedup_holders, MergeStrategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub strategy: MergeStrategy,
    /// Worker threads per superstep; 0 or 1 runs sequentially.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            strategy: MergeStrategy::Baseline,
            workers: 1,
        }
    }
}

/// Phase 1 result of one partition once its entries are spilled.
#[derive(Clone, Debug)]
pub struct LevelOutput {
    pub path_map: PathMap,
    pub stats: Phase1Stats,
    /// Logical clock readings at task start and end.
    pub ticks: (u64, u64),
}

/// Runs Phase 1 on every partition and spills the entries. Results are in
/// input order; a failure is tagged with its level and partition.
pub fn run_level(
    partitions: Vec<Partition>,
    spill: &dyn SpillStore,
    executor: &Executor,
    clock: &AtomicU64,
) -> Result<Vec<LevelOutput>> {
    let results = executor.map(partitions, |p| {
        let start = clock.fetch_add(1, Ordering::SeqCst);
        let out = do_phase1(&p)
            .and_then(|out| {
                spill.put(p.id, p.level, &out.entries)?;
                Ok(LevelOutput {
                    path_map: out.path_map,
                    stats: out.stats,
                    ticks: (start, 0),
                })
            })
            .map_err(|e| e.at(p.level, p.id));
        out.map(|mut o| {
            o.ticks.1 = clock.fetch_add(1, Ordering::SeqCst);
            o
        })
    });
    results.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PartitionReport {
    pub partition_id: PartitionId,
    pub int64_count: u64,
    pub remote_arcs: u64,
    pub phase1_op_count: u64,
    /// `|B| + |I| + |L|` of the partition.
    pub size_bound: u64,
    pub transferred_count: u64,
    pub entries: usize,
    pub ticks: (u64, u64),
    pub stats: Phase1Stats,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelReport {
    pub level: usize,
    pub partitions: Vec<PartitionReport>,
    pub merges: Vec<MergeRecord>,
    pub merge_ticks: Vec<(u64, u64)>,
    pub carried: Option<PartitionId>,
    pub parked_arcs: u64,
    pub phase1_ms: f64,
    pub merge_ms: f64,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub strategy: MergeStrategy,
    pub fingerprint: String,
    pub root: PartitionId,
    pub root_entries: Vec<PathHeader>,
    pub levels: Vec<LevelReport>,
    pub ledger: MemoryLedger,
    /// Post-Phase-1 state of every partition, per level.
    pub path_maps: Vec<Vec<PathMap>>,
    pub virtual_pairs: bool,
}

impl RunResult {
    pub fn supersteps(&self) -> usize {
        self.levels.len()
    }
}

/// Hash of the graph, the partition assignment and the merge tree.
pub fn run_fingerprint(pg: &PartitionedGraph, tree: &MergeTree) -> String {
    let mut h = Sha256::new();
    h.update((pg.graph.vertex_count() as u64).to_le_bytes());
    for (u, v) in pg.graph.edges() {
        h.update(u.to_le_bytes());
        h.update(v.to_le_bytes());
    }
    for p in &pg.assignment {
        h.update(p.to_le_bytes());
    }
    h.update(tree.to_json().to_string().as_bytes());
    hex::encode(h.finalize())
}

pub fn run_to_root(
    pg: &PartitionedGraph,
    tree: &MergeTree,
    cfg: &RunConfig,
    spill: &dyn SpillStore,
) -> Result<RunResult> {
    if pg.partition_ids() != tree.leaves {
        return Err(Error::Structural(
            "merge tree leaves do not match the graph's partitions".into(),
        ));
    }
    let strategy = cfg.strategy;
    let executor = Executor::parallel(cfg.workers);
    let clock = AtomicU64::new(0);
    let meta = build_meta_graph(&pg.partitions)?;

    let mut active = pg.partitions.clone();
    if !strategy.mirrored() {
        let holders = dedup_holders(&meta);
        for p in &mut active {
            let id = p.id;
            p.remote.retain(|arc| {
                let q = arc.remote_partition;
                holders[&(id.min(q), id.max(q))] == id
            });
        }
    }
    let mut owner: BTreeMap<PartitionId, PartitionId> =
        tree.leaves.iter().map(|&p| (p, p)).collect();
    let mut parked: BTreeMap<PartitionId, Vec<RemoteArc>> = BTreeMap::new();
    let mut levels = Vec::with_capacity(tree.supersteps());
    let mut path_maps = Vec::with_capacity(tree.supersteps());

    for level in 0..=tree.height() {
        let t0 = Instant::now();
        let outputs = run_level(std::mem::take(&mut active), spill, &executor, &clock)?;
        let phase1_ms = t0.elapsed().as_secs_f64() * 1e3;

        let mut report = LevelReport {
            level,
            partitions: outputs
                .iter()
                .map(|o| PartitionReport {
                    partition_id: o.path_map.partition,
                    int64_count: audit_path_map(&o.path_map),
                    remote_arcs: o.path_map.remote.len() as u64,
                    phase1_op_count: o.stats.arc_advances,
                    size_bound: o.stats.size_bound(),
                    transferred_count: 0,
                    entries: o.path_map.entries.len(),
                    ticks: o.ticks,
                    stats: o.stats,
                })
                .collect(),
            merges: Vec::new(),
            merge_ticks: Vec::new(),
            carried: None,
            parked_arcs: parked.values().map(|v| v.len() as u64).sum(),
            phase1_ms,
            merge_ms: 0.0,
        };
        let mut maps: Vec<PathMap> = outputs.into_iter().map(|o| o.path_map).collect();
        path_maps.push(maps.clone());

        if level == tree.height() {
            let root = maps.pop().filter(|_| maps.is_empty()).ok_or_else(|| {
                Error::Structural(format!("{} partitions left at the root level", maps.len() + 1))
            })?;
            if !root.boundary.is_empty() || !root.remote.is_empty() || report.parked_arcs > 0 {
                return Err(Error::Structural(format!(
                    "root partition {} still has remote edges",
                    root.partition
                )));
            }
            levels.push(report);
            let ledger = ledger_of(strategy, run_fingerprint(pg, tree), &levels);
            return Ok(RunResult {
                strategy,
                fingerprint: ledger.fingerprint.clone(),
                root: root.partition,
                root_entries: root.entries,
                levels,
                ledger,
                path_maps,
                virtual_pairs: tree.has_virtual_pairs(),
            });
        }

        let t1 = Instant::now();
        if strategy.deferred() {
            for pm in &mut maps {
                for arc in pm.remote.drain(..) {
                    parked.entry(pg.assignment[arc.local as usize]).or_default().push(arc);
                }
            }
        }
        let plan = &tree.levels[level];
        let mut by_id: BTreeMap<PartitionId, PathMap> =
            maps.into_iter().map(|pm| (pm.partition, pm)).collect();
        let mut jobs = Vec::with_capacity(plan.pairs.len());
        for pair in &plan.pairs {
            let (Some(a), Some(b)) = (by_id.remove(&pair.a), by_id.remove(&pair.b)) else {
                return Err(Error::Structural(format!(
                    "level {level}: pair ({}, {}) names an inactive partition",
                    pair.a, pair.b
                )));
            };
            let mut delivered = Vec::new();
            if strategy.deferred() {
                for (leaf, arcs) in parked.iter_mut() {
                    let host = owner[leaf];
                    if host != pair.a && host != pair.b {
                        continue;
                    }
                    let other = if host == pair.a { pair.b } else { pair.a };
                    let (take, keep): (Vec<_>, Vec<_>) = arcs
                        .drain(..)
                        .partition(|arc| owner[&arc.remote_partition] == other);
                    *arcs = keep;
                    delivered.extend(take);
                }
            }
            jobs.push((a, b, pair.parent, delivered));
        }
        let carried = match (plan.carried, by_id.len()) {
            (None, 0) => None,
            (Some(c), 1) if by_id.contains_key(&c) => by_id.remove(&c),
            _ => {
                return Err(Error::Structural(format!(
                    "level {level}: partitions {:?} are not scheduled",
                    by_id.keys().collect::<Vec<_>>()
                )))
            }
        };

        let owner_ref = &owner;
        let lookup = |leaf: PartitionId| owner_ref[&leaf];
        let merged = executor.map(jobs, |(a, b, parent, delivered)| {
            let start = clock.fetch_add(1, Ordering::SeqCst);
            let r = merge_partitions(&a, &b, parent, level + 1, strategy, &lookup, &delivered)
                .map_err(|e| e.at(level, parent));
            (r, (start, clock.fetch_add(1, Ordering::SeqCst)))
        });
        for (r, ticks) in merged {
            let (partition, record) = r?;
            report.merge_ticks.push(ticks);
            let sender = if record.parent == record.a { record.b } else { record.a };
            if let Some(p) = report.partitions.iter_mut().find(|p| p.partition_id == sender) {
                p.transferred_count = record.transferred;
            }
            report.merges.push(record);
            active.push(partition);
        }
        if let Some(c) = carried {
            report.carried = Some(c.partition);
            active.push(promote(&c, level + 1)?);
        }
        active.sort_by_key(|p| p.id);
        for pair in &plan.pairs {
            for o in owner.values_mut() {
                if *o == pair.a || *o == pair.b {
                    *o = pair.parent;
                }
            }
        }
        report.merge_ms = t1.elapsed().as_secs_f64() * 1e3;
        levels.push(report);
    }
    unreachable!("the root level returns")
}

fn ledger_of(strategy: MergeStrategy, fingerprint: String, levels: &[LevelReport]) -> MemoryLedger {
    MemoryLedger {
        strategy,
        fingerprint,
        levels: levels
            .iter()
            .map(|l| LedgerLevel {
                level: l.level,
                partitions: l
                    .partitions
                    .iter()
                    .map(|p| PartitionUsage {
                        partition: p.partition_id,
                        int64_count: p.int64_count,
                        remote_arcs: p.remote_arcs,
                        transferred: p.transferred_count,
                    })
                    .collect(),
                parked_arcs: l.parked_arcs,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sample_graph;
    use crate::path::PathKind;
    use crate::planner::generate_merge_tree;
    use crate::spill::MemorySpill;

    fn run(pg: &PartitionedGraph, strategy: MergeStrategy, workers: usize) -> RunResult {
        let tree = generate_merge_tree(&build_meta_graph(&pg.partitions).unwrap()).unwrap();
        run_to_root(pg, &tree, &RunConfig { strategy, workers }, &MemorySpill::new()).unwrap()
    }

    #[test]
    fn sample_leaf_entries() {
        let sg = sample_graph();
        let r = run(&sg.partitioned, MergeStrategy::Baseline, 1);
        let shape = |pm: &PathMap| -> Vec<(PathKind, u64, Option<u64>)> {
            pm.entries
                .iter()
                .map(|h| (h.kind, sg.original(h.source), h.sink.map(|s| sg.original(s))))
                .collect()
        };
        let level0: Vec<_> = r.path_maps[0].iter().map(shape).collect();
        assert_eq!(
            level0,
            vec![
                vec![(PathKind::ObPath, 1, Some(2))],
                vec![(PathKind::EbCycle, 3, None)],
                vec![(PathKind::ObPath, 6, Some(9))],
                vec![(PathKind::ObPath, 10, Some(11)), (PathKind::ObPath, 13, Some(14))],
            ]
        );
        assert_eq!(r.supersteps(), 3);
        assert_eq!(r.root, 4);
    }

    #[test]
    fn steps_are_separated_by_barriers() {
        let sg = sample_graph();
        let r = run(&sg.partitioned, MergeStrategy::Dedup, 4);
        let mut last = 0;
        for l in &r.levels {
            let p1_start = l.partitions.iter().map(|p| p.ticks.0).min().unwrap();
            let p1_end = l.partitions.iter().map(|p| p.ticks.1).max().unwrap();
            assert!(p1_start >= last);
            last = p1_end;
            if let Some(m_start) = l.merge_ticks.iter().map(|t| t.0).min() {
                assert!(m_start > p1_end, "merge began before phase 1 finished");
                last = l.merge_ticks.iter().map(|t| t.1).max().unwrap();
            }
        }
    }

    #[test]
    fn transferred_counts_recount() {
        let sg = sample_graph();
        for s in MergeStrategy::ALL {
            let r = run(&sg.partitioned, s, 1);
            for (level, report) in r.levels.iter().enumerate() {
                for m in &report.merges {
                    let sender = if m.parent == m.a { m.b } else { m.a };
                    let pm = r.path_maps[level].iter().find(|p| p.partition == sender).unwrap();
                    let mut values = 2 * pm.boundary.len() as u64;
                    for h in &pm.entries {
                        values += if h.sink.is_some() { 3 } else { 2 };
                    }
                    if !s.deferred() {
                        values += 3 * pm.remote.len() as u64;
                    }
                    assert_eq!(m.transferred, values, "{s} level {level}");
                }
            }
        }
    }

    #[test]
    fn dedup_halves_leaf_arcs() {
        let sg = sample_graph();
        let base = run(&sg.partitioned, MergeStrategy::Baseline, 1);
        let dedup = run(&sg.partitioned, MergeStrategy::Dedup, 1);
        assert_eq!(base.ledger.levels[0].remote_arcs(), 10);
        assert_eq!(dedup.ledger.levels[0].remote_arcs(), 5);
        assert_eq!(base.ledger.cumulative_curve(), vec![62, 28, 2]);
        assert_eq!(dedup.ledger.cumulative_curve(), vec![47, 22, 2]);
    }

    #[test]
    fn single_partition_needs_one_step() {
        let g = crate::graph::Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let pg = PartitionedGraph::from_assignment(g, vec![0, 0, 0]).unwrap();
        let r = run(&pg, MergeStrategy::Baseline, 1);
        assert_eq!(r.supersteps(), 1);
        assert_eq!(r.root_entries.len(), 1);
        assert_eq!(r.root_entries[0].kind, PathKind::Cycle);
    }

    #[test]
    fn mismatched_tree_rejected() {
        let sg = sample_graph();
        let g = crate::graph::Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let pg = PartitionedGraph::from_assignment(g, vec![0, 0, 0]).unwrap();
        let tree = generate_merge_tree(&build_meta_graph(&sg.partitioned.partitions).unwrap()).unwrap();
        assert!(run_to_root(&pg, &tree, &RunConfig::default(), &MemorySpill::new()).is_err());
    }
}
