//! Resident-state accounting in 8-byte integer values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{PathKind, PathMap};

use super::strategy::MergeStrategy;

/// Values per remote arc: local vertex, remote vertex, remote partition.
pub const ARC_VALUES: u64 = 3;
/// Values per boundary vertex: id and surviving remote degree.
pub const BOUNDARY_VALUES: u64 = 2;

/// The one counting routine used by every strategy: entry headers (id,
/// source, plus sink for paths), boundary vertices and held remote arcs.
pub fn audit_path_map(pm: &PathMap) -> u64 {
    let headers: u64 = pm
        .entries
        .iter()
        .map(|h| if h.kind == PathKind::ObPath { 3 } else { 2 })
        .sum();
    headers + BOUNDARY_VALUES * pm.boundary.len() as u64 + ARC_VALUES * pm.remote.len() as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PartitionUsage {
    pub partition: u32,
    pub int64_count: u64,
    pub remote_arcs: u64,
    /// Values shipped to the merge parent after this level (0 if carried or root).
    pub transferred: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LedgerLevel {
    pub level: usize,
    pub partitions: Vec<PartitionUsage>,
    /// Arcs parked on inactive leaf hosts.
    pub parked_arcs: u64,
}

impl LedgerLevel {
    pub fn active_total(&self) -> u64 {
        self.partitions.iter().map(|p| p.int64_count).sum()
    }

    /// All resident state at this level, parked arcs included.
    pub fn cumulative(&self) -> u64 {
        self.active_total() + ARC_VALUES * self.parked_arcs
    }

    /// Mean state per active partition.
    pub fn average(&self) -> f64 {
        self.active_total() as f64 / self.partitions.len().max(1) as f64
    }

    pub fn remote_arcs(&self) -> u64 {
        self.partitions.iter().map(|p| p.remote_arcs).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MemoryLedger {
    pub strategy: MergeStrategy,
    /// Hash of graph, partitioning and merge tree.
    pub fingerprint: String,
    pub levels: Vec<LedgerLevel>,
}

impl MemoryLedger {
    pub fn cumulative_curve(&self) -> Vec<u64> {
        self.levels.iter().map(LedgerLevel::cumulative).collect()
    }

    pub fn average_curve(&self) -> Vec<f64> {
        self.levels.iter().map(LedgerLevel::average).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StrategyCurve {
    pub strategy: MergeStrategy,
    pub cumulative: Vec<u64>,
    pub average: Vec<f64>,
    pub level0_remote_arcs: u64,
    /// Reduction against the first ledger, in percent, per level.
    pub cumulative_gap_pct: Vec<f64>,
    pub average_gap_pct: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LedgerComparison {
    pub fingerprint: String,
    pub active_partitions: Vec<usize>,
    /// Every partition keeps the level-0 average size.
    pub ideal_cumulative: Vec<f64>,
    pub ideal_average: Vec<f64>,
    pub curves: Vec<StrategyCurve>,
}

/// Lines up the per-level curves of ledgers from runs over the same input.
/// The first ledger is the reference for the gap percentages and the ideal
/// curve.
pub fn strategy_ledger_compare(ledgers: &[MemoryLedger]) -> Result<LedgerComparison> {
    let first = ledgers
        .first()
        .ok_or_else(|| Error::InvalidConfig("no ledgers to compare".into()))?;
    for l in &ledgers[1..] {
        if l.fingerprint != first.fingerprint {
            return Err(Error::FingerprintMismatch(
                first.fingerprint.clone(),
                l.fingerprint.clone(),
            ));
        }
        if l.levels.len() != first.levels.len() {
            return Err(Error::Structural("ledgers have different level counts".into()));
        }
    }
    let active: Vec<usize> = first.levels.iter().map(|l| l.partitions.len()).collect();
    let avg0 = first.levels.first().map_or(0.0, LedgerLevel::average);
    let pct = |reference: f64, x: f64| {
        if reference == 0.0 {
            0.0
        } else {
            100.0 * (reference - x) / reference
        }
    };
    let base_cum = first.cumulative_curve();
    let base_avg = first.average_curve();
    let curves = ledgers
        .iter()
        .map(|l| {
            let cumulative = l.cumulative_curve();
            let average = l.average_curve();
            StrategyCurve {
                strategy: l.strategy,
                cumulative_gap_pct: base_cum
                    .iter()
                    .zip(&cumulative)
                    .map(|(&b, &x)| pct(b as f64, x as f64))
                    .collect(),
                average_gap_pct: base_avg.iter().zip(&average).map(|(&b, &x)| pct(b, x)).collect(),
                level0_remote_arcs: l.levels.first().map_or(0, LedgerLevel::remote_arcs),
                cumulative,
                average,
            }
        })
        .collect();
    Ok(LedgerComparison {
        fingerprint: first.fingerprint.clone(),
        ideal_cumulative: active.iter().map(|&n| avg0 * n as f64).collect(),
        ideal_average: vec![avg0; active.len()],
        active_partitions: active,
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{BoundaryVertex, PathHeader, PathId};
    use crate::partition::RemoteArc;

    fn ledger(strategy: MergeStrategy, fp: &str, counts: &[&[u64]]) -> MemoryLedger {
        MemoryLedger {
            strategy,
            fingerprint: fp.into(),
            levels: counts
                .iter()
                .enumerate()
                .map(|(level, cs)| LedgerLevel {
                    level,
                    partitions: cs
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| PartitionUsage {
                            partition: i as u32,
                            int64_count: c,
                            remote_arcs: 0,
                            transferred: 0,
                        })
                        .collect(),
                    parked_arcs: 0,
                })
                .collect(),
        }
    }

    #[test]
    fn audit_counts_each_part() {
        let pm = PathMap {
            partition: 0,
            level: 0,
            entries: vec![
                PathHeader { id: PathId::new(0, 0, 0), kind: PathKind::ObPath, source: 1, sink: Some(2) },
                PathHeader { id: PathId::new(0, 0, 1), kind: PathKind::EbCycle, source: 3, sink: None },
            ],
            boundary: vec![BoundaryVertex { vertex: 1, remote_degree: 1 }],
            remote: vec![RemoteArc { local: 1, remote: 9, remote_partition: 1 }],
        };
        assert_eq!(audit_path_map(&pm), 3 + 2 + 2 + 3);
    }

    #[test]
    fn comparison_gaps_and_ideal() {
        let base = ledger(MergeStrategy::Baseline, "f", &[&[10, 10, 10, 10], &[12, 12], &[4]]);
        let dedup = ledger(MergeStrategy::Dedup, "f", &[&[5, 5, 5, 5], &[6, 6], &[4]]);
        let cmp = strategy_ledger_compare(&[base.clone(), dedup]).unwrap();
        assert_eq!(cmp.active_partitions, vec![4, 2, 1]);
        assert_eq!(cmp.ideal_average, vec![10.0; 3]);
        assert_eq!(cmp.ideal_cumulative, vec![40.0, 20.0, 10.0]);
        assert_eq!(cmp.curves[1].cumulative_gap_pct, vec![50.0, 50.0, 0.0]);
        let other = ledger(MergeStrategy::Dedup, "g", &[&[1]]);
        assert!(matches!(
            strategy_ledger_compare(&[base, other]),
            Err(Error::FingerprintMismatch(..))
        ));
    }

    #[test]
    fn parked_arcs_count_toward_cumulative_only() {
        let mut l = ledger(MergeStrategy::DedupDeferred, "f", &[&[4, 6]]);
        l.levels[0].parked_arcs = 2;
        assert_eq!(l.levels[0].cumulative(), 16);
        assert_eq!(l.levels[0].average(), 5.0);
    }
}
