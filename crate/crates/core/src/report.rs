//! Human-readable tables and CSV from run metrics.

use std::fmt::Write as _;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::runtime::{strategy_ledger_compare, MemoryLedger};
use crate::tools::DatasetStats;

fn field<'a>(v: &'a Value, path: &[&str]) -> Result<&'a Value> {
    path.iter().try_fold(v, |cur, k| {
        cur.get(k)
            .ok_or_else(|| Error::Metrics(format!("missing field {}", path.join("."))))
    })
}

fn num(v: &Value, path: &[&str]) -> Result<f64> {
    field(v, path)?
        .as_f64()
        .ok_or_else(|| Error::Metrics(format!("field {} is not a number", path.join("."))))
}

fn levels(v: &Value) -> Result<&Vec<Value>> {
    field(v, &["levels"])?
        .as_array()
        .ok_or_else(|| Error::Metrics("levels is not an array".into()))
}

fn ledger(v: &Value) -> Result<MemoryLedger> {
    serde_json::from_value(field(v, &["ledger"])?.clone())
        .map_err(|e| Error::Metrics(format!("ledger: {e}")))
}

struct Row {
    level: u64,
    partitions: usize,
    ops: u64,
    entries: u64,
    remote_arcs: u64,
    transferred: u64,
    parked: u64,
    cumulative: u64,
    average: f64,
    phase1_ms: f64,
    merge_ms: f64,
}

fn rows(v: &Value) -> Result<Vec<Row>> {
    levels(v)?
        .iter()
        .map(|l| {
            let parts = field(l, &["partitions"])?
                .as_array()
                .ok_or_else(|| Error::Metrics("partitions is not an array".into()))?;
            let sum = |k: &str| -> Result<u64> {
                parts.iter().map(|p| num(p, &[k]).map(|x| x as u64)).sum()
            };
            Ok(Row {
                level: num(l, &["level"])? as u64,
                partitions: parts.len(),
                ops: sum("phase1OpCount")?,
                entries: sum("entries")?,
                remote_arcs: sum("remoteArcs")?,
                transferred: sum("transferredCount")?,
                parked: num(l, &["parkedArcs"])? as u64,
                cumulative: num(l, &["cumulative"])? as u64,
                average: num(l, &["average"])?,
                phase1_ms: num(l, &["wallClock", "phase1Ms"]).unwrap_or(0.0),
                merge_ms: num(l, &["wallClock", "mergeMs"]).unwrap_or(0.0),
            })
        })
        .collect()
}

/// Dataset table, per-superstep tables for each run, and, for several runs,
/// the memory curves side by side with the ideal curve.
pub fn render_report(runs: &[Value]) -> Result<String> {
    let first = runs
        .first()
        .ok_or_else(|| Error::Metrics("no metrics given".into()))?;
    let mut s = String::new();
    let stats: DatasetStats = serde_json::from_value(field(first, &["stats"])?.clone())
        .map_err(|e| Error::Metrics(format!("stats: {e}")))?;
    let _ = writeln!(s, "dataset");
    let _ = writeln!(
        s,
        "{:>10} {:>10} {:>10} {:>6} {:>11} {:>12}",
        "|V|", "|E|", "sum|B_i|", "parts", "edge-cut %", "imbalance %"
    );
    let _ = writeln!(
        s,
        "{:>10} {:>10} {:>10} {:>6} {:>11.2} {:>12.2}",
        stats.vertices,
        stats.edges,
        stats.boundary_vertices,
        stats.parts,
        stats.edge_cut_pct,
        stats.imbalance_pct
    );

    for run in runs {
        let strategy = field(run, &["manifest", "strategy"])?.as_str().unwrap_or("?");
        let _ = writeln!(
            s,
            "\nstrategy {strategy}: {} supersteps",
            num(run, &["supersteps"])?
        );
        let _ = writeln!(
            s,
            "{:>5} {:>6} {:>12} {:>10} {:>10} {:>9} {:>12} {:>12} {:>12}",
            "level", "parts", "phase1 ops", "phase1 ms", "merge ms", "p1 share", "cumulative", "average", "transferred"
        );
        for r in rows(run)? {
            let total = r.phase1_ms + r.merge_ms;
            let share = if total > 0.0 { 100.0 * r.phase1_ms / total } else { 100.0 };
            let _ = writeln!(
                s,
                "{:>5} {:>6} {:>12} {:>10.3} {:>10.3} {:>8.1}% {:>12} {:>12.1} {:>12}",
                r.level, r.partitions, r.ops, r.phase1_ms, r.merge_ms, share, r.cumulative, r.average, r.transferred
            );
        }
    }

    if runs.len() > 1 {
        let ledgers = runs.iter().map(ledger).collect::<Result<Vec<_>>>()?;
        let cmp = strategy_ledger_compare(&ledgers)?;
        let _ = writeln!(s, "\nmemory state (int64 values), gaps relative to {}", ledgers[0].strategy);
        let _ = write!(s, "{:>5} {:>14}", "level", "ideal avg");
        for c in &cmp.curves {
            let _ = write!(s, " {:>28}", format!("{} cum/avg", c.strategy));
        }
        let _ = writeln!(s);
        for (i, ideal) in cmp.ideal_average.iter().enumerate() {
            let _ = write!(s, "{i:>5} {ideal:>14.1}");
            for c in &cmp.curves {
                let cell = format!(
                    "{}/{:.1} ({:+.1}%/{:+.1}%)",
                    c.cumulative[i], c.average[i], -c.cumulative_gap_pct[i], -c.average_gap_pct[i]
                );
                let _ = write!(s, " {cell:>28}");
            }
            let _ = writeln!(s);
        }
        for c in &cmp.curves {
            let _ = writeln!(s, "{}: level-0 remote arcs {}", c.strategy, c.level0_remote_arcs);
        }
    }
    Ok(s)
}

/// Per-level CSV without timings, so runs of one manifest under different
/// strategies differ only in the memory columns.
pub fn metrics_csv(run: &Value) -> Result<String> {
    let mut s = String::from(
        "level,partitions,phase1_ops,entries,remote_arcs,parked_arcs,transferred,cumulative_int64,average_int64\n",
    );
    for r in rows(run)? {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{:.3}",
            r.level, r.partitions, r.ops, r.entries, r.remote_arcs, r.parked, r.transferred, r.cumulative, r.average
        );
    }
    Ok(s)
}

pub fn timings_csv(run: &Value) -> Result<String> {
    let mut s = String::from("level,phase1_ms,merge_ms,phase1_share_pct\n");
    for r in rows(run)? {
        let total = r.phase1_ms + r.merge_ms;
        let share = if total > 0.0 { 100.0 * r.phase1_ms / total } else { 100.0 };
        let _ = writeln!(s, "{},{:.3},{:.3},{:.1}", r.level, r.phase1_ms, r.merge_ms, share);
    }
    Ok(s)
}

/// CSV columns that carry memory accounting.
pub const LEDGER_COLUMNS: [&str; 5] = [
    "remote_arcs",
    "parked_arcs",
    "transferred",
    "cumulative_int64",
    "average_int64",
];
