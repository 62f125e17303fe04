//! One complete run described by a manifest: load, partition, plan, execute
//! the supersteps, unroll, and write circuit and metrics.

use std::fs::File;
use std::io::{BufWriter, Read};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{read_edge_list, read_partition_file, CircuitFormat, CircuitWriter, LoadedGraph};
use crate::meta::build_meta_graph;
use crate::partition::{PartitionId, PartitionedGraph};
use crate::planner::generate_merge_tree;
use crate::runtime::{run_to_root, MergeStrategy, RunConfig, RunResult};
use crate::spill::{DirSpill, MemorySpill, SpillStore};
use crate::tools::{partition_graph, DatasetStats};
use crate::unroll::{unroll, UnrollStats};

/// Key under which timings are stored; excluded from the digest.
pub const WALL_CLOCK: &str = "wallClock";

/// Seed for a named consumer, derived from the run seed.
pub fn sub_seed(seed: u64, name: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(name.as_bytes());
    u64::from_le_bytes(h.finalize()[..8].try_into().unwrap())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunManifest {
    pub graph: PathBuf,
    /// Partition file; without one the built-in partitioner makes `parts` parts.
    pub partitions: Option<PathBuf>,
    pub parts: usize,
    pub strategy: MergeStrategy,
    pub seed: u64,
    pub workers: usize,
    pub spill_dir: Option<PathBuf>,
    pub circuit_out: Option<PathBuf>,
    pub metrics_out: Option<PathBuf>,
    #[serde(skip)]
    pub format: CircuitFormat,
}

impl RunManifest {
    pub fn new(graph: impl Into<PathBuf>) -> Self {
        RunManifest {
            graph: graph.into(),
            partitions: None,
            parts: 1,
            strategy: MergeStrategy::Baseline,
            seed: 0,
            workers: 1,
            spill_dir: None,
            circuit_out: None,
            metrics_out: None,
            format: CircuitFormat::Text,
        }
    }

    /// SHA-256 over the graph file and the partition file, if any.
    pub fn input_hash(&self) -> Result<String> {
        let mut h = Sha256::new();
        for path in std::iter::once(&self.graph).chain(&self.partitions) {
            let mut bytes = Vec::new();
            File::open(path)
                .and_then(|mut f| f.read_to_end(&mut bytes))
                .map_err(|e| Error::io(path, e))?;
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(&bytes);
        }
        Ok(hex::encode(h.finalize()))
    }
}

pub struct RunOutcome {
    pub result: RunResult,
    pub unroll: UnrollStats,
    /// Hash of the circuit as little-endian `u64` original ids.
    pub circuit_sha256: String,
    pub metrics: Value,
}

/// Loads the graph and its partitioning as the manifest describes.
pub fn load_partitioned(m: &RunManifest) -> Result<(LoadedGraph, PartitionedGraph)> {
    let loaded = read_edge_list(&m.graph)?;
    let assignment: Vec<PartitionId> = match &m.partitions {
        Some(p) => read_partition_file(p)?,
        None => partition_graph(&loaded.graph, m.parts, sub_seed(m.seed, "partitioner"))?,
    };
    let pg = PartitionedGraph::from_assignment(loaded.graph.clone(), assignment)?;
    Ok((loaded, pg))
}

pub fn execute(m: &RunManifest) -> Result<RunOutcome> {
    let t0 = Instant::now();
    let input_hash = m.input_hash()?;
    let (loaded, pg) = load_partitioned(m)?;
    let meta = build_meta_graph(&pg.partitions)?;
    let tree = generate_merge_tree(&meta)?;
    let spill: Box<dyn SpillStore> = match &m.spill_dir {
        Some(dir) => Box::new(DirSpill::create(dir)?),
        None => Box::new(MemorySpill::new()),
    };
    let cfg = RunConfig {
        strategy: m.strategy,
        workers: m.workers,
    };
    let result = run_to_root(&pg, &tree, &cfg, spill.as_ref())?;
    let t_run = t0.elapsed();

    let mut hasher = Sha256::new();
    let mut writer = match &m.circuit_out {
        Some(path) => {
            let f = File::create(path).map_err(|e| Error::io(path, e))?;
            Some(CircuitWriter::new(BufWriter::new(f), m.format))
        }
        None => None,
    };
    let out_path = m.circuit_out.clone().unwrap_or_default();
    let unroll_stats = unroll(spill.as_ref(), &result.root_entries, &mut |v| {
        let orig = loaded.original(v);
        hasher.update(orig.to_le_bytes());
        if let Some(w) = writer.as_mut() {
            w.push(orig).map_err(|e| Error::io(&out_path, e))?;
        }
        Ok(())
    })?;
    if let Some(w) = writer {
        w.finish().map_err(|e| Error::io(&out_path, e))?;
    }
    let circuit_sha256 = hex::encode(hasher.finalize());
    let total = t0.elapsed();

    let mut metrics = json!({
        "manifest": {
            "inputHash": input_hash,
            "strategy": m.strategy,
            "seed": m.seed,
            "parts": pg.partitions.len(),
            "workers": m.workers,
        },
        "fingerprint": result.fingerprint,
        "stats": DatasetStats::compute(&pg),
        "tree": tree.to_json(),
        "supersteps": result.supersteps(),
        "virtualPairs": result.virtual_pairs,
        "levels": levels_json(&result),
        "ledger": result.ledger,
        "unroll": unroll_stats,
        "circuit": {
            "edges": unroll_stats.edges,
            "sha256": circuit_sha256,
        },
        WALL_CLOCK: {
            "runMs": t_run.as_secs_f64() * 1e3,
            "unrollMs": (total - t_run).as_secs_f64() * 1e3,
            "totalMs": total.as_secs_f64() * 1e3,
        },
    });
    let digest = metrics_digest(&metrics);
    metrics["digest"] = Value::String(digest);
    if let Some(path) = &m.metrics_out {
        write_json(path, &metrics)?;
    }
    Ok(RunOutcome {
        result,
        unroll: unroll_stats,
        circuit_sha256,
        metrics,
    })
}

fn levels_json(r: &RunResult) -> Value {
    let ledger = &r.ledger.levels;
    Value::Array(
        r.levels
            .iter()
            .zip(ledger)
            .map(|(l, led)| {
                json!({
                    "level": l.level,
                    "partitions": l.partitions.iter().map(|p| json!({
                        "partitionId": p.partition_id,
                        "int64Count": p.int64_count,
                        "remoteArcs": p.remote_arcs,
                        "phase1OpCount": p.phase1_op_count,
                        "sizeBound": p.size_bound,
                        "transferredCount": p.transferred_count,
                        "entries": p.entries,
                    })).collect::<Vec<_>>(),
                    "merges": l.merges,
                    "carried": l.carried,
                    "parkedArcs": l.parked_arcs,
                    "cumulative": led.cumulative(),
                    "average": led.average(),
                    WALL_CLOCK: { "phase1Ms": l.phase1_ms, "mergeMs": l.merge_ms },
                })
            })
            .collect(),
    )
}

/// Copy of `v` without timing fields or the digest itself.
pub fn strip_wall_clock(v: &Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(
            map.iter()
                .filter(|(k, _)| k.as_str() != WALL_CLOCK && k.as_str() != "digest")
                .map(|(k, v)| (k.clone(), strip_wall_clock(v)))
                .collect(),
        ),
        Value::Array(a) => Value::Array(a.iter().map(strip_wall_clock).collect()),
        other => other.clone(),
    }
}

pub fn metrics_digest(metrics: &Value) -> String {
    hex::encode(Sha256::digest(strip_wall_clock(metrics).to_string().as_bytes()))
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("json value serializes");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Metrics(format!("{}: {e}", path.display())))
}
