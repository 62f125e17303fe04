use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use euler_core::circuit::validate_circuit;
use euler_core::graph::validate_eulerian;
use euler_core::io::{
    read_circuit, read_edge_list, read_partition_file, write_circuit, write_edge_list,
    write_partition_file, CircuitFormat, LoadedGraph,
};
use euler_core::meta::build_meta_graph;
use euler_core::oracle::hierholzer;
use euler_core::partition::PartitionedGraph;
use euler_core::pipeline::{execute, read_json, sub_seed, RunManifest};
use euler_core::planner::generate_merge_tree;
use euler_core::report::{metrics_csv, render_report, timings_csv};
use euler_core::runtime::MergeStrategy;
use euler_core::tools::{
    degree_histogram, eulerize, generate_power_law, partition_graph, DatasetStats,
    GeneratorConfig, DEFAULT_RMAT,
};
use euler_core::{Error, Result};

#[derive(Parser)]
#[command(name = "euler", version, about = "Partition-centric Euler circuit engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an R-MAT power-law graph.
    Generate(GenerateArgs),
    /// Add edges so every vertex has even degree and the graph is connected.
    Eulerize(EulerizeArgs),
    /// Partition a graph, or check an imported partition file.
    Partition(PartitionArgs),
    /// Print the merge tree.
    Plan(PlanArgs),
    /// Run all phases and write the circuit and metrics.
    Run(RunArgs),
    /// Sequential Hierholzer circuit.
    Oracle(OracleArgs),
    /// Check a circuit against a graph.
    Verify(VerifyArgs),
    /// Tables and CSV from run metrics.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Binary,
}

impl From<Format> for CircuitFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => CircuitFormat::Text,
            Format::Binary => CircuitFormat::Binary,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Baseline,
    Dedup,
    DedupDeferred,
}

impl From<StrategyArg> for MergeStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Baseline => MergeStrategy::Baseline,
            StrategyArg::Dedup => MergeStrategy::Dedup,
            StrategyArg::DedupDeferred => MergeStrategy::DedupDeferred,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    vertices: usize,
    /// Average undirected degree.
    #[arg(long, default_value_t = 5.0)]
    degree: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// R-MAT quadrant probabilities a,b,c,d.
    #[arg(long, value_delimiter = ',', num_args = 4)]
    rmat: Option<Vec<f64>>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EulerizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PartitionArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, required_unless_present = "import")]
    parts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Existing partition file to validate instead of partitioning.
    #[arg(long, conflicts_with = "parts")]
    import: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    parts: PathBuf,
    /// Print only the JSON form.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Partition file.
    #[arg(long, required_unless_present = "num_parts")]
    parts: Option<PathBuf>,
    /// Partition with the built-in partitioner instead of a file.
    #[arg(long, conflicts_with = "parts")]
    num_parts: Option<usize>,
    #[arg(long, value_enum, default_value = "baseline")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "EULER_SPILL_DIR")]
    spill: Option<PathBuf>,
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ReportArgs {
    /// Metrics files; several runs of one input are compared.
    #[arg(long, num_args = 1.., required = true)]
    metrics: Vec<PathBuf>,
    /// Per-level CSV of the first metrics file.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    timings: Option<PathBuf>,
}

/// A command that ran but found its input invalid.
struct Rejected(Value);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Ok(out)) => {
            // A closed pipe (e.g. `| head`) is not an error of ours.
            let _ = writeln!(std::io::stdout(), "{out}");
            ExitCode::SUCCESS
        }
        Ok(Err(Rejected(report))) => {
            eprintln!("{}", json!({"error": "validation_failed", "report": report}));
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!(
                "{}",
                json!({"error": e.kind(), "message": e.to_string(), "exitCode": e.exit_code()})
            );
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn dispatch(cmd: Command) -> Result<std::result::Result<String, Rejected>> {
    match cmd {
        Command::Generate(a) => {
            let mut cfg = GeneratorConfig::new(a.vertices, a.degree, sub_seed(a.seed, "generator"));
            cfg.rmat_probabilities = match a.rmat {
                Some(p) => [p[0], p[1], p[2], p[3]],
                None => DEFAULT_RMAT,
            };
            let g = generate_power_law(&cfg)?;
            let out = json!({
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "degreeHistogram": degree_histogram(&g),
            });
            write_edge_list(&a.out, &LoadedGraph::identity(g))?;
            Ok(Ok(pretty(&out)))
        }
        Command::Eulerize(a) => {
            let loaded = read_edge_list(&a.input)?;
            let (g, report) = eulerize(&loaded.graph, sub_seed(a.seed, "eulerizer"))?;
            let check = validate_eulerian(&g);
            let out = json!({
                "originalEdges": report.original_edges,
                "addedEdges": report.added_edges.len(),
                "addedRatio": report.added_ratio(),
                "componentsJoined": report.components_joined,
                "bridgeVertices": report.bridge_vertices.iter().map(|&v| loaded.original(v)).collect::<Vec<_>>(),
                "eulerian": check.pass,
                "degreeHistogram": degree_histogram(&g),
            });
            write_edge_list(
                &a.out,
                &LoadedGraph {
                    graph: g,
                    original_ids: loaded.original_ids,
                },
            )?;
            Ok(Ok(pretty(&out)))
        }
        Command::Partition(a) => {
            let loaded = read_edge_list(&a.input)?;
            let assignment = match (&a.import, a.parts) {
                (Some(file), _) => read_partition_file(file)?,
                (None, Some(k)) => partition_graph(&loaded.graph, k, sub_seed(a.seed, "partitioner"))?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let pg = PartitionedGraph::from_assignment(loaded.graph, assignment)?;
            for p in &pg.partitions {
                p.validate()?;
                euler_core::partition::classify_vertices(p)?;
            }
            if let Some(out) = &a.out {
                write_partition_file(out, &pg.assignment)?;
            }
            Ok(Ok(pretty(&serde_json::to_value(DatasetStats::compute(&pg)).unwrap())))
        }
        Command::Plan(a) => {
            let loaded = read_edge_list(&a.graph)?;
            let pg = PartitionedGraph::from_assignment(loaded.graph, read_partition_file(&a.parts)?)?;
            let tree = generate_merge_tree(&build_meta_graph(&pg.partitions)?)?;
            let js = pretty(&tree.to_json());
            Ok(Ok(if a.json {
                js
            } else {
                format!("{}\n{js}", tree.render_text())
            }))
        }
        Command::Run(a) => {
            let manifest = RunManifest {
                graph: a.graph,
                partitions: a.parts,
                parts: a.num_parts.unwrap_or(1),
                strategy: a.strategy.into(),
                seed: a.seed,
                workers: a.workers,
                spill_dir: a.spill,
                circuit_out: a.circuit,
                metrics_out: a.metrics,
                format: a.format.into(),
            };
            let outcome = execute(&manifest)?;
            Ok(Ok(pretty(&json!({
                "supersteps": outcome.result.supersteps(),
                "edges": outcome.unroll.edges,
                "circuitSha256": outcome.circuit_sha256,
                "digest": outcome.metrics["digest"],
            }))))
        }
        Command::Oracle(a) => {
            let loaded = read_edge_list(&a.graph)?;
            let c = hierholzer(&loaded.graph)?;
            let walk: Vec<u64> = c.walk.iter().map(|&v| loaded.original(v)).collect();
            write_circuit(&a.out, &walk, a.format.into())?;
            Ok(Ok(pretty(&json!({"edges": c.edge_count()}))))
        }
        Command::Verify(a) => {
            let loaded = read_edge_list(&a.graph)?;
            let walk: Vec<u32> = read_circuit(&a.circuit, a.format.into())?
                .into_iter()
                .map(|o| loaded.compact(o).unwrap_or(u32::MAX))
                .collect();
            let report = validate_circuit(&loaded.graph, &walk);
            let v = serde_json::to_value(&report).unwrap();
            Ok(if report.pass { Ok(pretty(&v)) } else { Err(Rejected(v)) })
        }
        Command::Report(a) => {
            let runs = a.metrics.iter().map(|p| read_json(p)).collect::<Result<Vec<_>>>()?;
            if let Some(csv) = &a.csv {
                write_text(csv, &metrics_csv(&runs[0])?)?;
            }
            if let Some(t) = &a.timings {
                write_text(t, &timings_csv(&runs[0])?)?;
            }
            Ok(Ok(render_report(&runs)?))
        }
    }
}
