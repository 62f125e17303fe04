mod common;

use std::path::Path;

use common::*;
use euler_core::fixtures::{sample_graph, SAMPLE_EDGES};
use euler_core::io::{read_circuit, write_edge_list, write_partition_file, CircuitFormat, LoadedGraph};
use euler_core::oracle::hierholzer;
use euler_core::pipeline::{execute, metrics_digest, read_json, RunManifest};
use euler_core::report::{metrics_csv, render_report, LEDGER_COLUMNS};
use euler_core::runtime::MergeStrategy;
use euler_core::Error;
use serde_json::Value;

const SAMPLE_CIRCUIT: [u64; 17] = [1, 2, 3, 4, 5, 3, 13, 12, 11, 6, 7, 8, 9, 10, 12, 14, 1];

fn sample_files(dir: &Path) -> RunManifest {
    let g = dir.join("sample.txt");
    let p = dir.join("sample.part");
    std::fs::write(&g, SAMPLE_EDGES).unwrap();
    let sg = sample_graph();
    write_partition_file(&p, &sg.partitioned.assignment).unwrap();
    let mut m = RunManifest::new(g);
    m.partitions = Some(p);
    m
}

#[test]
fn sample_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let base = sample_files(dir.path());
    for s in MergeStrategy::ALL {
        for format in [CircuitFormat::Text, CircuitFormat::Binary] {
            let mut m = base.clone();
            m.strategy = s;
            m.workers = 3;
            m.format = format;
            m.spill_dir = Some(dir.path().join(format!("spill-{s}-{format:?}")));
            m.circuit_out = Some(dir.path().join(format!("c-{s}-{format:?}")));
            m.metrics_out = Some(dir.path().join(format!("m-{s}-{format:?}.json")));
            let out = execute(&m).unwrap();
            let walk = read_circuit(m.circuit_out.as_ref().unwrap(), format).unwrap();
            assert_eq!(walk, SAMPLE_CIRCUIT, "{s}");
            assert_eq!(out.result.supersteps(), 3);
            let saved = read_json(m.metrics_out.as_ref().unwrap()).unwrap();
            assert_eq!(saved["digest"].as_str().unwrap(), metrics_digest(&saved));
            assert_eq!(saved["supersteps"], 3);
            assert_eq!(saved["circuit"]["edges"], 16);
        }
    }
}

#[test]
fn oracle_agrees_on_sample() {
    let sg = sample_graph();
    let oracle = hierholzer(&sg.partitioned.graph).unwrap();
    let solved = solve(&sg.partitioned, MergeStrategy::Baseline, 1);
    assert_eq!(walk_census(&oracle.walk), walk_census(&solved.walk));
    assert!(is_euler_circuit(&sg.partitioned.graph, &oracle.walk));
}

#[test]
fn reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let pg = eulerian_instance(1500, 6.0, 6, 42);
    let g = dir.path().join("g.txt");
    write_edge_list(&g, &LoadedGraph::identity(pg.graph.clone())).unwrap();
    let mut m = RunManifest::new(&g);
    m.parts = 6;
    m.seed = 9;
    m.workers = 4;
    m.strategy = MergeStrategy::DedupDeferred;
    let mut digests = Vec::new();
    let mut circuits = Vec::new();
    for run in 0..2 {
        m.spill_dir = Some(dir.path().join(format!("spill{run}")));
        m.circuit_out = Some(dir.path().join(format!("c{run}.bin")));
        m.format = CircuitFormat::Binary;
        let out = execute(&m).unwrap();
        digests.push(out.metrics["digest"].clone());
        circuits.push(std::fs::read(m.circuit_out.as_ref().unwrap()).unwrap());
    }
    assert_eq!(digests[0], digests[1]);
    assert_eq!(circuits[0], circuits[1]);
}

#[test]
fn strategies_differ_only_in_memory_columns() {
    let dir = tempfile::tempdir().unwrap();
    let pg = eulerian_instance(800, 5.0, 8, 3);
    let g = dir.path().join("g.txt");
    write_edge_list(&g, &LoadedGraph::identity(pg.graph.clone())).unwrap();
    let runs: Vec<Value> = MergeStrategy::ALL
        .iter()
        .map(|&s| {
            let mut m = RunManifest::new(&g);
            m.parts = 8;
            m.strategy = s;
            execute(&m).unwrap().metrics
        })
        .collect();
    let csvs: Vec<String> = runs.iter().map(|r| metrics_csv(r).unwrap()).collect();
    let header: Vec<&str> = csvs[0].lines().next().unwrap().split(',').collect();
    let cols = |csv: &str| -> Vec<Vec<String>> {
        csv.lines()
            .skip(1)
            .map(|l| {
                l.split(',')
                    .zip(&header)
                    .filter(|(_, h)| !LEDGER_COLUMNS.contains(h))
                    .map(|(c, _)| c.to_string())
                    .collect()
            })
            .collect()
    };
    assert_eq!(cols(&csvs[0]), cols(&csvs[1]));
    assert_eq!(cols(&csvs[0]), cols(&csvs[2]));
    assert_ne!(csvs[0], csvs[1]);

    let text = render_report(&runs).unwrap();
    assert!(text.contains("ideal avg"));
    assert_eq!(text.matches("supersteps").count(), 3);
    for s in MergeStrategy::ALL {
        assert!(text.contains(&format!("strategy {s}:")));
    }
}

#[test]
fn report_on_sample_has_one_row_per_superstep() {
    let dir = tempfile::tempdir().unwrap();
    let m = sample_files(dir.path());
    let run = execute(&m).unwrap().metrics;
    let text = render_report(&[run.clone()]).unwrap();
    let table: Vec<&str> = text
        .lines()
        .skip_while(|l| !l.starts_with("strategy"))
        .skip(2)
        .take_while(|l| !l.trim().is_empty())
        .collect();
    assert_eq!(table.len(), 3);
    assert_eq!(metrics_csv(&run).unwrap().lines().count(), 4);
}

#[test]
fn odd_graph_is_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("path.txt");
    std::fs::write(&g, "1 2\n2 3\n").unwrap();
    let mut m = RunManifest::new(&g);
    m.parts = 1;
    let err = execute(&m).err().unwrap();
    assert_eq!(err.exit_code(), 2, "{err}");
}

#[test]
fn short_partition_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = sample_files(dir.path());
    let p = dir.path().join("short.part");
    std::fs::write(&p, "1\n1\n2\n").unwrap();
    m.partitions = Some(p);
    assert!(execute(&m).is_err());
}

#[test]
fn missing_input_is_an_io_error() {
    let m = RunManifest::new("/nonexistent/graph.txt");
    assert!(matches!(execute(&m), Err(Error::Io { .. })));
}
