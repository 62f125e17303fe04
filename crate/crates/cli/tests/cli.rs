use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use euler_core::fixtures::{sample_graph, SAMPLE_EDGES};
use euler_core::io::write_partition_file;
use serde_json::Value;

fn euler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_euler"))
        .args(args)
        .env_remove("EULER_SPILL_DIR")
        .output()
        .expect("binary runs")
}

fn ok_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Sample {
    _dir: tempfile::TempDir,
    root: PathBuf,
    graph: PathBuf,
    parts: PathBuf,
}

fn sample() -> Sample {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let graph = root.join("sample.txt");
    let parts = root.join("sample.part");
    std::fs::write(&graph, SAMPLE_EDGES).unwrap();
    write_partition_file(&parts, &sample_graph().partitioned.assignment).unwrap();
    Sample {
        _dir: dir,
        root,
        graph,
        parts,
    }
}

#[test]
fn generate_eulerize_partition_run_verify() {
    let t = sample();
    let raw = t.root.join("raw.txt");
    let eul = t.root.join("eul.txt");
    let part = t.root.join("eul.part");
    let circuit = t.root.join("circuit.bin");
    let metrics = t.root.join("metrics.json");

    let g = ok_json(&euler(&["generate", "--vertices", "400", "--degree", "4", "--seed", "3", "--out", s(&raw)]));
    assert_eq!(g["edges"], 800);
    let e = ok_json(&euler(&["eulerize", "--in", s(&raw), "--out", s(&eul), "--seed", "3"]));
    assert_eq!(e["eulerian"], true);
    let p = ok_json(&euler(&["partition", "--in", s(&eul), "--parts", "4", "--out", s(&part)]));
    assert_eq!(p["parts"], 4);
    let r = ok_json(&euler(&[
        "run", "--graph", s(&eul), "--parts", s(&part), "--strategy", "dedup-deferred",
        "--workers", "3", "--circuit", s(&circuit), "--format", "binary", "--metrics", s(&metrics),
        "--spill", s(&t.root.join("spill")),
    ]));
    assert_eq!(r["supersteps"], 3);
    let v = ok_json(&euler(&["verify", "--graph", s(&eul), "--circuit", s(&circuit), "--format", "binary"]));
    assert_eq!(v["pass"], true);
    assert!(t.root.join("spill").read_dir().unwrap().count() > 0);

    let oracle = t.root.join("oracle.txt");
    ok_json(&euler(&["oracle", "--graph", s(&eul), "--out", s(&oracle)]));
    let v = ok_json(&euler(&["verify", "--graph", s(&eul), "--circuit", s(&oracle)]));
    assert_eq!(v["pass"], true);
}

#[test]
fn report_has_a_row_per_superstep() {
    let t = sample();
    let mut files = vec![];
    for strategy in ["baseline", "dedup", "dedup-deferred"] {
        let m = t.root.join(format!("{strategy}.json"));
        ok_json(&euler(&[
            "run", "--graph", s(&t.graph), "--parts", s(&t.parts), "--strategy", strategy, "--metrics", s(&m),
        ]));
        files.push(m);
    }
    let csv = t.root.join("levels.csv");
    let out = euler(&["report", "--metrics", s(&files[0]), "--csv", s(&csv)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text
        .lines()
        .skip_while(|l| !l.starts_with("strategy baseline"))
        .skip(2)
        .take_while(|l| !l.trim().is_empty())
        .collect();
    assert_eq!(rows.len(), 3, "{text}");
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 4);

    let mut args = vec!["report", "--metrics"];
    args.extend(files.iter().map(|f| s(f)));
    let out = euler(&args);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ideal avg"), "{text}");
    assert!(text.contains("dedup: level-0 remote arcs 5"), "{text}");
}

#[test]
fn plan_prints_the_tree() {
    let t = sample();
    let out = ok_json(&euler(&["plan", "--graph", s(&t.graph), "--parts", s(&t.parts), "--json"]));
    assert_eq!(out["root"], 4);
    assert_eq!(out["levels"].as_array().unwrap().len(), 2);
}

#[test]
fn bad_circuit_exits_with_two() {
    let t = sample();
    let c = t.root.join("bad.txt");
    std::fs::write(&c, "1\n2\n3\n1\n").unwrap();
    let out = euler(&["verify", "--graph", s(&t.graph), "--circuit", s(&c)]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "validation_failed");
    assert_eq!(err["report"]["pass"], false);
}

#[test]
fn odd_graph_exits_with_two() {
    let t = sample();
    let g = t.root.join("path.txt");
    std::fs::write(&g, "1 2\n2 3\n").unwrap();
    let out = euler(&["run", "--graph", s(&g), "--num-parts", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["exitCode"], 2);
}

#[test]
fn missing_file_exits_with_three() {
    let out = euler(&["oracle", "--graph", "/nonexistent/g.txt", "--out", "/tmp/never"]);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "io");
}

#[test]
fn spill_dir_comes_from_the_environment() {
    let t = sample();
    let spill = t.root.join("env-spill");
    let out = Command::new(env!("CARGO_BIN_EXE_euler"))
        .args(["run", "--graph", s(&t.graph), "--parts", s(&t.parts)])
        .env("EULER_SPILL_DIR", &spill)
        .output()
        .unwrap();
    ok_json(&out);
    assert!(spill.read_dir().unwrap().count() > 0);
}
