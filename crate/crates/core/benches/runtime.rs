//! Sequential vs. pooled superstep execution on one partitioned graph.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use euler_core::meta::build_meta_graph;
use euler_core::partition::PartitionedGraph;
use euler_core::planner::generate_merge_tree;
use euler_core::runtime::{run_to_root, MergeStrategy, RunConfig};
use euler_core::spill::MemorySpill;
use euler_core::tools::{eulerize, generate_power_law, partition_graph, GeneratorConfig};
use euler_core::unroll::unroll_to_vec;

fn instance(n: usize, parts: usize) -> PartitionedGraph {
    let g = generate_power_law(&GeneratorConfig::new(n, 6.0, 7)).unwrap();
    let (g, _) = eulerize(&g, 7).unwrap();
    let a = partition_graph(&g, parts, 7).unwrap();
    PartitionedGraph::from_assignment(g, a).unwrap()
}

fn supersteps(c: &mut Criterion) {
    let pg = instance(40_000, 16);
    let tree = generate_merge_tree(&build_meta_graph(&pg.partitions).unwrap()).unwrap();
    let mut group = c.benchmark_group("run_to_root");
    group.sample_size(10);
    for workers in [1usize, 2, 4, 8] {
        let label = if workers == 1 { "sequential" } else { "parallel" };
        group.bench_with_input(BenchmarkId::new(label, workers), &workers, |b, &workers| {
            b.iter(|| {
                let spill = MemorySpill::new();
                let cfg = RunConfig {
                    strategy: MergeStrategy::Dedup,
                    workers,
                };
                let r = run_to_root(&pg, &tree, &cfg, &spill).unwrap();
                black_box(unroll_to_vec(&spill, &r.root_entries).unwrap().0.walk.len())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, supersteps);
criterion_main!(benches);
