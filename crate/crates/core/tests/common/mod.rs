//! Helpers shared by the integration suites. Everything that checks a result
//! is written from scratch here rather than borrowed from the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use euler_core::graph::{Graph, VertexId};
use euler_core::meta::build_meta_graph;
use euler_core::partition::{PartitionId, PartitionedGraph};
use euler_core::planner::generate_merge_tree;
use euler_core::runtime::{run_to_root, MergeStrategy, RunConfig, RunResult};
use euler_core::spill::MemorySpill;
use euler_core::tools::{eulerize, generate_power_law, partition_graph, GeneratorConfig};
use euler_core::unroll::{unroll_to_vec, UnrollStats};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Census = BTreeMap<(VertexId, VertexId), usize>;

pub fn graph_census(g: &Graph) -> Census {
    let mut c = Census::new();
    for v in 0..g.vertex_count() as VertexId {
        for &w in g.neighbors(v) {
            if v < w {
                *c.entry((v, w)).or_default() += 1;
            }
        }
    }
    c
}

pub fn walk_census(walk: &[VertexId]) -> Census {
    let mut c = Census::new();
    for w in walk.windows(2) {
        *c.entry((w[0].min(w[1]), w[0].max(w[1]))).or_default() += 1;
    }
    c
}

/// Closed, and uses every edge of `g` exactly as often as it exists.
pub fn is_euler_circuit(g: &Graph, walk: &[VertexId]) -> bool {
    if g.edge_count() == 0 {
        return walk.len() <= 1;
    }
    walk.len() == g.edge_count() + 1
        && walk.first() == walk.last()
        && walk_census(walk) == graph_census(g)
}

pub fn degrees(g: &Graph) -> Vec<usize> {
    let mut d = vec![0; g.vertex_count()];
    for (u, v) in g.edges() {
        d[u as usize] += 1;
        d[v as usize] += 1;
    }
    d
}

/// Local and remote degree of every vertex under `assignment`.
pub fn split_degrees(g: &Graph, assignment: &[PartitionId]) -> Vec<(usize, usize)> {
    let mut d = vec![(0, 0); g.vertex_count()];
    for (u, v) in g.edges() {
        let same = assignment[u as usize] == assignment[v as usize];
        for x in [u, v] {
            if same {
                d[x as usize].0 += 1;
            } else {
                d[x as usize].1 += 1;
            }
        }
    }
    d
}

/// Remote edge counts between partition pairs, straight from the edge list.
pub fn cut_weights(g: &Graph, assignment: &[PartitionId]) -> BTreeMap<(PartitionId, PartitionId), u64> {
    let mut w = BTreeMap::new();
    for (u, v) in g.edges() {
        let (a, b) = (assignment[u as usize], assignment[v as usize]);
        if a != b {
            *w.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    w
}

/// Power-law graph made Eulerian, then split into `parts` parts.
pub fn eulerian_instance(n: usize, degree: f64, parts: usize, seed: u64) -> PartitionedGraph {
    let g = generate_power_law(&GeneratorConfig::new(n, degree, seed)).unwrap();
    let (g, _) = eulerize(&g, seed ^ 0x5eed).unwrap();
    let a = partition_graph(&g, parts, seed ^ 0xbeef).unwrap();
    PartitionedGraph::from_assignment(g, a).unwrap()
}

/// Same graph family, but every vertex lands in a uniformly random part, so
/// partitions are often disconnected.
pub fn scattered_instance(n: usize, parts: u32, seed: u64) -> PartitionedGraph {
    let g = generate_power_law(&GeneratorConfig::new(n, 4.0, seed)).unwrap();
    let (g, _) = eulerize(&g, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a: Vec<PartitionId> = (0..g.vertex_count()).map(|_| rng.gen_range(0..parts)).collect();
    // Keep every part non-empty.
    for p in 0..parts.min(g.vertex_count() as u32) {
        a[p as usize] = p;
    }
    PartitionedGraph::from_assignment(g, a).unwrap()
}

pub struct Solved {
    pub result: RunResult,
    pub walk: Vec<VertexId>,
    pub unroll: UnrollStats,
}

pub fn solve(pg: &PartitionedGraph, strategy: MergeStrategy, workers: usize) -> Solved {
    let meta = build_meta_graph(&pg.partitions).unwrap();
    let tree = generate_merge_tree(&meta).unwrap();
    let spill = MemorySpill::new();
    let result = run_to_root(pg, &tree, &RunConfig { strategy, workers }, &spill).unwrap();
    let (c, unroll) = unroll_to_vec(&spill, &result.root_entries).unwrap();
    Solved {
        result,
        walk: c.walk,
        unroll,
    }
}

/// Greedy matching written out independently: heaviest first, ties by pair.
pub fn reference_greedy(weights: &BTreeMap<(u32, u32), u64>) -> Vec<(u32, u32)> {
    let mut order: Vec<_> = weights.iter().filter(|(_, &w)| w > 0).collect();
    order.sort_by(|x, y| y.1.cmp(x.1).then(x.0.cmp(y.0)));
    let mut used = BTreeSet::new();
    let mut out = Vec::new();
    for (&(a, b), _) in order {
        if !used.contains(&a) && !used.contains(&b) {
            used.insert(a);
            used.insert(b);
            out.push((a, b));
        }
    }
    out
}

/// Best total weight of any matching, by exhaustive search.
pub fn brute_force_best(vertices: &[u32], weights: &BTreeMap<(u32, u32), u64>) -> u64 {
    fn go(rest: &[u32], weights: &BTreeMap<(u32, u32), u64>) -> u64 {
        let Some((&first, tail)) = rest.split_first() else { return 0 };
        let mut best = go(tail, weights);
        for (i, &other) in tail.iter().enumerate() {
            let w = weights.get(&(first.min(other), first.max(other))).copied().unwrap_or(0);
            let mut remaining = tail.to_vec();
            remaining.remove(i);
            best = best.max(w + go(&remaining, weights));
        }
        best
    }
    go(vertices, weights)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pick<T: Copy>(rng: &mut ChaCha8Rng, items: &[T]) -> T {
    items[rng.gen_range(0..items.len())]
}
