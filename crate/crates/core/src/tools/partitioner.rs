use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::partition::PartitionId;

const UNASSIGNED: PartitionId = PartitionId::MAX;

/// Multi-source BFS growth balancing vertex counts.
///
/// `parts` seeds are drawn from the edge-bearing vertices; the smallest part
/// always grows next. A part whose frontier runs dry claims the lowest
/// unassigned vertex. Isolated vertices are handed to the smallest part last.
/// Returns the partition id (`0..parts`) of every vertex.
pub fn partition_graph(graph: &Graph, parts: usize, seed: u64) -> Result<Vec<PartitionId>> {
    let n = graph.vertex_count();
    if parts == 0 || parts > n {
        return Err(Error::InvalidConfig(format!(
            "cannot split {n} vertices into {parts} parts"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bearing: Vec<VertexId> = graph.vertices().filter(|&v| graph.degree(v) > 0).collect();
    let pool: Vec<VertexId> = if bearing.len() >= parts {
        bearing.clone()
    } else {
        graph.vertices().collect()
    };
    let mut seeds: Vec<VertexId> = sample(&mut rng, pool.len(), parts)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    seeds.sort_unstable();

    let mut assignment = vec![UNASSIGNED; n];
    let mut frontier: Vec<VecDeque<VertexId>> = seeds.iter().map(|&s| VecDeque::from([s])).collect();
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..parts).map(|p| Reverse((0, p))).collect();
    let mut remaining = bearing.len() + seeds.iter().filter(|&&s| graph.degree(s) == 0).count();
    let mut lowest = 0usize;
    while remaining > 0 {
        let Reverse((size, p)) = heap.pop().unwrap();
        let mut next = None;
        while let Some(v) = frontier[p].pop_front() {
            if assignment[v as usize] == UNASSIGNED {
                next = Some(v);
                break;
            }
        }
        let v = match next {
            Some(v) => v,
            None => {
                while lowest < bearing.len() && assignment[bearing[lowest] as usize] != UNASSIGNED {
                    lowest += 1;
                }
                match bearing.get(lowest) {
                    Some(&v) => v,
                    // Only unassigned seeds of isolated vertices are left.
                    None => match seeds.iter().find(|&&s| assignment[s as usize] == UNASSIGNED) {
                        Some(&s) => s,
                        None => break,
                    },
                }
            }
        };
        assignment[v as usize] = p as PartitionId;
        remaining -= 1;
        frontier[p].extend(graph.neighbors(v).iter().copied());
        heap.push(Reverse((size + 1, p)));
    }
    for v in 0..n {
        if assignment[v] == UNASSIGNED {
            let Reverse((size, p)) = heap.pop().unwrap();
            assignment[v] = p as PartitionId;
            heap.push(Reverse((size + 1, p)));
        }
    }
    Ok(assignment)
}
