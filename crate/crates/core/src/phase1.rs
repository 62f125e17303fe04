//! Local paths and cycles inside one partition.
//!
//! Traversals first start at odd boundary vertices until none has an odd
//! number of unvisited local edges, then once at every even boundary vertex.
//! Whatever edges remain form closed walks; each is spliced into the entry it
//! is discovered from, so every remaining cycle begins on a vertex of an
//! already recorded entry. Edges left over after that belong to components
//! without any recorded entry and become standalone [`PathKind::Cycle`]s.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::partition::{classify_vertices, Partition, VertexClass};
use crate::path::{BoundaryVertex, EdgeRef, PathEntry, PathHeader, PathId, PathKind, PathMap, Walk};

/// Visit marks and adjacency cursors for one Phase 1 run.
///
/// Each undirected local edge is an arc in both endpoint lists; consuming
/// either arc marks the edge, so both directions are spent together.
pub struct TraversalState {
    adj_offsets: Vec<usize>,
    adj: Vec<(VertexId, u32)>,
    cursor: Vec<usize>,
    remaining: Vec<u32>,
    edge_visited: Vec<bool>,
    vertex_visited: Vec<bool>,
    arc_advances: u64,
}

impl TraversalState {
    pub fn new(partition: &Partition) -> Self {
        let n = partition.vertices.len();
        let mut degree = vec![0usize; n];
        let ends: Vec<(usize, usize)> = partition
            .edges
            .iter()
            .map(|e| {
                let (i, j) = (
                    partition.index_of(e.u).expect("edge endpoint in partition"),
                    partition.index_of(e.v).expect("edge endpoint in partition"),
                );
                degree[i] += 1;
                degree[j] += 1;
                (i, j)
            })
            .collect();
        let mut adj_offsets = Vec::with_capacity(n + 1);
        adj_offsets.push(0);
        for d in &degree {
            adj_offsets.push(adj_offsets.last().unwrap() + d);
        }
        let mut fill = adj_offsets[..n].to_vec();
        let mut adj = vec![(0, 0); adj_offsets[n]];
        for (e, &(i, j)) in ends.iter().enumerate() {
            adj[fill[i]] = (partition.vertices[j], e as u32);
            fill[i] += 1;
            adj[fill[j]] = (partition.vertices[i], e as u32);
            fill[j] += 1;
        }
        // Lowest neighbor first; parallel edges in edge-list order.
        for v in 0..n {
            adj[adj_offsets[v]..adj_offsets[v + 1]].sort_unstable();
        }
        TraversalState {
            cursor: adj_offsets[..n].to_vec(),
            remaining: degree.iter().map(|&d| d as u32).collect(),
            adj_offsets,
            adj,
            edge_visited: vec![false; partition.edges.len()],
            vertex_visited: vec![false; n],
            arc_advances: 0,
        }
    }

    /// Unvisited local edges at the vertex with local index `i`.
    pub fn remaining(&self, i: usize) -> u32 {
        self.remaining[i]
    }

    pub fn visited_edges(&self) -> usize {
        self.edge_visited.iter().filter(|&&b| b).count()
    }

    pub fn is_vertex_visited(&self, i: usize) -> bool {
        self.vertex_visited[i]
    }

    /// Cursor increments plus traversal starts.
    pub fn arc_advances(&self) -> u64 {
        self.arc_advances
    }
}

/// Greedy maximal walk over unvisited local edges from `start`.
///
/// From an odd boundary vertex the walk ends at another odd vertex; from any
/// vertex with an even unvisited degree it returns to `start`. A start with
/// no unvisited edges yields the singleton walk.
pub fn find_euler_path(
    partition: &Partition,
    state: &mut TraversalState,
    start: VertexId,
) -> Result<Walk> {
    let mut cur = partition.index_of(start).ok_or(Error::UnknownVertex {
        partition: partition.id,
        vertex: start,
    })?;
    state.arc_advances += 1;
    state.vertex_visited[cur] = true;
    let mut walk = Walk::singleton(start);
    loop {
        let end = state.adj_offsets[cur + 1];
        let mut next = None;
        while state.cursor[cur] < end {
            let (nbr, e) = state.adj[state.cursor[cur]];
            state.cursor[cur] += 1;
            state.arc_advances += 1;
            if !state.edge_visited[e as usize] {
                next = Some((nbr, e));
                break;
            }
        }
        let Some((nbr, e)) = next else { break };
        state.edge_visited[e as usize] = true;
        let j = partition.index_of(nbr).expect("neighbor in partition");
        state.remaining[cur] -= 1;
        state.remaining[j] -= 1;
        state.vertex_visited[j] = true;
        walk.vertices.push(nbr);
        walk.via.push(partition.edges[e as usize].via);
        cur = j;
    }
    Ok(walk)
}

/// Where an internal cycle was spliced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MergeEvent {
    pub host: PathId,
    pub position: usize,
    pub pivot: VertexId,
}

/// Splices a closed walk into the entry with the smallest id that shares a
/// vertex with it, at that entry's first shared vertex.
pub fn merge_into(entries: &mut [PathEntry], cycle: &Walk) -> Result<MergeEvent> {
    if !cycle.is_closed() {
        return Err(Error::Structural("cannot merge an open walk".into()));
    }
    let members: std::collections::HashMap<VertexId, usize> = cycle
        .vertices
        .iter()
        .enumerate()
        .rev()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by_key(|&i| entries[i].id());
    for i in order {
        let host = &mut entries[i];
        let hit = host
            .walk
            .vertices
            .iter()
            .enumerate()
            .find_map(|(pos, v)| members.get(v).map(|&at| (pos, at)));
        if let Some((pos, at)) = hit {
            let pivot = host.walk.vertices[pos];
            host.walk.splice(pos, &cycle.rotated(at));
            return Ok(MergeEvent {
                host: host.id(),
                position: pos,
                pivot,
            });
        }
    }
    Err(Error::NoIntersection)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Phase1Stats {
    pub internal_vertices: usize,
    pub boundary_vertices: usize,
    pub odd_boundary: usize,
    pub even_boundary: usize,
    pub local_edges: usize,
    pub ob_paths: usize,
    pub eb_cycles: usize,
    pub singletons: usize,
    /// Closed walks spliced into an existing entry.
    pub merged_cycles: usize,
    pub standalone_cycles: usize,
    pub arc_advances: u64,
}

impl Phase1Stats {
    /// `|B| + |I| + |L|` for the partition.
    pub fn size_bound(&self) -> u64 {
        (self.boundary_vertices + self.internal_vertices + self.local_edges) as u64
    }
}

#[derive(Clone, Debug)]
pub struct Phase1Output {
    pub path_map: PathMap,
    pub entries: Vec<PathEntry>,
    pub stats: Phase1Stats,
}

struct Builder<'a> {
    partition: &'a Partition,
    state: TraversalState,
    stats: Phase1Stats,
}

impl Builder<'_> {
    fn closed_walk(&mut self, start: VertexId) -> Result<Walk> {
        let w = find_euler_path(self.partition, &mut self.state, start)?;
        if !w.is_closed() {
            return Err(Error::Structural(format!(
                "walk from {start} in partition {} did not close (ended at {})",
                self.partition.id,
                w.last()
            )));
        }
        Ok(w)
    }

    /// Re-emits `walk`, splicing in a closed walk wherever the emission
    /// stands on a vertex that still has unvisited edges.
    fn expand(&mut self, walk: Walk) -> Result<Walk> {
        let mut out = Walk::singleton(walk.first());
        let mut cur = walk.first();
        let mut stack = vec![(walk, 0usize)];
        loop {
            let i = self.partition.index_of(cur).expect("walk vertex in partition");
            if self.state.remaining[i] > 0 {
                let c = self.closed_walk(cur)?;
                self.stats.merged_cycles += 1;
                stack.push((c, 0));
                continue;
            }
            let Some((top, pos)) = stack.last_mut() else { break };
            if *pos == top.via.len() {
                stack.pop();
                continue;
            }
            let (to, via) = (top.vertices[*pos + 1], top.via[*pos]);
            *pos += 1;
            out.vertices.push(to);
            out.via.push(via);
            cur = to;
        }
        Ok(out)
    }
}

/// Runs Phase 1 on one partition.
pub fn do_phase1(partition: &Partition) -> Result<Phase1Output> {
    let classes = classify_vertices(partition)?;
    let mut b = Builder {
        partition,
        state: TraversalState::new(partition),
        stats: Phase1Stats {
            local_edges: partition.edges.len(),
            ..Default::default()
        },
    };
    for c in classes.values() {
        match c {
            VertexClass::Internal => b.stats.internal_vertices += 1,
            VertexClass::OddBoundary => b.stats.odd_boundary += 1,
            VertexClass::EvenBoundary => b.stats.even_boundary += 1,
        }
    }
    b.stats.boundary_vertices = b.stats.odd_boundary + b.stats.even_boundary;

    let mut raw: Vec<(PathKind, Walk)> = Vec::new();
    for (&v, &class) in &classes {
        let i = partition.index_of(v).unwrap();
        if class != VertexClass::OddBoundary || b.state.remaining[i] % 2 == 0 {
            continue;
        }
        let w = find_euler_path(partition, &mut b.state, v)?;
        let end = w.last();
        if end == v || classes.get(&end) != Some(&VertexClass::OddBoundary) {
            return Err(Error::Structural(format!(
                "path from odd boundary vertex {v} ended at {end}"
            )));
        }
        raw.push((PathKind::ObPath, w));
    }
    for (&v, &class) in &classes {
        if class != VertexClass::EvenBoundary {
            continue;
        }
        let w = b.closed_walk(v)?;
        let kind = if w.edge_count() == 0 {
            PathKind::Singleton
        } else {
            PathKind::EbCycle
        };
        raw.push((kind, w));
    }

    let mut entries = Vec::with_capacity(raw.len());
    let mut next_id = 0u32;
    let mut push = |entries: &mut Vec<PathEntry>, kind: PathKind, walk: Walk| {
        let id = PathId::new(partition.level, partition.id, next_id);
        next_id += 1;
        let sink = (kind == PathKind::ObPath).then(|| walk.last());
        entries.push(PathEntry {
            header: PathHeader {
                id,
                kind,
                source: walk.first(),
                sink,
            },
            walk,
        });
    };
    for (kind, walk) in raw {
        match kind {
            PathKind::ObPath => b.stats.ob_paths += 1,
            PathKind::EbCycle => b.stats.eb_cycles += 1,
            _ => b.stats.singletons += 1,
        }
        let walk = b.expand(walk)?;
        push(&mut entries, kind, walk);
    }
    for (i, &v) in partition.vertices.iter().enumerate() {
        if b.state.remaining[i] == 0 {
            continue;
        }
        let c = b.closed_walk(v)?;
        let walk = b.expand(c)?;
        b.stats.standalone_cycles += 1;
        push(&mut entries, PathKind::Cycle, walk);
    }
    debug_assert_eq!(b.state.visited_edges(), partition.edges.len());
    b.stats.arc_advances = b.state.arc_advances;

    let boundary = partition
        .vertices
        .iter()
        .zip(&partition.remote_degree)
        .filter(|(_, &d)| d > 0)
        .map(|(&vertex, &remote_degree)| BoundaryVertex {
            vertex,
            remote_degree,
        })
        .collect();
    let path_map = PathMap {
        partition: partition.id,
        level: partition.level,
        entries: entries.iter().map(|e| e.header).collect(),
        boundary,
        remote: partition.remote.clone(),
    };
    Ok(Phase1Output {
        path_map,
        entries,
        stats: b.stats,
    })
}

/// Local edges of a walk, as `(min, max, via)` triples.
pub fn walk_edges(walk: &Walk) -> impl Iterator<Item = (VertexId, VertexId, EdgeRef)> + '_ {
    walk.vertices
        .windows(2)
        .zip(&walk.via)
        .map(|(w, &via)| (w[0].min(w[1]), w[0].max(w[1]), via))
}
