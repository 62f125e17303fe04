//! Expands the coarse root cycles back into a circuit over original edges.
//!
//! Every path entry is referenced by exactly one coarse edge of a later
//! entry; following those references upward ends at a closed entry, its
//! *top*. The unroll walks one top and, whenever it stands on a vertex that
//! occurs anywhere inside a not yet consumed top, splices that whole top in
//! at that occurrence, rotated so it starts and ends there.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use serde::Serialize;

use crate::circuit::EulerCircuit;
use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::path::{EdgeRef, PathEntry, PathHeader, PathId};
use crate::spill::SpillStore;

/// Where vertices occur across all spilled entries, and how entries nest.
pub struct PivotIndex {
    occurrences: HashMap<VertexId, Vec<(PathId, u32)>>,
    /// Path entry -> (referencing entry, raw step index in it).
    parent: HashMap<PathId, (PathId, u32)>,
    tops: BTreeSet<PathId>,
    entry_count: usize,
}

impl PivotIndex {
    pub fn build(spill: &dyn SpillStore) -> Result<Self> {
        let mut idx = PivotIndex {
            occurrences: HashMap::new(),
            parent: HashMap::new(),
            tops: BTreeSet::new(),
            entry_count: 0,
        };
        let mut paths = Vec::new();
        spill.scan(&mut |e: &PathEntry| {
            idx.entry_count += 1;
            let id = e.id();
            let m = e.walk.edge_count();
            let last = if e.header.kind.is_closed() { m.max(1) } else { m + 1 };
            for (off, &v) in e.walk.vertices[..last].iter().enumerate() {
                idx.occurrences.entry(v).or_default().push((id, off as u32));
            }
            for (step, via) in e.walk.via.iter().enumerate() {
                if let EdgeRef::Path(child) = *via {
                    if idx.parent.insert(child, (id, step as u32)).is_some() {
                        return Err(Error::Structural(format!("path {child} is referenced twice")));
                    }
                }
            }
            if e.header.kind.is_closed() {
                idx.tops.insert(id);
            } else {
                paths.push(id);
            }
            Ok(())
        })?;
        let orphans: Vec<PathId> = paths.into_iter().filter(|p| !idx.parent.contains_key(p)).collect();
        if !orphans.is_empty() {
            return Err(Error::Coverage(orphans));
        }
        for list in idx.occurrences.values_mut() {
            list.sort_unstable();
        }
        Ok(idx)
    }

    pub fn occurrences(&self, v: VertexId) -> &[(PathId, u32)] {
        self.occurrences.get(&v).map_or(&[], Vec::as_slice)
    }

    /// Vertices lying on more than one entry.
    pub fn pivots(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.occurrences
            .iter()
            .filter(|(_, occ)| occ.windows(2).any(|w| w[0].0 != w[1].0))
            .map(|(&v, _)| v)
    }

    pub fn entry_count(&self) -> usize {
        self.entry_count
    }

    pub fn top_count(&self) -> usize {
        self.tops.len()
    }

    fn parent(&self, id: PathId) -> Option<(PathId, u32)> {
        self.parent.get(&id).copied()
    }

    fn top_of(&self, mut id: PathId, memo: &mut HashMap<PathId, PathId>) -> PathId {
        let mut chain = Vec::new();
        let top = loop {
            if let Some(&t) = memo.get(&id) {
                break t;
            }
            match self.parent(id) {
                Some((p, _)) => {
                    chain.push(id);
                    id = p;
                }
                None => break id,
            }
        };
        for c in chain {
            memo.insert(c, top);
        }
        top
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnrollStats {
    pub edges: usize,
    pub entries: usize,
    pub tops: usize,
    /// Closed entries emitted, the opening one included.
    pub splices: usize,
    pub max_depth: usize,
    /// Largest number of entry values (vertices plus edge refs) loaded at once.
    pub loaded_high_water: usize,
    pub max_entry_values: usize,
}

struct Frame {
    entry: Rc<PathEntry>,
    fwd: bool,
    pos: usize,
    end: usize,
}

impl Frame {
    fn new(entry: Rc<PathEntry>, fwd: bool, pos: usize, end: usize) -> Self {
        Frame { entry, fwd, pos, end }
    }
}

fn values(e: &PathEntry) -> usize {
    e.walk.vertices.len() + e.walk.via.len()
}

fn vertex_at(e: &PathEntry, fwd: bool, i: usize) -> VertexId {
    let m = e.walk.edge_count();
    e.walk.vertices[if fwd { i } else { m - i }]
}

fn step_at(e: &PathEntry, fwd: bool, i: usize) -> EdgeRef {
    let m = e.walk.edge_count();
    e.walk.via[if fwd { i } else { m - 1 - i }]
}

/// Entries currently held by frames, reference counted.
struct Loader<'a> {
    spill: &'a dyn SpillStore,
    held: HashMap<PathId, (Rc<PathEntry>, usize)>,
    values: usize,
    stats: UnrollStats,
}

impl Loader<'_> {
    fn acquire(&mut self, id: PathId) -> Result<Rc<PathEntry>> {
        if let Some((e, n)) = self.held.get_mut(&id) {
            *n += 1;
            return Ok(e.clone());
        }
        let e = Rc::new(self.spill.get(id)?);
        let v = values(&e);
        self.values += v;
        self.stats.max_entry_values = self.stats.max_entry_values.max(v);
        self.stats.loaded_high_water = self.stats.loaded_high_water.max(self.values);
        self.held.insert(id, (e.clone(), 1));
        Ok(e)
    }

    fn release(&mut self, id: PathId) {
        let (e, n) = self.held.get_mut(&id).expect("released entry is held");
        *n -= 1;
        if *n == 0 {
            self.values -= values(e);
            self.held.remove(&id);
        }
    }
}

/// Streams the circuit vertex by vertex into `sink`.
pub fn unroll(
    spill: &dyn SpillStore,
    root_entries: &[PathHeader],
    sink: &mut dyn FnMut(VertexId) -> Result<()>,
) -> Result<UnrollStats> {
    let index = PivotIndex::build(spill)?;
    let mut loader = Loader {
        spill,
        held: HashMap::new(),
        values: 0,
        stats: UnrollStats {
            entries: index.entry_count(),
            tops: index.top_count(),
            ..Default::default()
        },
    };

    // The root's first entry starts on its smallest vertex when it comes out
    // of Phase 1; starting there keeps a lone root cycle unrotated.
    let Some(start) = root_entries.iter().min_by_key(|h| h.id).map(|h| h.source) else {
        return if index.top_count() == 0 {
            Ok(loader.stats)
        } else {
            Err(Error::Coverage(index.tops.iter().copied().collect()))
        };
    };

    let mut memo = HashMap::new();
    let mut consumed: BTreeSet<PathId> = BTreeSet::new();
    let mut cursor: HashMap<VertexId, usize> = HashMap::new();
    let mut frames: Vec<Frame> = Vec::new();
    let mut cur = start;
    sink(cur)?;
    loop {
        // Splice the first unconsumed top that passes through `cur`.
        let occ = index.occurrences(cur);
        let c = cursor.entry(cur).or_insert(0);
        let mut hit = None;
        while *c < occ.len() {
            let (id, off) = occ[*c];
            let top = index.top_of(id, &mut memo);
            if consumed.contains(&top) {
                *c += 1;
                continue;
            }
            consumed.insert(top);
            hit = Some((id, off as usize));
            break;
        }
        if let Some((id, off)) = hit {
            splice(&index, &mut loader, &mut frames, id, off)?;
            loader.stats.splices += 1;
            loader.stats.max_depth = loader.stats.max_depth.max(frames.len());
            continue;
        }

        let Some(top) = frames.last_mut() else { break };
        if top.pos == top.end {
            let id = top.entry.id();
            frames.pop();
            loader.release(id);
            continue;
        }
        let (entry, efwd, pos) = (top.entry.clone(), top.fwd, top.pos);
        top.pos += 1;
        match step_at(&entry, efwd, pos) {
            EdgeRef::Real => {
                cur = vertex_at(&entry, efwd, pos + 1);
                loader.stats.edges += 1;
                sink(cur)?;
            }
            EdgeRef::Path(child) => {
                let e = loader.acquire(child)?;
                let fwd = e.walk.first() == cur;
                let (near, far) = if fwd {
                    (e.walk.first(), e.walk.last())
                } else {
                    (e.walk.last(), e.walk.first())
                };
                if near != cur || far != vertex_at(&entry, efwd, pos + 1) {
                    return Err(Error::Structural(format!(
                        "path {child} does not join {cur} to the next vertex of {}",
                        entry.id()
                    )));
                }
                let m = e.walk.edge_count();
                frames.push(Frame::new(e, fwd, 0, m));
                loader.stats.max_depth = loader.stats.max_depth.max(frames.len());
            }
        }
    }
    if cur != start {
        return Err(Error::Structural(format!(
            "unrolled walk ends at {cur}, not at its start {start}"
        )));
    }
    let left: Vec<PathId> = index.tops.difference(&consumed).copied().collect();
    if !left.is_empty() {
        return Err(Error::Coverage(left));
    }
    Ok(loader.stats)
}

/// Pushes frames that emit the top containing occurrence `(id, off)` as a
/// closed walk starting and ending at that occurrence.
fn splice(
    index: &PivotIndex,
    loader: &mut Loader<'_>,
    frames: &mut Vec<Frame>,
    id: PathId,
    off: usize,
) -> Result<()> {
    // chain[0] is the top, chain[k] holds the occurrence; steps[i] is the raw
    // step of chain[i] that stands for chain[i + 1].
    let mut chain = vec![id];
    let mut steps = Vec::new();
    while let Some((p, s)) = index.parent(*chain.last().unwrap()) {
        chain.push(p);
        steps.push(s as usize);
    }
    chain.reverse();
    steps.reverse();
    let entries = chain
        .iter()
        .map(|&c| loader.acquire(c))
        .collect::<Result<Vec<_>>>()?;

    let k = chain.len() - 1;
    let mut fwd = vec![true; k + 1];
    let mut s = vec![0usize; k];
    for i in 0..k {
        let m = entries[i].walk.edge_count();
        s[i] = if fwd[i] { steps[i] } else { m - 1 - steps[i] };
        fwd[i + 1] = entries[i + 1].walk.first() == vertex_at(&entries[i], fwd[i], s[i]);
    }
    let mk = entries[k].walk.edge_count();
    let p = if fwd[k] { off } else { mk - off };

    let mut segs: Vec<(usize, usize, usize)> = Vec::with_capacity(2 * k + 2);
    segs.push((k, p, mk));
    for i in (0..k).rev() {
        segs.push((i, s[i] + 1, entries[i].walk.edge_count()));
    }
    for i in 0..k {
        segs.push((i, 0, s[i]));
    }
    segs.push((k, 0, p));
    // Each entry was acquired once above; every further frame takes a share.
    let mut first_use = vec![true; k + 1];
    for &(i, from, to) in segs.iter().rev() {
        let e = if std::mem::take(&mut first_use[i]) {
            entries[i].clone()
        } else {
            loader.acquire(chain[i])?
        };
        frames.push(Frame::new(e, fwd[i], from, to));
    }
    Ok(())
}

/// Collects the whole circuit in memory.
pub fn unroll_to_vec(
    spill: &dyn SpillStore,
    root_entries: &[PathHeader],
) -> Result<(EulerCircuit, UnrollStats)> {
    let mut walk = Vec::new();
    let stats = unroll(spill, root_entries, &mut |v| {
        walk.push(v);
        Ok(())
    })?;
    Ok((EulerCircuit { walk }, stats))
}
