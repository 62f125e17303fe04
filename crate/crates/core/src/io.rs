//! Edge-list, partition-file and circuit file formats.
//!
//! Edge lists hold one undirected edge per line as two whitespace-separated
//! vertex ids; blank lines and lines starting with `#` are skipped. Vertex
//! ids are compacted to a dense `0..n` range in ascending order of the
//! original ids, which are kept for reporting.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::partition::PartitionId;

/// A graph plus the original ids of its compacted vertices.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub original_ids: Vec<u64>,
}

impl LoadedGraph {
    /// Wraps a graph whose vertex ids are already the original ids.
    pub fn identity(graph: Graph) -> Self {
        let original_ids = (0..graph.vertex_count() as u64).collect();
        Self {
            graph,
            original_ids,
        }
    }

    pub fn original(&self, v: VertexId) -> u64 {
        self.original_ids[v as usize]
    }

    pub fn compact(&self, original: u64) -> Option<VertexId> {
        self.original_ids
            .binary_search(&original)
            .ok()
            .map(|i| i as VertexId)
    }
}

/// Parses an edge list.
///
/// A line `u v` and a line `v u` name the same edge. The multiplicity of an
/// edge is the larger of its two per-direction line counts, so a file that
/// lists every edge in both directions loads as a simple graph while a
/// repeated `u v` line yields a parallel edge.
pub fn parse_edge_list(reader: impl BufRead, origin: &Path) -> Result<LoadedGraph> {
    let mut directed: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let mut next = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message: "expected two vertex ids".into(),
            })?;
            tok.parse().map_err(|_| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message: format!("invalid vertex id {tok:?}"),
            })
        };
        let (u, v) = (next()?, next()?);
        if u == v {
            return Err(Error::SelfLoop { vertex: u });
        }
        *directed.entry((u, v)).or_default() += 1;
    }

    let mut undirected: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    for (&(u, v), &c) in &directed {
        let key = (u.min(v), u.max(v));
        let slot = undirected.entry(key).or_default();
        *slot = (*slot).max(c);
    }
    let mut ids: Vec<u64> = undirected.keys().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() > VertexId::MAX as usize {
        return Err(Error::InvalidConfig("too many vertices".into()));
    }
    let index: HashMap<u64, VertexId> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i as VertexId))
        .collect();
    let mut edges = Vec::new();
    for (&(u, v), &m) in &undirected {
        for _ in 0..m {
            edges.push((index[&u], index[&v]));
        }
    }
    let graph = Graph::from_edges(ids.len(), &edges)?;
    Ok(LoadedGraph {
        graph,
        original_ids: ids,
    })
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), path)
}

pub fn write_edge_list_to(mut out: impl Write, graph: &LoadedGraph) -> std::io::Result<()> {
    writeln!(
        out,
        "# {} vertices, {} undirected edges",
        graph.graph.vertex_count(),
        graph.graph.edge_count()
    )?;
    for (u, v) in graph.graph.edges() {
        writeln!(out, "{} {}", graph.original(u), graph.original(v))?;
    }
    Ok(())
}

pub fn write_edge_list(path: impl AsRef<Path>, graph: &LoadedGraph) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_edge_list_to(&mut out, graph)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads a partition file: line `k` holds the partition id of vertex `k`.
pub fn read_partition_file(path: impl AsRef<Path>) -> Result<Vec<PartitionId>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut parts = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        parts.push(line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("invalid partition id {line:?}"),
        })?);
    }
    Ok(parts)
}

pub fn write_partition_file(path: impl AsRef<Path>, assignment: &[PartitionId]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    assignment
        .iter()
        .try_for_each(|p| writeln!(out, "{p}"))
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CircuitFormat {
    /// One vertex id per line.
    #[default]
    Text,
    /// Little-endian `u64` count followed by that many `u64` vertex ids.
    Binary,
}

/// Streaming circuit writer over original vertex ids.
///
/// Binary output reserves the length prefix up front and patches it in
/// [`CircuitWriter::finish`].
pub struct CircuitWriter<W: Write + Seek> {
    out: W,
    format: CircuitFormat,
    count: u64,
    started: bool,
    origin: u64,
}

impl<W: Write + Seek> CircuitWriter<W> {
    pub fn new(out: W, format: CircuitFormat) -> Self {
        Self {
            out,
            format,
            count: 0,
            started: false,
            origin: 0,
        }
    }

    fn start(&mut self) -> std::io::Result<()> {
        if !self.started && self.format == CircuitFormat::Binary {
            self.origin = self.out.stream_position()?;
            self.out.write_all(&0u64.to_le_bytes())?;
        }
        self.started = true;
        Ok(())
    }

    pub fn push(&mut self, vertex: u64) -> std::io::Result<()> {
        self.start()?;
        self.count += 1;
        match self.format {
            CircuitFormat::Text => writeln!(self.out, "{vertex}"),
            CircuitFormat::Binary => self.out.write_all(&vertex.to_le_bytes()),
        }
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.start()?;
        if self.format == CircuitFormat::Binary {
            let end = self.out.stream_position()?;
            self.out.seek(SeekFrom::Start(self.origin))?;
            self.out.write_all(&self.count.to_le_bytes())?;
            self.out.seek(SeekFrom::Start(end))?;
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

pub fn write_circuit(path: impl AsRef<Path>, walk: &[u64], format: CircuitFormat) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = CircuitWriter::new(BufWriter::new(file), format);
    walk.iter()
        .try_for_each(|&v| w.push(v))
        .and_then(|_| w.finish().map(|_| ()))
        .map_err(|e| Error::io(path, e))
}

pub fn read_circuit(path: impl AsRef<Path>, format: CircuitFormat) -> Result<Vec<u64>> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: &str| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    };
    match format {
        CircuitFormat::Text => {
            let text = String::from_utf8(bytes).map_err(|_| parse_err(0, "not UTF-8"))?;
            text.lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
                .map(|(i, l)| {
                    l.trim()
                        .parse()
                        .map_err(|_| parse_err(i + 1, "invalid vertex id"))
                })
                .collect()
        }
        CircuitFormat::Binary => {
            if bytes.len() < 8 {
                return Err(parse_err(0, "missing length prefix"));
            }
            let n = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
            if bytes.len() != 8 + 8 * n {
                return Err(parse_err(0, "length prefix does not match payload"));
            }
            Ok(bytes[8..]
                .chunks_exact(8)
                .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> LoadedGraph {
        parse_edge_list(text.as_bytes(), Path::new("<mem>")).unwrap()
    }

    #[test]
    fn ids_are_compacted_in_order() {
        let g = parse("# comment\n10 30\n30 20\n\n20 10\n");
        assert_eq!(g.original_ids, vec![10, 20, 30]);
        assert_eq!(g.graph.edge_count(), 3);
        assert_eq!(g.compact(30), Some(2));
    }

    #[test]
    fn mirrored_lines_collapse_repeats_do_not() {
        let g = parse("1 2\n2 1\n2 3\n3 2\n3 1\n1 3\n");
        assert_eq!(g.graph.edge_count(), 3);
        let g = parse("1 2\n1 2\n");
        assert_eq!(g.graph.multiplicity(0, 1), 2);
    }

    #[test]
    fn malformed_lines_are_errors() {
        assert!(matches!(
            parse_edge_list("1 x\n".as_bytes(), Path::new("f")),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("4 4\n".as_bytes(), Path::new("f")),
            Err(Error::SelfLoop { vertex: 4 })
        ));
    }

    #[test]
    fn circuit_binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.bin");
        write_circuit(&p, &[5, 6, 7, 5], CircuitFormat::Binary).unwrap();
        assert_eq!(read_circuit(&p, CircuitFormat::Binary).unwrap(), vec![5, 6, 7, 5]);
        let p = dir.path().join("c.txt");
        write_circuit(&p, &[5, 6, 7, 5], CircuitFormat::Text).unwrap();
        assert_eq!(read_circuit(&p, CircuitFormat::Text).unwrap(), vec![5, 6, 7, 5]);
    }
}
