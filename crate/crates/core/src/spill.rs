//! Persistent storage for path and cycle walks.
//!
//! Each `(partition, level)` batch is one spill file made of length-prefixed
//! little-endian records:
//!
//! ```text
//! u32 payload_len
//! u64 path_id | u8 kind | u32 source | u32 sink (u32::MAX = none)
//! u32 n | n × u32 vertex | (n-1) × u64 edge_ref (0 = original edge, id+1 = path)
//! ```
//!
//! A sidecar `.idx` file lists `(path_id, byte_offset)` pairs so entries can
//! be fetched by id.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File};
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::partition::PartitionId;
use crate::path::{EdgeRef, PathEntry, PathHeader, PathId, PathKind, Walk};

const MAGIC: &[u8; 8] = b"ECSPILL1";

pub trait SpillStore: Sync {
    fn put(&self, partition: PartitionId, level: usize, entries: &[PathEntry]) -> Result<()>;

    fn get(&self, id: PathId) -> Result<PathEntry>;

    /// All stored ids, ascending.
    fn ids(&self) -> Vec<PathId>;

    /// Visits every stored entry in ascending id order.
    fn scan(&self, f: &mut dyn FnMut(&PathEntry) -> Result<()>) -> Result<()> {
        for id in self.ids() {
            f(&self.get(id)?)?;
        }
        Ok(())
    }
}

#[derive(Default)]
pub struct MemorySpill {
    entries: Mutex<BTreeMap<PathId, PathEntry>>,
}

impl MemorySpill {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl SpillStore for MemorySpill {
    fn put(&self, _partition: PartitionId, _level: usize, entries: &[PathEntry]) -> Result<()> {
        let mut map = self.entries.lock().unwrap();
        for e in entries {
            if map.insert(e.id(), e.clone()).is_some() {
                return Err(Error::Spill(format!("duplicate path id {}", e.id())));
            }
        }
        Ok(())
    }

    fn get(&self, id: PathId) -> Result<PathEntry> {
        self.entries
            .lock()
            .unwrap()
            .get(&id)
            .cloned()
            .ok_or_else(|| Error::Spill(format!("path {id} not found")))
    }

    fn ids(&self) -> Vec<PathId> {
        self.entries.lock().unwrap().keys().copied().collect()
    }

    fn scan(&self, f: &mut dyn FnMut(&PathEntry) -> Result<()>) -> Result<()> {
        self.entries.lock().unwrap().values().try_for_each(f)
    }
}

pub(crate) fn encode_entry(e: &PathEntry, out: &mut Vec<u8>) {
    let start = out.len();
    out.extend_from_slice(&[0; 4]);
    out.extend_from_slice(&e.header.id.0.to_le_bytes());
    out.push(e.header.kind.code());
    out.extend_from_slice(&e.header.source.to_le_bytes());
    out.extend_from_slice(&e.header.sink.unwrap_or(u32::MAX).to_le_bytes());
    out.extend_from_slice(&(e.walk.vertices.len() as u32).to_le_bytes());
    for v in &e.walk.vertices {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for r in &e.walk.via {
        out.extend_from_slice(&r.encode().to_le_bytes());
    }
    let len = (out.len() - start - 4) as u32;
    out[start..start + 4].copy_from_slice(&len.to_le_bytes());
}

struct Cursor<'a>(&'a [u8]);

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        if self.0.len() < N {
            return Err(Error::Spill("truncated record".into()));
        }
        let (head, rest) = self.0.split_at(N);
        self.0 = rest;
        Ok(head.try_into().unwrap())
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }
}

/// Decodes one record payload (without its length prefix).
pub(crate) fn decode_entry(payload: &[u8]) -> Result<PathEntry> {
    let mut c = Cursor(payload);
    let id = PathId(c.u64()?);
    let kind = PathKind::from_code(c.take::<1>()?[0])?;
    let source = c.u32()?;
    let sink = match c.u32()? {
        u32::MAX => None,
        s => Some(s),
    };
    let n = c.u32()? as usize;
    if n == 0 {
        return Err(Error::Spill(format!("entry {id} has an empty walk")));
    }
    let vertices = (0..n).map(|_| c.u32()).collect::<Result<Vec<_>>>()?;
    let via = (0..n - 1)
        .map(|_| c.u64().map(EdgeRef::decode))
        .collect::<Result<Vec<_>>>()?;
    if !c.0.is_empty() {
        return Err(Error::Spill(format!("trailing bytes in entry {id}")));
    }
    Ok(PathEntry {
        header: PathHeader {
            id,
            kind,
            source,
            sink,
        },
        walk: Walk { vertices, via },
    })
}

/// Spill files in a directory, one per `(partition, level)`.
pub struct DirSpill {
    dir: PathBuf,
    files: Mutex<Vec<PathBuf>>,
    index: Mutex<BTreeMap<PathId, (usize, u64)>>,
    handles: Mutex<HashMap<usize, File>>,
}

impl DirSpill {
    /// Creates the directory if needed; existing spill files are removed.
    pub fn create(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for entry in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let path = entry.map_err(|e| Error::io(&dir, e))?.path();
            if matches!(path.extension().and_then(|e| e.to_str()), Some("spill" | "idx")) {
                fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
            }
        }
        Ok(Self::empty(dir))
    }

    /// Opens a directory written earlier, loading every index sidecar.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        let spill = Self::empty(dir.clone());
        let mut idx_files: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(|e| Error::io(&dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("idx"))
            .collect();
        idx_files.sort();
        for idx in idx_files {
            let mut bytes = Vec::new();
            File::open(&idx)
                .and_then(|mut f| f.read_to_end(&mut bytes))
                .map_err(|e| Error::io(&idx, e))?;
            let data = idx.with_extension("spill");
            let file_no = {
                let mut files = spill.files.lock().unwrap();
                files.push(data);
                files.len() - 1
            };
            let mut c = Cursor(&bytes);
            let n = c.u64()?;
            let mut index = spill.index.lock().unwrap();
            for _ in 0..n {
                let (id, off) = (PathId(c.u64()?), c.u64()?);
                index.insert(id, (file_no, off));
            }
        }
        Ok(spill)
    }

    fn empty(dir: PathBuf) -> Self {
        DirSpill {
            dir,
            files: Mutex::default(),
            index: Mutex::default(),
            handles: Mutex::default(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn file_name(partition: PartitionId, level: usize) -> String {
        format!("p{partition:08}_l{level:03}.spill")
    }
}

impl SpillStore for DirSpill {
    fn put(&self, partition: PartitionId, level: usize, entries: &[PathEntry]) -> Result<()> {
        let path = self.dir.join(Self::file_name(partition, level));
        let mut buf = MAGIC.to_vec();
        let mut offsets = Vec::with_capacity(entries.len());
        for e in entries {
            offsets.push((e.id(), buf.len() as u64));
            encode_entry(e, &mut buf);
        }
        fs::write(&path, &buf).map_err(|e| Error::io(&path, e))?;

        let idx_path = path.with_extension("idx");
        let mut idx = BufWriter::new(File::create(&idx_path).map_err(|e| Error::io(&idx_path, e))?);
        let mut write_idx = || -> std::io::Result<()> {
            idx.write_all(&(offsets.len() as u64).to_le_bytes())?;
            for (id, off) in &offsets {
                idx.write_all(&id.0.to_le_bytes())?;
                idx.write_all(&off.to_le_bytes())?;
            }
            idx.flush()
        };
        write_idx().map_err(|e| Error::io(&idx_path, e))?;

        let file_no = {
            let mut files = self.files.lock().unwrap();
            files.push(path);
            files.len() - 1
        };
        let mut index = self.index.lock().unwrap();
        for (id, off) in offsets {
            if index.insert(id, (file_no, off)).is_some() {
                return Err(Error::Spill(format!("duplicate path id {id}")));
            }
        }
        Ok(())
    }

    fn get(&self, id: PathId) -> Result<PathEntry> {
        let (file_no, offset) = *self
            .index
            .lock()
            .unwrap()
            .get(&id)
            .ok_or_else(|| Error::Spill(format!("path {id} not found")))?;
        let path = self.files.lock().unwrap()[file_no].clone();
        let mut handles = self.handles.lock().unwrap();
        let file = match handles.entry(file_no) {
            std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
            std::collections::hash_map::Entry::Vacant(v) => {
                let mut f = File::open(&path).map_err(|e| Error::io(&path, e))?;
                let mut magic = [0u8; 8];
                f.read_exact(&mut magic).map_err(|e| Error::io(&path, e))?;
                if &magic != MAGIC {
                    return Err(Error::Spill(format!("{} is not a spill file", path.display())));
                }
                v.insert(f)
            }
        };
        let mut read = || -> std::io::Result<Vec<u8>> {
            file.seek(SeekFrom::Start(offset))?;
            let mut len = [0u8; 4];
            file.read_exact(&mut len)?;
            let mut payload = vec![0u8; u32::from_le_bytes(len) as usize];
            file.read_exact(&mut payload)?;
            Ok(payload)
        };
        let payload = read().map_err(|e| Error::io(&path, e))?;
        decode_entry(&payload)
    }

    fn ids(&self) -> Vec<PathId> {
        self.index.lock().unwrap().keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn entry(seq: u32, verts: Vec<u32>, kind: PathKind) -> PathEntry {
        let mut walk = Walk::from_vertices(verts);
        if walk.via.len() > 1 {
            walk.via[1] = EdgeRef::Path(PathId::new(0, 3, 7));
        }
        PathEntry {
            header: PathHeader {
                id: PathId::new(1, 2, seq),
                kind,
                source: walk.first(),
                sink: (kind == PathKind::ObPath).then(|| walk.last()),
            },
            walk,
        }
    }

    #[test]
    fn dir_spill_reopens() {
        let dir = tempfile::tempdir().unwrap();
        let a = entry(0, vec![1, 2, 3], PathKind::ObPath);
        let b = entry(1, vec![4], PathKind::Singleton);
        {
            let s = DirSpill::create(dir.path()).unwrap();
            s.put(2, 1, &[a.clone(), b.clone()]).unwrap();
            assert_eq!(s.get(b.id()).unwrap(), b);
        }
        let s = DirSpill::open(dir.path()).unwrap();
        assert_eq!(s.ids(), vec![a.id(), b.id()]);
        assert_eq!(s.get(a.id()).unwrap(), a);
        assert!(s.get(PathId(12345)).is_err());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let s = MemorySpill::new();
        let a = entry(0, vec![1, 2], PathKind::ObPath);
        s.put(2, 1, &[a.clone()]).unwrap();
        assert!(s.put(2, 1, &[a]).is_err());
    }

    proptest! {
        #[test]
        fn record_round_trip(verts in proptest::collection::vec(0u32..1000, 1..40), seq in 0u32..100) {
            let e = entry(seq, verts, PathKind::EbCycle);
            let mut buf = Vec::new();
            encode_entry(&e, &mut buf);
            prop_assert_eq!(decode_entry(&buf[4..]).unwrap(), e);
        }
    }
}
