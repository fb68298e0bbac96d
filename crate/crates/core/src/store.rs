//! Binary index files.
//!
//! All integers are little-endian.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "HC2L"
//! 4       2     format version (1)
//! 6       2     flags: bit 0 tail pruning, bit 1 contraction,
//!               bit 2 64-bit distances (reserved, rejected)
//! 8       4     beta numerator
//! 12      4     beta denominator
//! 16      8     graph fingerprint
//! 24      8     original vertex count
//! 32      4     section count
//! 36      4     reserved (0)
//! 40      24*k  section table: kind u32, reserved u32, offset u64, length u64
//! ```
//!
//! Sections, in this order:
//!
//! * 1 hierarchy: node count u64, then per node in preorder the packed
//!   node id u64, cut length u32 and the cut vertices u32 in rank order.
//! * 2 vertex map: core vertex count u64, then per core vertex its node id
//!   u64 and position in that node's cut u32.
//! * 3 labels: core vertex count u64, then per core vertex the level count
//!   u32 and per level the length u32 followed by that many u32 distances
//!   (`u32::MAX` for unreachable).
//! * 4 contraction: empty when nothing was peeled; otherwise the core count
//!   u64, the original id of each core vertex u32, the record count u64 and
//!   per record vertex, root, parent, depth (u32 each), distance to parent
//!   and distance to root (u64 each).
//!
//! Graph cache files use the same header with flags 0, beta 0/0 and a
//! single section of kind 5: vertex count u64, edge count u64, then each
//! edge `u < v` as u32 `u`, `v`, weight.

use std::fs::File;
use std::io::{self, BufWriter, Cursor, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use thiserror::Error;

use crate::balance::Beta;
use crate::contraction::{ContractionMap, ContractionRecord};
use crate::graph::{Graph, Vertex};
use crate::hierarchy::{Hierarchy, NodeId};
use crate::index::{DistanceIndex, QueryError};
use crate::label::LabelStore;

pub const MAGIC: [u8; 4] = *b"HC2L";
pub const VERSION: u16 = 1;

const FLAG_TAIL_PRUNING: u16 = 1;
const FLAG_CONTRACTION: u16 = 2;
const FLAG_WIDE_DISTANCES: u16 = 4;

const SECTION_HIERARCHY: u32 = 1;
const SECTION_VERTEX_MAP: u32 = 2;
const SECTION_LABELS: u32 = 3;
const SECTION_CONTRACTION: u32 = 4;
const SECTION_GRAPH: u32 = 5;

const HEADER_LEN: usize = 40;
const SECTION_ENTRY_LEN: usize = 24;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unsupported index format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt index: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Stale(#[from] QueryError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn corrupt(m: impl Into<String>) -> StoreError {
    StoreError::Corrupt(m.into())
}

struct Header {
    flags: u16,
    beta: (u32, u32),
    fingerprint: u64,
    vertex_count: u64,
}

fn write_file<W: Write>(out: W, header: &Header, sections: &[(u32, Vec<u8>)]) -> io::Result<u64> {
    let mut out = BufWriter::new(out);
    out.write_all(&MAGIC)?;
    out.write_u16::<LE>(VERSION)?;
    out.write_u16::<LE>(header.flags)?;
    out.write_u32::<LE>(header.beta.0)?;
    out.write_u32::<LE>(header.beta.1)?;
    out.write_u64::<LE>(header.fingerprint)?;
    out.write_u64::<LE>(header.vertex_count)?;
    out.write_u32::<LE>(sections.len() as u32)?;
    out.write_u32::<LE>(0)?;
    let mut offset = (HEADER_LEN + SECTION_ENTRY_LEN * sections.len()) as u64;
    for (kind, body) in sections {
        out.write_u32::<LE>(*kind)?;
        out.write_u32::<LE>(0)?;
        out.write_u64::<LE>(offset)?;
        out.write_u64::<LE>(body.len() as u64)?;
        offset += body.len() as u64;
    }
    for (_, body) in sections {
        out.write_all(body)?;
    }
    out.flush()?;
    Ok(offset)
}

fn read_file(bytes: &[u8]) -> Result<(Header, Vec<(u32, &[u8])>), StoreError> {
    if bytes.len() < 8 || bytes[..4] != MAGIC {
        return Err(StoreError::UnsupportedFormat("bad magic".into()));
    }
    let mut c = Cursor::new(bytes);
    c.set_position(4);
    let version = c.read_u16::<LE>()?;
    if version != VERSION {
        return Err(StoreError::UnsupportedFormat(format!("version {version}")));
    }
    let short = |_| corrupt("truncated header");
    let flags = c.read_u16::<LE>().map_err(short)?;
    if flags & FLAG_WIDE_DISTANCES != 0 || flags & !(FLAG_TAIL_PRUNING | FLAG_CONTRACTION) != 0 {
        return Err(StoreError::UnsupportedFormat(format!("flags {flags:#06x}")));
    }
    let num = c.read_u32::<LE>().map_err(short)?;
    let den = c.read_u32::<LE>().map_err(short)?;
    let fingerprint = c.read_u64::<LE>().map_err(short)?;
    let vertex_count = c.read_u64::<LE>().map_err(short)?;
    let count = c.read_u32::<LE>().map_err(short)? as usize;
    c.read_u32::<LE>().map_err(short)?;
    let mut sections = Vec::with_capacity(count.min(16));
    for _ in 0..count {
        let kind = c.read_u32::<LE>().map_err(|_| corrupt("truncated section table"))?;
        c.read_u32::<LE>().map_err(|_| corrupt("truncated section table"))?;
        let offset = c.read_u64::<LE>().map_err(|_| corrupt("truncated section table"))?;
        let len = c.read_u64::<LE>().map_err(|_| corrupt("truncated section table"))?;
        let end = offset
            .checked_add(len)
            .filter(|&e| e <= bytes.len() as u64)
            .ok_or_else(|| corrupt(format!("section {kind} runs past the end of the file")))?;
        sections.push((kind, &bytes[offset as usize..end as usize]));
    }
    Ok((
        Header {
            flags,
            beta: (num, den),
            fingerprint,
            vertex_count,
        },
        sections,
    ))
}

fn section<'a>(sections: &[(u32, &'a [u8])], kind: u32) -> Result<&'a [u8], StoreError> {
    let mut found = sections.iter().filter(|s| s.0 == kind);
    let body = found.next().ok_or_else(|| corrupt(format!("missing section {kind}")))?;
    if found.next().is_some() {
        return Err(corrupt(format!("section {kind} appears twice")));
    }
    Ok(body.1)
}

/// Bounds-checked reader over one section body.
struct Body<'a> {
    kind: u32,
    cur: Cursor<&'a [u8]>,
}

impl<'a> Body<'a> {
    fn new(kind: u32, bytes: &'a [u8]) -> Self {
        Body {
            kind,
            cur: Cursor::new(bytes),
        }
    }

    fn truncated(&self) -> StoreError {
        corrupt(format!("section {} truncated", self.kind))
    }

    fn u32(&mut self) -> Result<u32, StoreError> {
        self.cur.read_u32::<LE>().map_err(|_| self.truncated())
    }

    fn u64(&mut self) -> Result<u64, StoreError> {
        self.cur.read_u64::<LE>().map_err(|_| self.truncated())
    }

    /// A count that must fit in the remaining bytes at `unit` bytes each.
    fn count(&mut self, unit: usize) -> Result<usize, StoreError> {
        let n = self.u64()?;
        let left = self.cur.get_ref().len() as u64 - self.cur.position();
        if n.saturating_mul(unit as u64) > left {
            return Err(self.truncated());
        }
        Ok(n as usize)
    }

    fn u32s(&mut self, n: usize) -> Result<Vec<u32>, StoreError> {
        let mut v = vec![0u32; n];
        self.cur.read_u32_into::<LE>(&mut v).map_err(|_| self.truncated())?;
        Ok(v)
    }

    fn finish(self) -> Result<(), StoreError> {
        if self.cur.position() as usize != self.cur.get_ref().len() {
            return Err(corrupt(format!("section {} has trailing bytes", self.kind)));
        }
        Ok(())
    }
}

fn encode_hierarchy(h: &Hierarchy) -> io::Result<Vec<u8>> {
    let mut b = Vec::new();
    b.write_u64::<LE>(h.node_count() as u64)?;
    for node in h.nodes() {
        b.write_u64::<LE>(node.id.raw())?;
        b.write_u32::<LE>(node.cut.len() as u32)?;
        for &v in &node.cut {
            b.write_u32::<LE>(v)?;
        }
    }
    Ok(b)
}

fn encode_vertex_map(h: &Hierarchy) -> io::Result<Vec<u8>> {
    let mut b = Vec::new();
    b.write_u64::<LE>(h.vertex_count() as u64)?;
    for v in 0..h.vertex_count() as Vertex {
        b.write_u64::<LE>(h.vertex_node(v).raw())?;
        b.write_u32::<LE>(h.vertex_pos(v) as u32)?;
    }
    Ok(b)
}

fn encode_labels(l: &LabelStore) -> io::Result<Vec<u8>> {
    let mut b = Vec::with_capacity(l.bytes() + 8 + 4 * l.vertex_count());
    b.write_u64::<LE>(l.vertex_count() as u64)?;
    for v in 0..l.vertex_count() as Vertex {
        b.write_u32::<LE>(l.levels(v) as u32)?;
        for level in 0..l.levels(v) {
            let a = l.level(v, level);
            b.write_u32::<LE>(a.len() as u32)?;
            for &d in a {
                b.write_u32::<LE>(d)?;
            }
        }
    }
    Ok(b)
}

fn encode_contraction(m: &ContractionMap) -> io::Result<Vec<u8>> {
    let mut b = Vec::new();
    if m.is_identity() {
        return Ok(b);
    }
    b.write_u64::<LE>(m.core_count() as u64)?;
    for &v in m.core_to_original() {
        b.write_u32::<LE>(v)?;
    }
    b.write_u64::<LE>(m.records().len() as u64)?;
    for r in m.records() {
        b.write_u32::<LE>(r.vertex)?;
        b.write_u32::<LE>(r.root)?;
        b.write_u32::<LE>(r.parent)?;
        b.write_u32::<LE>(r.depth)?;
        b.write_u64::<LE>(r.dist_to_parent)?;
        b.write_u64::<LE>(r.dist_to_root)?;
    }
    Ok(b)
}

/// Writes the index; returns the number of bytes written.
pub fn save<W: Write>(idx: &DistanceIndex, out: W) -> io::Result<u64> {
    let beta = idx.beta();
    let mut flags = 0;
    if idx.tail_pruning {
        flags |= FLAG_TAIL_PRUNING;
    }
    if idx.contracted {
        flags |= FLAG_CONTRACTION;
    }
    let header = Header {
        flags,
        beta: (beta.numerator(), beta.denominator()),
        fingerprint: idx.fingerprint,
        vertex_count: idx.vertex_count() as u64,
    };
    let sections = [
        (SECTION_HIERARCHY, encode_hierarchy(&idx.hierarchy)?),
        (SECTION_VERTEX_MAP, encode_vertex_map(&idx.hierarchy)?),
        (SECTION_LABELS, encode_labels(&idx.labels)?),
        (SECTION_CONTRACTION, encode_contraction(&idx.contraction)?),
    ];
    write_file(out, &header, &sections)
}

pub fn save_to_path(idx: &DistanceIndex, path: impl AsRef<Path>) -> io::Result<u64> {
    save(idx, File::create(path)?)
}

/// Serializes the index to memory.
pub fn to_bytes(idx: &DistanceIndex) -> Vec<u8> {
    let mut buf = Vec::new();
    save(idx, &mut buf).expect("writing to memory cannot fail");
    buf
}

fn decode_hierarchy(bytes: &[u8], core_count: usize, beta: Beta) -> Result<Hierarchy, StoreError> {
    let mut b = Body::new(SECTION_HIERARCHY, bytes);
    let count = b.count(12)?;
    let mut nodes = Vec::with_capacity(count);
    for _ in 0..count {
        let id = NodeId::from_raw(b.u64()?).map_err(|e| corrupt(e.to_string()))?;
        let len = b.u32()? as usize;
        nodes.push((id, b.u32s(len)?));
    }
    b.finish()?;
    Hierarchy::from_preorder(core_count, beta, nodes).map_err(|e| corrupt(e.to_string()))
}

fn check_vertex_map(bytes: &[u8], h: &Hierarchy) -> Result<(), StoreError> {
    let mut b = Body::new(SECTION_VERTEX_MAP, bytes);
    let count = b.count(12)?;
    if count != h.vertex_count() {
        return Err(corrupt("vertex map size disagrees with the hierarchy"));
    }
    for v in 0..count as Vertex {
        let node = b.u64()?;
        let pos = b.u32()?;
        if node != h.vertex_node(v).raw() || pos as usize != h.vertex_pos(v) {
            return Err(corrupt(format!("vertex map entry {v} disagrees with the hierarchy")));
        }
    }
    b.finish()
}

fn decode_labels(bytes: &[u8], h: &Hierarchy) -> Result<LabelStore, StoreError> {
    let mut b = Body::new(SECTION_LABELS, bytes);
    let count = b.count(4)?;
    if count != h.vertex_count() {
        return Err(corrupt("label count disagrees with the hierarchy"));
    }
    let mut lengths = Vec::with_capacity(count);
    let mut dists = Vec::new();
    for v in 0..count as Vertex {
        let levels = b.u32()? as usize;
        if levels != h.vertex_node(v).level() + 1 {
            return Err(corrupt(format!("vertex {v} has {levels} label levels")));
        }
        let mut lens = Vec::with_capacity(levels);
        for _ in 0..levels {
            let len = b.u32()?;
            lens.push(len);
            dists.extend(b.u32s(len as usize)?);
        }
        lengths.push(lens);
    }
    b.finish()?;
    LabelStore::from_lengths(&lengths, dists).map_err(corrupt)
}

fn decode_contraction(bytes: &[u8], original: usize) -> Result<ContractionMap, StoreError> {
    if bytes.is_empty() {
        return Ok(ContractionMap::identity(original));
    }
    let mut b = Body::new(SECTION_CONTRACTION, bytes);
    let core = b.count(4)?;
    let core_to_original = b.u32s(core)?;
    let count = b.count(32)?;
    let mut records = Vec::with_capacity(count);
    for _ in 0..count {
        records.push(ContractionRecord {
            vertex: b.u32()?,
            root: b.u32()?,
            parent: b.u32()?,
            depth: b.u32()?,
            dist_to_parent: b.u64()?,
            dist_to_root: b.u64()?,
        });
    }
    b.finish()?;
    ContractionMap::from_parts(original, core_to_original, records).map_err(corrupt)
}

/// Parses an index from its serialized bytes.
pub fn from_bytes(bytes: &[u8]) -> Result<DistanceIndex, StoreError> {
    let (header, sections) = read_file(bytes)?;
    let beta = Beta::new(header.beta.0, header.beta.1)
        .map_err(|_| corrupt(format!("invalid beta {}/{}", header.beta.0, header.beta.1)))?;
    let original = usize::try_from(header.vertex_count)
        .ok()
        .filter(|&n| n <= Vertex::MAX as usize)
        .ok_or_else(|| corrupt("vertex count out of range"))?;
    let contraction = decode_contraction(section(&sections, SECTION_CONTRACTION)?, original)?;
    let hierarchy = decode_hierarchy(section(&sections, SECTION_HIERARCHY)?, contraction.core_count(), beta)?;
    check_vertex_map(section(&sections, SECTION_VERTEX_MAP)?, &hierarchy)?;
    let labels = decode_labels(section(&sections, SECTION_LABELS)?, &hierarchy)?;
    Ok(DistanceIndex {
        hierarchy,
        labels,
        contraction,
        fingerprint: header.fingerprint,
        tail_pruning: header.flags & FLAG_TAIL_PRUNING != 0,
        contracted: header.flags & FLAG_CONTRACTION != 0,
    })
}

pub fn load<R: Read>(mut input: R) -> Result<DistanceIndex, StoreError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

pub fn load_from_path(path: impl AsRef<Path>) -> Result<DistanceIndex, StoreError> {
    from_bytes(&std::fs::read(path)?)
}

/// Loads an index and checks it against the graph it claims to cover.
pub fn load_verified<R: Read>(input: R, g: &Graph) -> Result<DistanceIndex, StoreError> {
    let idx = load(input)?;
    idx.verify_graph(g)?;
    Ok(idx)
}

/// Writes a graph cache file.
pub fn save_graph<W: Write>(g: &Graph, out: W) -> io::Result<u64> {
    let mut body = Vec::with_capacity(16 + 12 * g.edge_count());
    body.write_u64::<LE>(g.vertex_count() as u64)?;
    body.write_u64::<LE>(g.edge_count() as u64)?;
    for (u, v, w) in g.edges() {
        body.write_u32::<LE>(u)?;
        body.write_u32::<LE>(v)?;
        body.write_u32::<LE>(w)?;
    }
    let header = Header {
        flags: 0,
        beta: (0, 0),
        fingerprint: g.fingerprint(),
        vertex_count: g.vertex_count() as u64,
    };
    write_file(out, &header, &[(SECTION_GRAPH, body)])
}

pub fn load_graph<R: Read>(mut input: R) -> Result<Graph, StoreError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let (header, sections) = read_file(&bytes)?;
    let mut b = Body::new(SECTION_GRAPH, section(&sections, SECTION_GRAPH)?);
    let n = b.u64()?;
    if n != header.vertex_count || n > Vertex::MAX as u64 {
        return Err(corrupt("graph vertex count disagrees with the header"));
    }
    let m = b.count(12)?;
    let flat = b.u32s(3 * m)?;
    b.finish()?;
    let g = Graph::from_edges(n as usize, flat.chunks_exact(3).map(|e| (e[0], e[1], e[2])))
        .map_err(|e| corrupt(e.to_string()))?;
    if g.fingerprint() != header.fingerprint {
        return Err(corrupt("graph cache fingerprint mismatch"));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::BuildConfig;

    fn sample() -> (Graph, DistanceIndex) {
        let g = Graph::from_edges(
            7,
            [(0, 1, 3), (1, 2, 4), (2, 3, 1), (3, 0, 2), (1, 4, 6), (4, 5, 1), (2, 6, 9)],
        )
        .unwrap();
        let (idx, _) = DistanceIndex::build(&g, &BuildConfig::default()).unwrap();
        (g, idx)
    }

    #[test]
    fn round_trip_is_identity() {
        let (_, idx) = sample();
        let bytes = to_bytes(&idx);
        let back = from_bytes(&bytes).unwrap();
        assert_eq!(back, idx);
        assert_eq!(to_bytes(&back), bytes);
    }

    #[test]
    fn header_fields() {
        let (g, idx) = sample();
        let bytes = to_bytes(&idx);
        assert_eq!(&bytes[..4], b"HC2L");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), VERSION);
        assert_eq!(u16::from_le_bytes([bytes[6], bytes[7]]), 3);
        assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), g.fingerprint());
    }

    #[test]
    fn identity_contraction_has_empty_body() {
        let g = Graph::from_edges(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        let (idx, _) = DistanceIndex::build(&g, &BuildConfig::default()).unwrap();
        let bytes = to_bytes(&idx);
        let (_, sections) = read_file(&bytes).unwrap();
        assert!(section(&sections, SECTION_CONTRACTION).unwrap().is_empty());
        assert_eq!(from_bytes(&bytes).unwrap(), idx);
    }

    #[test]
    fn rejects_bad_input() {
        let (g, idx) = sample();
        let bytes = to_bytes(&idx);
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(from_bytes(&bad), Err(StoreError::UnsupportedFormat(_))));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(from_bytes(&bad), Err(StoreError::UnsupportedFormat(_))));
        let mut bad = bytes.clone();
        bad[6] |= 4;
        assert!(matches!(from_bytes(&bad), Err(StoreError::UnsupportedFormat(_))));
        for cut in [10, 50, bytes.len() - 1] {
            assert!(matches!(from_bytes(&bytes[..cut]), Err(StoreError::Corrupt(_))), "{cut}");
        }
        let other = Graph::from_edges(7, [(0, 1, 1)]).unwrap();
        assert!(matches!(load_verified(&bytes[..], &other), Err(StoreError::Stale(_))));
        assert!(load_verified(&bytes[..], &g).is_ok());
    }

    #[test]
    fn graph_cache_round_trip() {
        let (g, _) = sample();
        let mut buf = Vec::new();
        save_graph(&g, &mut buf).unwrap();
        assert_eq!(load_graph(&buf[..]).unwrap(), g);
        buf[60] ^= 1;
        assert!(load_graph(&buf[..]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let (_, idx) = sample();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sample.hc2l");
        let written = save_to_path(&idx, &path).unwrap();
        assert_eq!(written, std::fs::metadata(&path).unwrap().len());
        assert_eq!(load_from_path(&path).unwrap(), idx);
        assert!(matches!(load_from_path(dir.path().join("missing")), Err(StoreError::Io(_))));
    }
}
