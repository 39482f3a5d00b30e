//! Directed snapshot graph in compressed adjacency form.
//!
//! The graph is immutable after construction and stores both edge
//! directions as flat CSR arrays, so forward and reverse neighborhoods
//! are cheap to scan. Node ids are dense integers `0..n`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Dense node identifier. `u32` keeps adjacency arrays compact.
pub type NodeId = u32;

/// Magic bytes opening the binary graph cache, followed by a `u32` format version.
pub const GRAPH_CACHE_MAGIC: [u8; 4] = *b"LRGC";
const GRAPH_CACHE_VERSION: u32 = 1;

/// Immutable directed graph with forward and reverse adjacency.
///
/// Within each node the neighbor list is sorted ascending; after a
/// duplicate-collapsing ingest the lists are strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    m: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
}

impl DirectedGraph {
    /// Build a graph from an edge list over nodes `0..n`.
    ///
    /// With `collapse_duplicates`, parallel edges are merged into one.
    /// Self-loops are kept either way.
    pub fn from_edges(
        n: usize,
        edges: &[(NodeId, NodeId)],
        collapse_duplicates: bool,
    ) -> Result<Self> {
        for &(u, v) in edges {
            for id in [u, v] {
                if id as usize >= n {
                    return Err(Error::NodeOutOfBounds { id: id as u64, n });
                }
            }
        }

        // Counting sort by source, then sort each row.
        let mut out_offsets = vec![0usize; n + 1];
        for &(u, _) in edges {
            out_offsets[u as usize + 1] += 1;
        }
        for i in 1..=n {
            out_offsets[i] += out_offsets[i - 1];
        }
        let mut out_targets = vec![0 as NodeId; edges.len()];
        let mut cursor = out_offsets.clone();
        for &(u, v) in edges {
            out_targets[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
        }
        for u in 0..n {
            out_targets[out_offsets[u]..out_offsets[u + 1]].sort_unstable();
        }

        if collapse_duplicates {
            let mut write = 0usize;
            let mut new_offsets = vec![0usize; n + 1];
            for u in 0..n {
                let (start, end) = (out_offsets[u], out_offsets[u + 1]);
                new_offsets[u] = write;
                let mut prev: Option<NodeId> = None;
                for i in start..end {
                    let v = out_targets[i];
                    if prev != Some(v) {
                        out_targets[write] = v;
                        write += 1;
                        prev = Some(v);
                    }
                }
            }
            new_offsets[n] = write;
            out_targets.truncate(write);
            out_offsets = new_offsets;
        }

        let m = out_targets.len();
        let (in_offsets, in_sources) = transpose(n, &out_offsets, &out_targets);
        Ok(DirectedGraph {
            n,
            m,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_neighbors(v).len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_neighbors(v).len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n).map(|v| v as NodeId)
    }

    /// Write the versioned binary cache. Only the forward direction is
    /// stored; the reverse side is rebuilt deterministically on load,
    /// so the round trip is exact.
    pub fn save_cache(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let res = (|| -> std::io::Result<()> {
            w.write_all(&GRAPH_CACHE_MAGIC)?;
            w.write_all(&GRAPH_CACHE_VERSION.to_le_bytes())?;
            w.write_all(&(self.n as u64).to_le_bytes())?;
            w.write_all(&(self.m as u64).to_le_bytes())?;
            for &off in &self.out_offsets {
                w.write_all(&(off as u64).to_le_bytes())?;
            }
            for &t in &self.out_targets {
                w.write_all(&t.to_le_bytes())?;
            }
            w.flush()
        })();
        res.map_err(|e| Error::io(path, e))
    }

    /// Load a graph written by [`DirectedGraph::save_cache`].
    pub fn load_cache(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let bad = |msg: &str| Error::parse(path, 0, msg);

        let mut magic = [0u8; 4];
        read_exact(&mut r, &mut magic, path)?;
        if magic != GRAPH_CACHE_MAGIC {
            return Err(bad("not a graph cache file (bad magic)"));
        }
        let version = read_u32(&mut r, path)?;
        if version != GRAPH_CACHE_VERSION {
            return Err(bad(&format!("unsupported graph cache version {version}")));
        }
        let n = read_u64(&mut r, path)? as usize;
        let m = read_u64(&mut r, path)? as usize;
        let mut out_offsets = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            out_offsets.push(read_u64(&mut r, path)? as usize);
        }
        if out_offsets[0] != 0 || out_offsets[n] != m {
            return Err(bad("corrupt offset table"));
        }
        let mut out_targets = Vec::with_capacity(m);
        for _ in 0..m {
            let t = read_u32(&mut r, path)?;
            if t as usize >= n {
                return Err(Error::NodeOutOfBounds { id: t as u64, n });
            }
            out_targets.push(t);
        }
        let (in_offsets, in_sources) = transpose(n, &out_offsets, &out_targets);
        Ok(DirectedGraph {
            n,
            m,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
        })
    }
}

/// Build the reverse CSR from a forward CSR. Scanning sources in
/// ascending order leaves every reverse list sorted.
fn transpose(n: usize, offsets: &[usize], targets: &[NodeId]) -> (Vec<usize>, Vec<NodeId>) {
    let mut in_offsets = vec![0usize; n + 1];
    for &v in targets {
        in_offsets[v as usize + 1] += 1;
    }
    for i in 1..=n {
        in_offsets[i] += in_offsets[i - 1];
    }
    let mut in_sources = vec![0 as NodeId; targets.len()];
    let mut cursor = in_offsets.clone();
    for u in 0..n {
        for &v in &targets[offsets[u]..offsets[u + 1]] {
            in_sources[cursor[v as usize]] = u as NodeId;
            cursor[v as usize] += 1;
        }
    }
    (in_offsets, in_sources)
}

/// Parse a whitespace-separated `u v` edge list.
///
/// Lines starting with `#` are comments, except that a first line of the
/// form `# n m` is taken as a header declaring the node and edge counts.
/// With a header, ids must stay below the declared `n` and the number of
/// edge lines must equal the declared `m` (counted before any duplicate
/// collapsing). Without one, `n` is one past the largest id seen.
pub fn load_edge_list(path: &Path, collapse_duplicates: bool) -> Result<DirectedGraph> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut declared: Option<(usize, usize)> = None;
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut max_id: Option<NodeId> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let body = line.trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('#') {
            if lineno == 1 {
                let nums: Vec<&str> = rest.split_whitespace().collect();
                if nums.len() == 2 {
                    let n = nums[0].parse::<usize>();
                    let m = nums[1].parse::<usize>();
                    if let (Ok(n), Ok(m)) = (n, m) {
                        declared = Some((n, m));
                    }
                }
            }
            continue;
        }
        let mut parts = body.split_whitespace();
        let (u, v) = match (parts.next(), parts.next(), parts.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("expected two fields, got {body:?}"),
                ))
            }
        };
        let u: NodeId = u
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad node id {u:?}")))?;
        let v: NodeId = v
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad node id {v:?}")))?;
        if let Some((n, _)) = declared {
            for id in [u, v] {
                if id as usize >= n {
                    return Err(Error::NodeOutOfBounds { id: id as u64, n });
                }
            }
        }
        max_id = Some(max_id.map_or(u.max(v), |m: NodeId| m.max(u).max(v)));
        edges.push((u, v));
    }

    let n = match declared {
        Some((n, m)) => {
            if edges.len() != m {
                return Err(Error::Shape(format!(
                    "header of {} declares m = {m}, file has {} edge lines",
                    path.display(),
                    edges.len()
                )));
            }
            n
        }
        None => max_id.map_or(0, |id| id as usize + 1),
    };
    DirectedGraph::from_edges(n, &edges, collapse_duplicates)
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], path: &Path) -> Result<()> {
    r.read_exact(buf).map_err(|e| Error::io(path, e))
}

fn read_u32(r: &mut impl Read, path: &Path) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf, path)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read, path: &Path) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact(r, &mut buf, path)?;
    Ok(u64::from_le_bytes(buf))
}
