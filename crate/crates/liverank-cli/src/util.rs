//! Shared plumbing: error-to-exit-code mapping, atomic file writes,
//! and format-sniffing graph loading.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use liverank::graph::{load_edge_list, DirectedGraph, GRAPH_CACHE_MAGIC};

/// CLI-level error, carrying the exit code policy: 2 for configuration
/// problems, 3 for bad input data, 4 for runtime failures.
#[derive(Debug)]
pub enum AppError {
    Config(String),
    Data(liverank::Error),
    Runtime(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Data(_) => 3,
            AppError::Runtime(_) => 4,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Config(msg) => write!(f, "configuration error: {msg}"),
            AppError::Data(err) => write!(f, "data error: {err}"),
            AppError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl From<liverank::Error> for AppError {
    fn from(err: liverank::Error) -> Self {
        use liverank::Error::*;
        match err {
            // Bad parameters are the caller's configuration to fix.
            Precondition(msg) => AppError::Config(msg),
            // Computation-level failures.
            NonConvergence { .. } | Unreachable(_) | Protocol(_) => {
                AppError::Runtime(err.to_string())
            }
            // Everything else is a problem with the input data.
            other => AppError::Data(other),
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;

/// Write through a temp file in the target directory, then rename into
/// place, so readers never observe a half-written file.
pub fn write_atomic<F>(path: &Path, fill: F) -> AppResult<()>
where
    F: for<'a> FnOnce(&mut BufWriter<&'a mut File>) -> std::io::Result<()>,
{
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d),
        None => tempfile::NamedTempFile::new(),
    }
    .map_err(|e| AppError::Runtime(format!("cannot create temp file near {path:?}: {e}")))?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        fill(&mut w).map_err(|e| AppError::Runtime(format!("cannot write {path:?}: {e}")))?;
        w.flush()
            .map_err(|e| AppError::Runtime(format!("cannot write {path:?}: {e}")))?;
    }
    tmp.persist(path)
        .map_err(|e| AppError::Runtime(format!("cannot move output into {path:?}: {e}")))?;
    Ok(())
}

/// Load a graph from either format: binary caches are recognized by
/// their magic bytes, anything else parses as a text edge list.
pub fn load_graph_auto(path: &Path) -> Result<DirectedGraph, liverank::Error> {
    let mut magic = [0u8; 4];
    let is_cache = File::open(path)
        .and_then(|mut f| f.read_exact(&mut magic))
        .map(|_| magic == GRAPH_CACHE_MAGIC)
        .unwrap_or(false);
    if is_cache {
        DirectedGraph::load_cache(path)
    } else {
        load_edge_list(path, true)
    }
}
