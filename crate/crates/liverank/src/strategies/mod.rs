//! LiveRank strategies: orderings of the node set meant to surface
//! still-active nodes first.
//!
//! Static orderings use only the snapshot structure. Sample-based ones
//! first test a training prefix `Z` under a static order, then re-rank
//! the untested remainder from the observed labels. Dynamic ones keep
//! adjusting after every single test result.
//!
//! Tie-breaking is uniform across the crate: primary score descending,
//! then static PageRank descending where one is in play, then ascending
//! node id, so every ordering is deterministic.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::NodeId;

mod adaptive;
mod dynamic;
mod static_ranks;

pub use adaptive::{
    fill_zeros_with_min_positive, rank_active_site_first, rank_double_adaptive,
    rank_simple_adaptive,
};
pub use dynamic::{dynamic_init, DynamicKind, DynamicState};
pub use static_ranks::{rank_indegree, rank_pagerank, rank_random};

/// How the training sample is drawn: a prefix of this base ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    Random { seed: u64 },
    TopPagerank,
    TopIndegree,
}

impl Selector {
    pub fn describe(&self) -> String {
        match self {
            Selector::Random { seed } => format!("random({seed})"),
            Selector::TopPagerank => "top_pagerank".into(),
            Selector::TopIndegree => "top_indegree".into(),
        }
    }
}

/// Training-set recipe: test the first `z` nodes of the selector's
/// ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    pub z: usize,
    pub selector: Selector,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            z: 100_000,
            selector: Selector::TopPagerank,
        }
    }
}

/// A permutation of the node ids together with a description of how it
/// was produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiveRankOrder {
    order: Vec<NodeId>,
    provenance: String,
}

impl LiveRankOrder {
    /// Wrap a permutation; rejects anything that is not a bijection on
    /// `0..order.len()`.
    pub fn new(order: Vec<NodeId>, provenance: impl Into<String>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &v in &order {
            let idx = v as usize;
            if idx >= n || seen[idx] {
                return Err(Error::Precondition(format!(
                    "order is not a permutation of 0..{n}: offending id {v}"
                )));
            }
            seen[idx] = true;
        }
        Ok(LiveRankOrder {
            order,
            provenance: provenance.into(),
        })
    }

    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// One id per line, preceded by a `# provenance` header line.
    pub fn write_text(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "# {}", self.provenance)?;
        for v in &self.order {
            writeln!(w, "{v}")?;
        }
        Ok(())
    }

    pub fn read_text(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut provenance = String::new();
        let mut order = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::io(path, e))?;
            let body = line.trim();
            if lineno == 1 {
                match body.strip_prefix('#') {
                    Some(rest) => {
                        provenance = rest.trim().to_string();
                        continue;
                    }
                    None => return Err(Error::parse(path, 1, "missing `# provenance` header")),
                }
            }
            if body.is_empty() {
                continue;
            }
            let v: NodeId = body
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad node id {body:?}")))?;
            order.push(v);
        }
        LiveRankOrder::new(order, provenance)
    }
}

/// First `z` entries of a base ordering, in order.
pub fn select_sample(base: &LiveRankOrder, z: usize) -> Result<Vec<NodeId>> {
    if z > base.len() {
        return Err(Error::Precondition(format!(
            "sample size {z} exceeds node count {}",
            base.len()
        )));
    }
    Ok(base.order()[..z].to_vec())
}

/// Estimate the total number of active nodes from a uniformly drawn
/// sample: `|a(Z)| * n / z`. Only meaningful when the sample really was
/// uniform; that is the caller's responsibility.
pub fn estimate_active_count(sample_labels: &[bool], n: usize) -> Result<f64> {
    let z = sample_labels.len();
    if z == 0 {
        return Err(Error::Precondition(
            "cannot estimate the active count from an empty sample".into(),
        ));
    }
    let active = sample_labels.iter().filter(|&&a| a).count();
    Ok(active as f64 * n as f64 / z as f64)
}

/// Wrap per-node scores as an ordering: score descending, ties by
/// ascending id. All score-based orders in this crate reduce to this.
pub fn rank_by_scores(scores: &[f64], provenance: impl Into<String>) -> LiveRankOrder {
    LiveRankOrder::new(argsort_desc(scores), provenance)
        .expect("argsort of all ids is a permutation")
}

/// Ids `0..scores.len()` sorted by score descending, ties by ascending id.
pub(crate) fn argsort_desc(scores: &[f64]) -> Vec<NodeId> {
    let mut ids: Vec<NodeId> = (0..scores.len() as u32).collect();
    ids.sort_unstable_by(|&a, &b| {
        scores[b as usize]
            .total_cmp(&scores[a as usize])
            .then(a.cmp(&b))
    });
    ids
}

/// Sort `ids` in place by primary score descending, then secondary
/// descending, then ascending id.
pub(crate) fn sort_desc_with_tiebreak(ids: &mut [NodeId], primary: &[f64], secondary: &[f64]) {
    ids.sort_unstable_by(|&a, &b| {
        primary[b as usize]
            .total_cmp(&primary[a as usize])
            .then(secondary[b as usize].total_cmp(&secondary[a as usize]))
            .then(a.cmp(&b))
    });
}

/// Marks the sample nodes of a full order; shared by the sample-based
/// strategies.
pub(crate) fn sample_bitmap(n: usize, sample: &[NodeId]) -> Result<Vec<bool>> {
    let mut in_sample = vec![false; n];
    for &v in sample {
        let idx = v as usize;
        if idx >= n {
            return Err(Error::NodeOutOfBounds { id: v as u64, n });
        }
        if in_sample[idx] {
            return Err(Error::Precondition(format!(
                "node {v} appears twice in the sample"
            )));
        }
        in_sample[idx] = true;
    }
    Ok(in_sample)
}
