//! Static orderings: fixed before any node is tested.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::{DirectedGraph, NodeId};
use crate::pagerank::{pagerank, uniform_zap, PageRankConfig};

use super::{argsort_desc, LiveRankOrder};

/// Uniform random permutation of the node ids. The usual baseline: any
/// strategy worth keeping must beat it.
pub fn rank_random(g: &DirectedGraph, seed: u64) -> LiveRankOrder {
    let mut order: Vec<NodeId> = (0..g.node_count() as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    LiveRankOrder::new(order, format!("random(seed={seed})"))
        .expect("a shuffled identity is a permutation")
}

/// Nodes by in-degree descending, ties by ascending id.
pub fn rank_indegree(g: &DirectedGraph) -> LiveRankOrder {
    let scores: Vec<f64> = g.node_ids().map(|v| g.in_degree(v) as f64).collect();
    LiveRankOrder::new(argsort_desc(&scores), "indegree")
        .expect("argsort of all ids is a permutation")
}

/// Nodes by PageRank descending (uniform zap), ties by ascending id.
pub fn rank_pagerank(g: &DirectedGraph, cfg: &PageRankConfig) -> Result<LiveRankOrder> {
    let scores = pagerank(g, cfg, &uniform_zap(g.node_count())?)?;
    Ok(super::rank_by_scores(
        scores.as_slice(),
        format!("pagerank(d={})", cfg.damping),
    ))
}

impl super::Selector {
    /// The base ordering this selector draws its sample prefix from.
    pub fn base_order(&self, g: &DirectedGraph, cfg: &PageRankConfig) -> Result<LiveRankOrder> {
        match self {
            super::Selector::Random { seed } => Ok(rank_random(g, *seed)),
            super::Selector::TopPagerank => rank_pagerank(g, cfg),
            super::Selector::TopIndegree => Ok(rank_indegree(g)),
        }
    }
}
