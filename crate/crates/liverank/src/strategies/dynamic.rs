//! Dynamic strategies: the ordering is decided one fetch at a time,
//! folding in every test result as it arrives.
//!
//! The caller drives a strict two-step protocol: `next_node` hands out
//! the next node to test, `report` returns its label. Each node is
//! emitted exactly once; once everything is tested `next_node` yields
//! `None`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::pagerank::ScoreVector;

use super::{argsort_desc, sample_bitmap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicKind {
    /// Breadth-first from the sample: active nodes enqueue their
    /// untested out-neighbors. An empty queue refills from the best
    /// untested node by static PageRank.
    Bfs,
    /// Highest activity score first, where a node's score counts its
    /// already-tested active in-neighbors. Ties break by static
    /// PageRank rank, then by id.
    ActiveIndegree,
}

impl DynamicKind {
    fn name(&self) -> &'static str {
        match self {
            DynamicKind::Bfs => "bfs",
            DynamicKind::ActiveIndegree => "active_indegree",
        }
    }
}

/// Heap entry: activity score, then best (lowest) static rank, then
/// lowest id. `BinaryHeap` is a max-heap, hence the `Reverse`s.
type AiEntry = (u32, Reverse<u32>, Reverse<NodeId>);

#[derive(Debug, Clone)]
pub struct DynamicState {
    kind: DynamicKind,
    n: usize,
    tested: Vec<bool>,
    tested_count: usize,
    awaiting: Option<NodeId>,
    /// Forced prefix: the sample is always crawled first, in order.
    pending_sample: VecDeque<NodeId>,
    queue: VecDeque<NodeId>,
    heap: BinaryHeap<AiEntry>,
    activity: Vec<u32>,
    /// Node ids by static PageRank descending; `pr_rank` inverts it.
    pr_order: Vec<NodeId>,
    pr_rank: Vec<u32>,
    refill_cursor: usize,
    provenance: String,
}

/// Set up a dynamic crawl. `static_pr` supplies the structural
/// tie-break and the refill order; the sample is crawled first.
pub fn dynamic_init(
    kind: DynamicKind,
    g: &DirectedGraph,
    static_pr: &ScoreVector,
    sample: &[NodeId],
) -> Result<DynamicState> {
    let n = g.node_count();
    if static_pr.len() != n {
        return Err(Error::Shape(format!(
            "score vector has {} entries, graph has {n} nodes",
            static_pr.len()
        )));
    }
    sample_bitmap(n, sample)?;
    let pr_order = argsort_desc(static_pr.as_slice());
    let mut pr_rank = vec![0u32; n];
    for (rank, &v) in pr_order.iter().enumerate() {
        pr_rank[v as usize] = rank as u32;
    }
    let mut state = DynamicState {
        kind,
        n,
        tested: vec![false; n],
        tested_count: 0,
        awaiting: None,
        pending_sample: VecDeque::new(),
        queue: VecDeque::new(),
        heap: BinaryHeap::new(),
        activity: Vec::new(),
        pr_order,
        pr_rank,
        refill_cursor: 0,
        provenance: format!("{}(z={})", kind.name(), sample.len()),
    };
    match kind {
        DynamicKind::Bfs => {
            state.queue.extend(sample.iter().copied());
        }
        DynamicKind::ActiveIndegree => {
            state.pending_sample.extend(sample.iter().copied());
            state.activity = vec![0u32; n];
            // Every node starts at score 0 so the heap doubles as the
            // refill order; stale entries are skipped on pop.
            let seed: Vec<AiEntry> = (0..n as u32)
                .map(|v| (0, Reverse(state.pr_rank[v as usize]), Reverse(v)))
                .collect();
            state.heap = BinaryHeap::from(seed);
        }
    }
    Ok(state)
}

impl DynamicState {
    pub fn kind(&self) -> DynamicKind {
        self.kind
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn tested_count(&self) -> usize {
        self.tested_count
    }

    /// Pick the next node to test, or `None` once all nodes are done.
    /// The choice is committed: the node counts as tested even if the
    /// caller never reports it.
    pub fn next_node(&mut self) -> Option<NodeId> {
        let v = match self.kind {
            DynamicKind::Bfs => self.next_bfs(),
            DynamicKind::ActiveIndegree => self.next_ai(),
        }?;
        self.tested[v as usize] = true;
        self.tested_count += 1;
        self.awaiting = Some(v);
        Some(v)
    }

    fn next_bfs(&mut self) -> Option<NodeId> {
        // Duplicate pushes are allowed; tested entries are dropped here.
        while let Some(v) = self.queue.pop_front() {
            if !self.tested[v as usize] {
                return Some(v);
            }
        }
        while self.refill_cursor < self.n {
            let v = self.pr_order[self.refill_cursor];
            self.refill_cursor += 1;
            if !self.tested[v as usize] {
                return Some(v);
            }
        }
        None
    }

    fn next_ai(&mut self) -> Option<NodeId> {
        while let Some(v) = self.pending_sample.pop_front() {
            if !self.tested[v as usize] {
                return Some(v);
            }
        }
        while let Some((score, _, Reverse(v))) = self.heap.pop() {
            // An entry is current only if the score still matches;
            // every increment pushed a fresh entry, so one always does.
            if !self.tested[v as usize] && self.activity[v as usize] == score {
                return Some(v);
            }
        }
        None
    }

    /// Feed back the test result for the node just emitted.
    pub fn report(&mut self, v: NodeId, active: bool, g: &DirectedGraph) -> Result<()> {
        if g.node_count() != self.n {
            return Err(Error::Shape(format!(
                "graph has {} nodes, crawl was initialized with {}",
                g.node_count(),
                self.n
            )));
        }
        match self.awaiting {
            Some(expect) if expect == v => {}
            Some(expect) => {
                return Err(Error::Protocol(format!(
                    "reported node {v} but node {expect} is awaiting its result"
                )))
            }
            None => {
                return Err(Error::Protocol(format!(
                    "reported node {v} but no test is outstanding"
                )))
            }
        }
        self.awaiting = None;
        if !active {
            return Ok(());
        }
        match self.kind {
            DynamicKind::Bfs => {
                for &w in g.out_neighbors(v) {
                    if !self.tested[w as usize] {
                        self.queue.push_back(w);
                    }
                }
            }
            DynamicKind::ActiveIndegree => {
                for &w in g.out_neighbors(v) {
                    if !self.tested[w as usize] {
                        self.activity[w as usize] += 1;
                        self.heap.push((
                            self.activity[w as usize],
                            Reverse(self.pr_rank[w as usize]),
                            Reverse(w),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}
