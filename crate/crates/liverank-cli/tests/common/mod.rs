//! Independent oracles and fixture generators for the acceptance
//! suite. Everything here is deliberately naive and shares no code
//! with the library, so a bug in the fast paths cannot hide.

use liverank::{DirectedGraph, NodeId};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DirectedGraph {
    let edges: Vec<(NodeId, NodeId)> = (0..m)
        .map(|_| {
            (
                rng.random_range(0..n as NodeId),
                rng.random_range(0..n as NodeId),
            )
        })
        .collect();
    DirectedGraph::from_edges(n, &edges, true).unwrap()
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, p_active: f64) -> Vec<bool> {
    (0..n).map(|_| rng.random_bool(p_active)).collect()
}

/// Solve the stationarity equation directly: with row vector y,
/// y = d*y*A + (1-d)*x becomes (I - d*A^T) y^T = (1-d) x^T. Gaussian
/// elimination with partial pivoting; O(n^3), so n stays small.
pub fn dense_pagerank(g: &DirectedGraph, damping: f64, zap: &[f64]) -> Vec<f64> {
    let n = g.node_count();
    let mut mat = vec![vec![0.0f64; n]; n];
    for (i, row) in mat.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for u in g.node_ids() {
        let deg = g.out_degree(u);
        if deg == 0 {
            continue;
        }
        let w = damping / deg as f64;
        for &v in g.out_neighbors(u) {
            mat[v as usize][u as usize] -= w;
        }
    }
    let mut rhs: Vec<f64> = zap.iter().map(|x| (1.0 - damping) * x).collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs()))
            .unwrap();
        mat.swap(col, pivot);
        rhs.swap(col, pivot);
        let p = mat[col][col];
        assert!(p.abs() > 1e-12, "singular system at column {col}");
        let (top, rest) = mat.split_at_mut(col + 1);
        let src = &top[col];
        for (off, row) in rest.iter_mut().enumerate() {
            let f = row[col] / p;
            if f == 0.0 {
                continue;
            }
            for (d, s) in row[col..].iter_mut().zip(&src[col..]) {
                *d -= f * s;
            }
            rhs[col + 1 + off] -= f * rhs[col];
        }
    }
    let mut y = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= mat[row][k] * y[k];
        }
        y[row] = acc / mat[row][row];
    }
    y
}

/// Ids sorted by score descending, ties by ascending id.
pub fn argsort_desc(scores: &[f64]) -> Vec<NodeId> {
    let mut ids: Vec<NodeId> = (0..scores.len() as NodeId).collect();
    ids.sort_by(|&a, &b| {
        scores[b as usize]
            .total_cmp(&scores[a as usize])
            .then(a.cmp(&b))
    });
    ids
}

/// Naive frontier crawl: FIFO queue seeded with the sample, active
/// nodes enqueue their untested out-neighbors, and when the queue
/// drains the best untested node by static order fills in.
pub fn reference_bfs(
    g: &DirectedGraph,
    labels: &[bool],
    pr_order: &[NodeId],
    sample: &[NodeId],
) -> Vec<(NodeId, bool)> {
    let n = g.node_count();
    let mut tested = vec![false; n];
    let mut queue: std::collections::VecDeque<NodeId> = sample.iter().copied().collect();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut next = None;
        while let Some(c) = queue.pop_front() {
            if !tested[c as usize] {
                next = Some(c);
                break;
            }
        }
        let v = next.unwrap_or_else(|| {
            pr_order
                .iter()
                .copied()
                .find(|&c| !tested[c as usize])
                .unwrap()
        });
        tested[v as usize] = true;
        let active = labels[v as usize];
        out.push((v, active));
        if active {
            for &w in g.out_neighbors(v) {
                if !tested[w as usize] {
                    queue.push_back(w);
                }
            }
        }
    }
    out
}

/// Naive greedy crawl: after the forced sample prefix, rescan every
/// untested node each step and emit the one with the most tested
/// active in-neighbors (ties by static rank, then id).
pub fn reference_active_indegree(
    g: &DirectedGraph,
    labels: &[bool],
    pr_rank: &[usize],
    sample: &[NodeId],
) -> Vec<(NodeId, bool)> {
    let n = g.node_count();
    let mut tested = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for &v in sample {
        tested[v as usize] = true;
        out.push((v, labels[v as usize]));
    }
    while out.len() < n {
        let best = (0..n as NodeId)
            .filter(|&v| !tested[v as usize])
            .min_by_key(|&v| {
                let act = g
                    .in_neighbors(v)
                    .iter()
                    .filter(|&&u| tested[u as usize] && labels[u as usize])
                    .count();
                (std::cmp::Reverse(act), pr_rank[v as usize], v)
            })
            .unwrap();
        tested[best as usize] = true;
        out.push((best, labels[best as usize]));
    }
    out
}

/// Visit every permutation of `items` (Heap's algorithm).
pub fn for_each_permutation<T: Copy>(items: &[T], f: &mut impl FnMut(&[T])) {
    let mut arr = items.to_vec();
    let k = arr.len();
    heaps(k, &mut arr, f);
}

fn heaps<T: Copy>(k: usize, arr: &mut [T], f: &mut impl FnMut(&[T])) {
    if k <= 1 {
        f(arr);
        return;
    }
    for i in 0..k {
        heaps(k - 1, arr, f);
        if k.is_multiple_of(2) {
            arr.swap(i, k - 1);
        } else {
            arr.swap(0, k - 1);
        }
    }
}

/// Peak resident set over all reaped child processes, in bytes.
/// Linux reports ru_maxrss in KiB.
pub fn children_maxrss_bytes() -> u64 {
    let mut ru = unsafe { std::mem::zeroed::<libc::rusage>() };
    let rc = unsafe { libc::getrusage(libc::RUSAGE_CHILDREN, &mut ru) };
    assert_eq!(rc, 0, "getrusage failed");
    ru.ru_maxrss as u64 * 1024
}

pub fn liverank_bin() -> std::process::Command {
    std::process::Command::new(env!("CARGO_BIN_EXE_liverank"))
}
