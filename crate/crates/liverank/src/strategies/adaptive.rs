//! Sample-based strategies: spend the first `z` fetches on a training
//! prefix, then re-rank everything untested from the observed labels.
//!
//! All orderings here put the sample itself at positions `1..=z`; those
//! fetches are paid for either way, so the strategies only compete on
//! the untested suffix.

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::pagerank::{pagerank, subset_zap, uniform_zap, PageRankConfig};
use crate::sites::SiteMap;

use super::{sample_bitmap, sort_desc_with_tiebreak, LiveRankOrder};

fn check_labels(sample: &[NodeId], sample_labels: &[bool]) -> Result<()> {
    if sample.len() != sample_labels.len() {
        return Err(Error::Shape(format!(
            "{} sample nodes but {} labels",
            sample.len(),
            sample_labels.len()
        )));
    }
    Ok(())
}

fn partition_sample(sample: &[NodeId], sample_labels: &[bool]) -> (Vec<NodeId>, Vec<NodeId>) {
    let mut active = Vec::new();
    let mut inactive = Vec::new();
    for (&v, &is_active) in sample.iter().zip(sample_labels) {
        if is_active {
            active.push(v);
        } else {
            inactive.push(v);
        }
    }
    (active, inactive)
}

/// Assemble `sample ++ untested-sorted-by-score` where score ties break
/// by ascending id.
fn order_by_scores(
    n: usize,
    sample: &[NodeId],
    in_sample: &[bool],
    scores: &[f64],
    provenance: String,
) -> LiveRankOrder {
    let mut order: Vec<NodeId> = sample.to_vec();
    let mut untested: Vec<NodeId> = (0..n as u32).filter(|&v| !in_sample[v as usize]).collect();
    untested.sort_unstable_by(|&a, &b| {
        scores[b as usize]
            .total_cmp(&scores[a as usize])
            .then(a.cmp(&b))
    });
    order.extend(untested);
    LiveRankOrder::new(order, provenance).expect("sample and untested nodes partition 0..n")
}

/// Rank the untested nodes by a PageRank personalized on the active
/// sampled nodes: mass restarts from `a(Z)`, so it concentrates near
/// confirmed-alive regions. A sample with no active node gives nothing
/// to restart from; the untested suffix then falls back to the plain
/// PageRank order.
pub fn rank_simple_adaptive(
    g: &DirectedGraph,
    cfg: &PageRankConfig,
    sample: &[NodeId],
    sample_labels: &[bool],
) -> Result<LiveRankOrder> {
    check_labels(sample, sample_labels)?;
    let n = g.node_count();
    let in_sample = sample_bitmap(n, sample)?;
    let (active, _) = partition_sample(sample, sample_labels);
    let z = sample.len();
    let (scores, provenance) = if active.is_empty() {
        let scores = pagerank(g, cfg, &uniform_zap(n)?)?;
        (
            scores,
            format!("simple_adaptive(z={z}; fallback=static_pagerank)"),
        )
    } else {
        let scores = pagerank(g, cfg, &subset_zap(n, &active)?)?;
        (scores, format!("simple_adaptive(z={z})"))
    };
    Ok(order_by_scores(
        n,
        sample,
        &in_sample,
        scores.as_slice(),
        provenance,
    ))
}

/// Replace every zero with the smallest strictly positive entry.
/// Turns a PageRank vector into a safe divisor: nodes the walk never
/// reached get the most optimistic plausible value instead of 0.
pub fn fill_zeros_with_min_positive(values: &mut [f64]) -> Result<()> {
    let mut min_pos = f64::INFINITY;
    for &x in values.iter() {
        if x < 0.0 || !x.is_finite() {
            return Err(Error::Precondition(format!(
                "scores must be finite and non-negative, got {x}"
            )));
        }
        if x > 0.0 && x < min_pos {
            min_pos = x;
        }
    }
    if !min_pos.is_finite() {
        return Err(Error::Precondition(
            "cannot zero-fill an all-zero vector".into(),
        ));
    }
    for x in values.iter_mut() {
        if *x == 0.0 {
            *x = min_pos;
        }
    }
    Ok(())
}

/// Rank the untested nodes by the ratio of two personalized PageRanks:
/// one restarting from the active sampled nodes, one from the inactive
/// ones. High ratio means reachable from live regions but not from dead
/// ones. Degenerates to the simple adaptive order when either side of
/// the sample is empty.
pub fn rank_double_adaptive(
    g: &DirectedGraph,
    cfg: &PageRankConfig,
    sample: &[NodeId],
    sample_labels: &[bool],
) -> Result<LiveRankOrder> {
    check_labels(sample, sample_labels)?;
    let n = g.node_count();
    let in_sample = sample_bitmap(n, sample)?;
    let (active, inactive) = partition_sample(sample, sample_labels);
    let z = sample.len();
    if active.is_empty() || inactive.is_empty() {
        let inner = rank_simple_adaptive(g, cfg, sample, sample_labels)?;
        let order = inner.order().to_vec();
        return LiveRankOrder::new(
            order,
            format!("double_adaptive(z={z}; fallback={})", inner.provenance()),
        );
    }
    let plus = pagerank(g, cfg, &subset_zap(n, &active)?)?;
    let mut minus = pagerank(g, cfg, &subset_zap(n, &inactive)?)?.into_values();
    fill_zeros_with_min_positive(&mut minus)?;
    let ratio: Vec<f64> = plus
        .as_slice()
        .iter()
        .zip(&minus)
        .map(|(p, m)| p / m)
        .collect();
    // Ratio ties collapse whole unreachable regions; a structural
    // tiebreak keeps those in a sensible order.
    let static_pr = pagerank(g, cfg, &uniform_zap(n)?)?;
    let mut order: Vec<NodeId> = sample.to_vec();
    let mut untested: Vec<NodeId> = (0..n as u32).filter(|&v| !in_sample[v as usize]).collect();
    sort_desc_with_tiebreak(&mut untested, &ratio, static_pr.as_slice());
    order.extend(untested);
    LiveRankOrder::new(order, format!("double_adaptive(z={z})"))
}

/// Rank untested nodes site-major: sites with a higher observed live
/// fraction in the sample come first, and pages inside a site follow
/// the static PageRank order. Sites the sample never touched go last.
///
/// Site ties (equal observed activity, or all-unsampled) break by the
/// site's best static PageRank over all members, then by site id.
pub fn rank_active_site_first(
    g: &DirectedGraph,
    cfg: &PageRankConfig,
    sites: &SiteMap,
    sample: &[NodeId],
    sample_labels: &[bool],
) -> Result<LiveRankOrder> {
    check_labels(sample, sample_labels)?;
    let n = g.node_count();
    if sites.node_count() != n {
        return Err(Error::Shape(format!(
            "site map covers {} nodes, graph has {n}",
            sites.node_count()
        )));
    }
    let in_sample = sample_bitmap(n, sample)?;
    let static_pr = pagerank(g, cfg, &uniform_zap(n)?)?;
    let pr = static_pr.as_slice();

    let s = sites.site_count();
    let mut sampled_total = vec![0usize; s];
    let mut sampled_active = vec![0usize; s];
    for (&v, &is_active) in sample.iter().zip(sample_labels) {
        let site = sites.site_of(v) as usize;
        sampled_total[site] += 1;
        if is_active {
            sampled_active[site] += 1;
        }
    }
    let max_pr: Vec<f64> = (0..s as u32)
        .map(|site| {
            sites
                .members(site)
                .iter()
                .map(|&v| pr[v as usize])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();

    let by_pr_then_id = |site: u32| (max_pr[site as usize], site);
    let mut sampled_sites: Vec<u32> = (0..s as u32)
        .filter(|&site| sampled_total[site as usize] > 0)
        .collect();
    sampled_sites.sort_unstable_by(|&a, &b| {
        let act =
            |site: u32| sampled_active[site as usize] as f64 / sampled_total[site as usize] as f64;
        act(b)
            .total_cmp(&act(a))
            .then(max_pr[b as usize].total_cmp(&max_pr[a as usize]))
            .then(a.cmp(&b))
    });
    let mut unsampled_sites: Vec<u32> = (0..s as u32)
        .filter(|&site| sampled_total[site as usize] == 0)
        .collect();
    unsampled_sites.sort_unstable_by(|&a, &b| {
        let (pa, _) = by_pr_then_id(a);
        let (pb, _) = by_pr_then_id(b);
        pb.total_cmp(&pa).then(a.cmp(&b))
    });

    let mut order: Vec<NodeId> = sample.to_vec();
    for &site in sampled_sites.iter().chain(&unsampled_sites) {
        let mut rest: Vec<NodeId> = sites
            .members(site)
            .iter()
            .copied()
            .filter(|&v| !in_sample[v as usize])
            .collect();
        rest.sort_unstable_by(|&a, &b| pr[b as usize].total_cmp(&pr[a as usize]).then(a.cmp(&b)));
        order.extend(rest);
    }
    LiveRankOrder::new(order, format!("active_site_first(z={})", sample.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(u32, u32)]) -> DirectedGraph {
        DirectedGraph::from_edges(n, edges, true).unwrap()
    }

    fn cfg() -> PageRankConfig {
        PageRankConfig::default()
    }

    #[test]
    fn simple_adaptive_follows_the_active_seed() {
        // Two disjoint arcs; only the arc behind the live sample node
        // receives restart mass.
        let g = graph(4, &[(0, 2), (1, 3)]);
        let up = rank_simple_adaptive(&g, &cfg(), &[0, 1], &[true, false]).unwrap();
        assert_eq!(up.order(), &[0, 1, 2, 3]);
        assert_eq!(up.provenance(), "simple_adaptive(z=2)");
        let down = rank_simple_adaptive(&g, &cfg(), &[0, 1], &[false, true]).unwrap();
        assert_eq!(down.order(), &[0, 1, 3, 2]);
    }

    #[test]
    fn simple_adaptive_path_scores() {
        // Restart mass on node 0 decays down the path, so the untested
        // suffix keeps the path order.
        let g = graph(3, &[(0, 1), (1, 2)]);
        let order = rank_simple_adaptive(&g, &cfg(), &[0], &[true]).unwrap();
        assert_eq!(order.order(), &[0, 1, 2]);
    }

    #[test]
    fn simple_adaptive_all_dead_sample_falls_back() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let order = rank_simple_adaptive(&g, &cfg(), &[0], &[false]).unwrap();
        // Static PageRank puts the sink first among the untested.
        assert_eq!(order.order(), &[0, 2, 1]);
        assert!(order.provenance().contains("fallback"));
    }

    #[test]
    fn simple_adaptive_full_sample_is_identity_on_it() {
        let g = graph(3, &[(0, 1)]);
        let order = rank_simple_adaptive(&g, &cfg(), &[2, 0, 1], &[true, false, true]).unwrap();
        assert_eq!(order.order(), &[2, 0, 1]);
    }

    #[test]
    fn simple_adaptive_validates_inputs() {
        let g = graph(3, &[]);
        assert!(rank_simple_adaptive(&g, &cfg(), &[0, 1], &[true]).is_err());
        assert!(rank_simple_adaptive(&g, &cfg(), &[0, 0], &[true, true]).is_err());
        assert!(rank_simple_adaptive(&g, &cfg(), &[7], &[true]).is_err());
    }

    #[test]
    fn zero_fill_uses_min_positive() {
        let mut v = vec![0.0, 0.5, 0.2, 0.0];
        fill_zeros_with_min_positive(&mut v).unwrap();
        assert_eq!(v, vec![0.2, 0.5, 0.2, 0.2]);

        let mut untouched = vec![0.3, 0.1];
        fill_zeros_with_min_positive(&mut untouched).unwrap();
        assert_eq!(untouched, vec![0.3, 0.1]);

        assert!(fill_zeros_with_min_positive(&mut [0.0, 0.0]).is_err());
        assert!(fill_zeros_with_min_positive(&mut [-1.0, 2.0]).is_err());
    }

    #[test]
    fn double_adaptive_prefers_live_side() {
        // 0 -> 1 is the live arc, 2 -> 3 the dead one. The ratio boosts
        // node 1 (reachable from the live seed) over node 3.
        let g = graph(4, &[(0, 1), (2, 3)]);
        let order = rank_double_adaptive(&g, &cfg(), &[0, 2], &[true, false]).unwrap();
        assert_eq!(order.order(), &[0, 2, 1, 3]);
        assert_eq!(order.provenance(), "double_adaptive(z=2)");
        let flipped = rank_double_adaptive(&g, &cfg(), &[0, 2], &[false, true]).unwrap();
        assert_eq!(flipped.order(), &[0, 2, 3, 1]);
    }

    #[test]
    fn double_adaptive_degenerate_samples_fall_back() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let all_live = rank_double_adaptive(&g, &cfg(), &[0], &[true]).unwrap();
        let simple = rank_simple_adaptive(&g, &cfg(), &[0], &[true]).unwrap();
        assert_eq!(all_live.order(), simple.order());
        assert_eq!(
            all_live.provenance(),
            "double_adaptive(z=1; fallback=simple_adaptive(z=1))"
        );
        let all_dead = rank_double_adaptive(&g, &cfg(), &[0], &[false]).unwrap();
        assert!(all_dead.provenance().contains("fallback"));
    }

    fn sites_of(assignment: &[u32]) -> SiteMap {
        SiteMap::from_assignments(assignment.to_vec()).unwrap()
    }

    #[test]
    fn asf_live_site_outranks_dead_site() {
        let g = graph(6, &[]);
        let sites = sites_of(&[0, 0, 0, 1, 1, 1]);
        let order = rank_active_site_first(&g, &cfg(), &sites, &[0, 3], &[true, false]).unwrap();
        assert_eq!(order.order(), &[0, 3, 1, 2, 4, 5]);
        assert_eq!(order.provenance(), "active_site_first(z=2)");
    }

    #[test]
    fn asf_equal_activity_breaks_by_site_pagerank() {
        // Node 4 soaks up PageRank, lifting site 1 past site 0 when
        // both look fully alive.
        let g = graph(6, &[(0, 4), (1, 4), (2, 4), (5, 4)]);
        let sites = sites_of(&[0, 0, 0, 1, 1, 1]);
        let a = rank_active_site_first(&g, &cfg(), &sites, &[0, 3], &[true, true]).unwrap();
        let b = rank_active_site_first(&g, &cfg(), &sites, &[0, 3], &[true, true]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.order(), &[0, 3, 4, 5, 1, 2]);
    }

    #[test]
    fn asf_unsampled_sites_go_last() {
        // Site 1 looks fully live (node 3), site 0 half live (node 0
        // live, node 1 dead), site 2 was never sampled so it goes last.
        let g = graph(9, &[]);
        let sites = sites_of(&[0, 0, 0, 1, 1, 1, 2, 2, 2]);
        let order =
            rank_active_site_first(&g, &cfg(), &sites, &[0, 1, 3], &[true, false, true]).unwrap();
        assert_eq!(order.order(), &[0, 1, 3, 4, 5, 2, 6, 7, 8]);
    }

    #[test]
    fn asf_rejects_mismatched_site_map() {
        let g = graph(4, &[]);
        let sites = sites_of(&[0, 0, 1]);
        assert!(rank_active_site_first(&g, &cfg(), &sites, &[0], &[true]).is_err());
    }
}
