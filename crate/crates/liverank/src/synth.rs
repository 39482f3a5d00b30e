//! Synthetic datasets: seeded graphs with activity labels correlated
//! to structure, plus loaders for real label files and the CDF
//! diagnostics that show how strong that correlation is.
//!
//! Two activity models cover the two regimes the strategies care
//! about. `site_block` kills whole sites at once, so idleness spreads
//! along links and anti-seeded PageRank has something to learn from.
//! `rank_logistic` ties each node's survival odds to its own PageRank
//! rank and nothing else, so there is no idleness diffusion at all.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::pagerank::{pagerank, uniform_zap, PageRankConfig, ScoreVector};
use crate::simulate::{fmt_sig6, ActivityOracle};
use crate::sites::SiteMap;
use crate::strategies::argsort_desc;

/// Share of edges redirected to a random node of the source's own
/// site under the `site_block` model. High locality is what lets a
/// few sampled nodes speak for their whole site.
pub const INTRA_SITE_EDGE_PROB: f64 = 0.8;

/// Share of attachment draws whose edge points old-to-new instead of
/// new-to-old. Pure new-to-old attachment yields a DAG where walks can
/// only move toward the oldest core, so restart-based scores treat
/// most of the graph as unreachable; real link graphs are nothing like
/// that. A modest back-link share makes the giant component strongly
/// connected while attachment order stays visible in the degrees.
pub const BACKLINK_EDGE_PROB: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActivityModel {
    /// Each node stays active with probability
    /// `logistic(slope * (median_rank - rank) / n)`, rescaled so the
    /// expected active fraction is `base_rate`. Rank is the node's
    /// position in the static PageRank order.
    RankLogistic { base_rate: f64, slope: f64 },
    /// Nodes are split into contiguous blocks of ids, one per site.
    /// Whole sites die at once; the per-site death probability
    /// averages `site_death_prob` but leans toward structurally weak
    /// sites (low mean in-degree), so survival correlates with
    /// importance. Nodes of surviving sites flip inactive with
    /// probability `within_site_noise`.
    SiteBlock {
        site_count: usize,
        site_death_prob: f64,
        within_site_noise: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub n: usize,
    /// Mean out-degree of the preferential-attachment generator.
    pub attachment_out_mean: f64,
    pub activity_model: ActivityModel,
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Precondition("n must be at least 1".into()));
        }
        if !(self.attachment_out_mean >= 0.0 && self.attachment_out_mean.is_finite()) {
            return Err(Error::Precondition(format!(
                "attachment_out_mean must be finite and non-negative, got {}",
                self.attachment_out_mean
            )));
        }
        match self.activity_model {
            ActivityModel::RankLogistic { base_rate, slope } => {
                if !(base_rate > 0.0 && base_rate < 1.0) {
                    return Err(Error::Precondition(format!(
                        "base_rate must lie in (0, 1), got {base_rate}"
                    )));
                }
                if !slope.is_finite() {
                    return Err(Error::Precondition("slope must be finite".into()));
                }
            }
            ActivityModel::SiteBlock {
                site_count,
                site_death_prob,
                within_site_noise,
            } => {
                if site_count < 1 || site_count > self.n {
                    return Err(Error::Precondition(format!(
                        "site_count must lie in 1..={}, got {site_count}",
                        self.n
                    )));
                }
                for (name, p) in [
                    ("site_death_prob", site_death_prob),
                    ("within_site_noise", within_site_noise),
                ] {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::Precondition(format!(
                            "{name} must lie in [0, 1], got {p}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A generated snapshot: structure, ground-truth labels, and the site
/// partition when the model has one.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub graph: DirectedGraph,
    pub oracle: ActivityOracle,
    pub sites: Option<SiteMap>,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Preferential attachment via a repeat pool: every node enters once
/// on arrival and once more per draw received, so partners are chosen
/// proportionally to 1 + times drawn. Most edges point from the new
/// node to its drawn partner; a [`BACKLINK_EDGE_PROB`] share points
/// the other way. Node 0 draws nothing on arrival.
fn preferential_edges(n: usize, out_mean: f64, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let mut edges = Vec::with_capacity((out_mean * n as f64) as usize);
    let mut pool: Vec<NodeId> = Vec::with_capacity(n + edges.capacity());
    pool.push(0);
    let base = out_mean.floor();
    let extra_prob = out_mean - base;
    for v in 1..n as u32 {
        let degree = base as usize + rng.random_bool(extra_prob) as usize;
        for _ in 0..degree {
            let t = pool[rng.random_range(0..pool.len())];
            if rng.random_bool(BACKLINK_EDGE_PROB) {
                edges.push((t, v));
            } else {
                edges.push((v, t));
            }
            pool.push(t);
        }
        pool.push(v);
    }
    edges
}

/// Contiguous balanced blocks: node `v` belongs to site
/// `v * site_count / n`.
fn block_assignment(n: usize, site_count: usize) -> Vec<u32> {
    (0..n)
        .map(|v| (v as u64 * site_count as u64 / n as u64) as u32)
        .collect()
}

pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<SyntheticDataset> {
    cfg.validate()?;
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges = preferential_edges(n, cfg.attachment_out_mean, &mut rng);

    match cfg.activity_model {
        ActivityModel::RankLogistic { base_rate, slope } => {
            let graph = DirectedGraph::from_edges(n, &edges, true)?;
            let pr = pagerank(&graph, &PageRankConfig::default(), &uniform_zap(n)?)?;
            let order = argsort_desc(pr.as_slice());
            let mut rank = vec![0usize; n];
            for (r, &v) in order.iter().enumerate() {
                rank[v as usize] = r;
            }
            let median = n as f64 / 2.0;
            let raw: Vec<f64> = (0..n)
                .map(|v| logistic(slope * (median - rank[v] as f64) / n as f64))
                .collect();
            let scale = base_rate * n as f64 / raw.iter().sum::<f64>();
            let labels: Vec<bool> = raw
                .iter()
                .map(|&r| rng.random_bool((scale * r).min(1.0)))
                .collect();
            Ok(SyntheticDataset {
                graph,
                oracle: ActivityOracle::new(labels),
                sites: None,
            })
        }
        ActivityModel::SiteBlock {
            site_count,
            site_death_prob,
            within_site_noise,
        } => {
            let assignment = block_assignment(n, site_count);
            let sites = SiteMap::from_assignments(assignment)?;
            for e in edges.iter_mut() {
                if rng.random_bool(INTRA_SITE_EDGE_PROB) {
                    let members = sites.members(sites.site_of(e.0));
                    let t = members[rng.random_range(0..members.len())];
                    if t != e.0 {
                        e.1 = t;
                    }
                }
            }
            let graph = DirectedGraph::from_edges(n, &edges, true)?;

            // Death probability is graded around the configured mean:
            // sites ranked by mean member in-degree, the strongest
            // getting the lowest probability. Half the maximal spread
            // keeps the mean at site_death_prob while leaving every
            // site genuinely stochastic, so structure correlates with
            // survival without determining it.
            let mean_indeg: Vec<f64> = (0..site_count as u32)
                .map(|s| {
                    let members = sites.members(s);
                    members
                        .iter()
                        .map(|&v| graph.in_degree(v) as f64)
                        .sum::<f64>()
                        / members.len() as f64
                })
                .collect();
            let ranked = argsort_desc(&mean_indeg);
            let beta = site_death_prob.min(1.0 - site_death_prob);
            let mut dead = vec![false; site_count];
            for (r, &site) in ranked.iter().enumerate() {
                let q = if site_count > 1 {
                    r as f64 / (site_count - 1) as f64
                } else {
                    0.5
                };
                let p = (site_death_prob + beta * (q - 0.5)).clamp(0.0, 1.0);
                dead[site as usize] = rng.random_bool(p);
            }
            let labels: Vec<bool> = (0..n as u32)
                .map(|v| {
                    if dead[sites.site_of(v) as usize] {
                        false
                    } else {
                        !rng.random_bool(within_site_noise)
                    }
                })
                .collect();
            Ok(SyntheticDataset {
                graph,
                oracle: ActivityOracle::new(labels),
                sites: Some(sites),
            })
        }
    }
}

/// Read ground-truth labels. Two formats, told apart by shape: a file
/// with exactly `n` lines all `0`/`1` is dense (one label per node in
/// id order); anything else is a list of active node ids.
pub fn load_labels(path: &Path, n: usize) -> Result<ActivityOracle> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut tokens: Vec<(usize, String)> = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        tokens.push((idx + 1, body.to_string()));
    }
    let dense = tokens.len() == n && tokens.iter().all(|(_, t)| t == "0" || t == "1");
    if dense {
        return Ok(ActivityOracle::new(
            tokens.iter().map(|(_, t)| t == "1").collect(),
        ));
    }
    let mut labels = vec![false; n];
    for (lineno, token) in &tokens {
        let id: u64 = token
            .parse()
            .map_err(|_| Error::parse(path, *lineno, format!("bad node id {token:?}")))?;
        if id >= n as u64 {
            return Err(Error::NodeOutOfBounds { id, n });
        }
        if labels[id as usize] {
            return Err(Error::parse(
                path,
                *lineno,
                format!("node {id} listed as active twice"),
            ));
        }
        labels[id as usize] = true;
    }
    Ok(ActivityOracle::new(labels))
}

/// Empirical CDF: sorted `(value, cumulative fraction)` pairs, one per
/// distinct value, ending at 1.0 unless the sample is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Cdf {
    points: Vec<(f64, f64)>,
}

impl Cdf {
    pub fn from_values(mut values: Vec<f64>) -> Cdf {
        values.sort_unstable_by(f64::total_cmp);
        let len = values.len();
        let mut points = Vec::new();
        let mut i = 0;
        while i < len {
            let v = values[i];
            let mut j = i;
            while j < len && values[j] == v {
                j += 1;
            }
            points.push((v, j as f64 / len as f64));
            i = j;
        }
        Cdf { points }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Fraction of the sample with value <= x.
    pub fn fraction_at(&self, x: f64) -> f64 {
        let idx = self.points.partition_point(|&(v, _)| v <= x);
        if idx == 0 {
            0.0
        } else {
            self.points[idx - 1].1
        }
    }
}

/// In-degree and PageRank CDFs split by activity group. A visibly
/// right-shifted active curve is what makes structure-driven
/// orderings work at all.
#[derive(Debug, Clone, PartialEq)]
pub struct LivenessCdfReport {
    pub indegree_active: Cdf,
    pub indegree_inactive: Cdf,
    pub indegree_all: Cdf,
    pub pagerank_active: Cdf,
    pub pagerank_inactive: Cdf,
    pub pagerank_all: Cdf,
}

impl LivenessCdfReport {
    fn rows(&self) -> [(&'static str, &'static str, &Cdf); 6] {
        [
            ("indegree", "active", &self.indegree_active),
            ("indegree", "inactive", &self.indegree_inactive),
            ("indegree", "all", &self.indegree_all),
            ("pagerank", "active", &self.pagerank_active),
            ("pagerank", "inactive", &self.pagerank_inactive),
            ("pagerank", "all", &self.pagerank_all),
        ]
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "metric,group,value,cum_frac")?;
        for (metric, group, cdf) in self.rows() {
            for &(value, frac) in cdf.points() {
                writeln!(w, "{metric},{group},{},{}", fmt_sig6(value), fmt_sig6(frac))?;
            }
        }
        Ok(())
    }
}

pub fn liveness_cdf_report(
    g: &DirectedGraph,
    oracle: &ActivityOracle,
    static_pr: &ScoreVector,
) -> Result<LivenessCdfReport> {
    let n = g.node_count();
    if oracle.n() != n || static_pr.len() != n {
        return Err(Error::Shape(format!(
            "graph has {n} nodes, oracle {} and scores {}",
            oracle.n(),
            static_pr.len()
        )));
    }
    let labels = oracle.labels();
    let split = |values: &dyn Fn(NodeId) -> f64| {
        let mut active = Vec::new();
        let mut inactive = Vec::new();
        let mut all = Vec::with_capacity(n);
        for v in 0..n as u32 {
            let x = values(v);
            if labels[v as usize] {
                active.push(x);
            } else {
                inactive.push(x);
            }
            all.push(x);
        }
        (
            Cdf::from_values(active),
            Cdf::from_values(inactive),
            Cdf::from_values(all),
        )
    };
    let (indegree_active, indegree_inactive, indegree_all) = split(&|v| g.in_degree(v) as f64);
    let (pagerank_active, pagerank_inactive, pagerank_all) = split(&|v| static_pr.get(v));
    Ok(LivenessCdfReport {
        indegree_active,
        indegree_inactive,
        indegree_all,
        pagerank_active,
        pagerank_inactive,
        pagerank_all,
    })
}
