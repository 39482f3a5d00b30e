//! Crawl simulation against ground-truth activity labels, and the cost
//! metric that scores an ordering.
//!
//! The cost of an ordering at a target fraction `alpha` is the number
//! of fetches needed to find `alpha * n_a` of the `n_a` active nodes,
//! normalized by that target count:
//!
//! ```text
//! cost(L, alpha) = i(L, alpha) / (alpha * n_a)
//! ```
//!
//! where `i(L, alpha)` is the smallest prefix length of `L` whose
//! active share reaches `alpha`. An ideal ordering costs 1; a uniform
//! random one costs about `n / n_a` at every `alpha`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::strategies::{DynamicState, LiveRankOrder};

/// Ground-truth labels plus a fetch counter. The counter exists to keep
/// the bookkeeping honest: strategies never see this struct, only the
/// label slices and reports the evaluator chooses to hand them.
#[derive(Debug, Clone)]
pub struct ActivityOracle {
    labels: Vec<bool>,
    active_count: usize,
    fetch_count: usize,
}

impl ActivityOracle {
    pub fn new(labels: Vec<bool>) -> Self {
        let active_count = labels.iter().filter(|&&a| a).count();
        ActivityOracle {
            labels,
            active_count,
            fetch_count: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    pub fn fetch_count(&self) -> usize {
        self.fetch_count
    }

    /// Test one node. Every call is a paid fetch.
    pub fn test(&mut self, v: NodeId) -> Result<bool> {
        let idx = v as usize;
        if idx >= self.labels.len() {
            return Err(Error::NodeOutOfBounds {
                id: v as u64,
                n: self.labels.len(),
            });
        }
        self.fetch_count += 1;
        Ok(self.labels[idx])
    }

    /// Evaluator-side view of the ground truth; does not count as
    /// fetching. Never hand this to a strategy.
    pub fn labels(&self) -> &[bool] {
        &self.labels
    }
}

/// Test a batch of nodes in order, paying one fetch each.
pub fn probe(oracle: &mut ActivityOracle, nodes: &[NodeId]) -> Result<Vec<bool>> {
    nodes.iter().map(|&v| oracle.test(v)).collect()
}

/// The record of one simulated crawl: nodes in fetch order with their
/// observed labels, plus enough context to price any target fraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrawlTrace {
    n: usize,
    active_total: usize,
    steps: Vec<(NodeId, bool)>,
    provenance: String,
}

impl CrawlTrace {
    /// `active_total` is the number of active nodes in the whole
    /// snapshot, not just in `steps`; a partial trace still needs it to
    /// price what it did reach.
    pub fn new(
        n: usize,
        active_total: usize,
        steps: Vec<(NodeId, bool)>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if active_total > n || steps.len() > n {
            return Err(Error::Shape(format!(
                "trace of {} steps / {active_total} active does not fit n={n}",
                steps.len()
            )));
        }
        let mut seen = vec![false; n];
        let mut active_seen = 0usize;
        for &(v, label) in &steps {
            let idx = v as usize;
            if idx >= n {
                return Err(Error::NodeOutOfBounds { id: v as u64, n });
            }
            if seen[idx] {
                return Err(Error::Precondition(format!(
                    "node {v} fetched twice in one trace"
                )));
            }
            seen[idx] = true;
            active_seen += label as usize;
        }
        if active_seen > active_total || (steps.len() == n && active_seen != active_total) {
            return Err(Error::Shape(format!(
                "trace contains {active_seen} active nodes but claims {active_total} in total"
            )));
        }
        Ok(CrawlTrace {
            n,
            active_total,
            steps,
            provenance: provenance.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn active_total(&self) -> usize {
        self.active_total
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[(NodeId, bool)] {
        &self.steps
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// 1-based fetch indices at which the k-th active node appeared.
    fn active_positions(&self) -> Vec<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, &(_, label))| label)
            .map(|(idx, _)| idx + 1)
            .collect()
    }

    /// CSV with one row per fetch, labels as 0/1.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "node_id,label")?;
        for &(v, label) in &self.steps {
            writeln!(w, "{v},{}", label as u8)?;
        }
        Ok(())
    }
}

/// Crawl every node in the fixed order, paying one fetch per node.
pub fn run_static(order: &LiveRankOrder, oracle: &mut ActivityOracle) -> Result<CrawlTrace> {
    if order.len() != oracle.n() {
        return Err(Error::Shape(format!(
            "order covers {} nodes, oracle has {}",
            order.len(),
            oracle.n()
        )));
    }
    let mut steps = Vec::with_capacity(order.len());
    for &v in order.order() {
        steps.push((v, oracle.test(v)?));
    }
    CrawlTrace::new(oracle.n(), oracle.active_count(), steps, order.provenance())
}

/// Drive a dynamic strategy to exhaustion, reporting each label back
/// before asking for the next node.
pub fn run_dynamic(
    state: &mut DynamicState,
    g: &DirectedGraph,
    oracle: &mut ActivityOracle,
) -> Result<CrawlTrace> {
    if g.node_count() != oracle.n() {
        return Err(Error::Shape(format!(
            "graph has {} nodes, oracle has {}",
            g.node_count(),
            oracle.n()
        )));
    }
    let mut steps = Vec::with_capacity(oracle.n());
    while let Some(v) = state.next_node() {
        let label = oracle.test(v)?;
        state.report(v, label, g)?;
        steps.push((v, label));
    }
    CrawlTrace::new(oracle.n(), oracle.active_count(), steps, state.provenance())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Precondition(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    Ok(())
}

/// Cost of the crawl at one target fraction: the 1-based fetch index at
/// which the found share first reaches `alpha`, divided by
/// `alpha * active_total`. Errors if the trace never got that far.
pub fn cost_at(trace: &CrawlTrace, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let n_a = trace.active_total();
    if n_a == 0 {
        return Err(Error::Precondition(
            "cost is undefined when no node is active".into(),
        ));
    }
    let mut found = 0usize;
    for (idx, &(_, label)) in trace.steps().iter().enumerate() {
        found += label as usize;
        if found as f64 / n_a as f64 >= alpha {
            return Ok((idx + 1) as f64 / (alpha * n_a as f64));
        }
    }
    Err(Error::Unreachable(format!(
        "trace of {} fetches found {found}/{n_a} active nodes, short of alpha={alpha}",
        trace.len()
    )))
}

/// One (alpha, cost) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostPoint {
    pub alpha: f64,
    pub cost: f64,
}

/// A priced crawl: cost at each requested target fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct CostCurve {
    pub strategy: String,
    pub n: usize,
    pub n_active: usize,
    pub points: Vec<CostPoint>,
}

impl CostCurve {
    pub fn csv_header() -> &'static str {
        "strategy,n,n_a,alpha,cost"
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "{}", Self::csv_header())?;
        self.write_csv_rows(w)
    }

    /// Rows only, for merging several curves under one header.
    pub fn write_csv_rows(&self, w: &mut impl Write) -> std::io::Result<()> {
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.strategy,
                self.n,
                self.n_active,
                fmt_sig6(p.alpha),
                fmt_sig6(p.cost)
            )?;
        }
        Ok(())
    }
}

/// Price a trace on a whole alpha grid in one pass over the trace.
/// Point for point identical to calling [`cost_at`] per alpha.
pub fn cost_curve(trace: &CrawlTrace, alphas: &[f64]) -> Result<CostCurve> {
    let n_a = trace.active_total();
    if n_a == 0 {
        return Err(Error::Precondition(
            "cost is undefined when no node is active".into(),
        ));
    }
    for &alpha in alphas {
        check_alpha(alpha)?;
    }
    let positions = trace.active_positions();
    let mut points = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        // Smallest active count whose share clears alpha, tested with
        // the same float predicate cost_at uses.
        let need = (1..=n_a).find(|&c| c as f64 / n_a as f64 >= alpha);
        let i = match need {
            Some(c) if c <= positions.len() => positions[c - 1],
            _ => {
                return Err(Error::Unreachable(format!(
                    "trace of {} fetches found {}/{n_a} active nodes, short of alpha={alpha}",
                    trace.len(),
                    positions.len()
                )))
            }
        };
        points.push(CostPoint {
            alpha,
            cost: i as f64 / (alpha * n_a as f64),
        });
    }
    Ok(CostCurve {
        strategy: trace.provenance().to_string(),
        n: trace.n(),
        n_active: n_a,
        points,
    })
}

/// Fifty evenly spaced target fractions ending exactly at 1.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=50).map(|k| k as f64 / 50.0).collect()
}

/// Shortest decimal form of `x` rounded to 6 significant digits.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(5 - mag);
    let rounded = (x * scale).round() / scale;
    format!("{rounded}")
}
