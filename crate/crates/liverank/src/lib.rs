//! LiveRank: orderings of an old graph snapshot that put still-active
//! nodes first, and a simulated-crawl harness to score them.
//!
//! Given a snapshot `G = (V, E)` of a linked collection (web pages,
//! social accounts) and a way to test whether a node is still active,
//! the goal is to find a large fraction of the active nodes with as few
//! tests as possible. A LiveRank is an ordering of `V` meant to make
//! that cheap; its quality is the average number of tests spent per
//! active node found, as a function of the target fraction.
//!
//! The crate provides:
//!
//! - [`graph`]: compressed immutable digraph, edge-list ingest, binary cache;
//! - [`pagerank`]: power-iteration solver with configurable zap vectors;
//! - [`strategies`]: static, sample-based and dynamic orderings;
//! - [`simulate`]: crawl simulation against ground-truth labels and the
//!   cost-curve metric;
//! - [`synth`]: synthetic graphs with structure-correlated activity,
//!   label-file loading and liveness/structure CDF reports.

pub mod error;
pub mod graph;
pub mod pagerank;
pub mod simulate;
pub mod sites;
pub mod strategies;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{DirectedGraph, NodeId};
pub use pagerank::{pagerank, subset_zap, uniform_zap, PageRankConfig, ScoreVector};
pub use simulate::{cost_at, cost_curve, ActivityOracle, CostCurve, CrawlTrace};
pub use sites::SiteMap;
pub use strategies::{LiveRankOrder, SampleSpec, Selector};
pub use synth::{generate_synthetic, ActivityModel, SyntheticConfig, SyntheticDataset};
