//! Experiment execution: dataset assembly, single-run crawls, and the
//! config-driven sweep behind the `run` subcommand.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use liverank::pagerank::{pagerank, uniform_zap, PageRankConfig, ScoreVector};
use liverank::simulate::{
    cost_curve, probe, run_dynamic, run_static, ActivityOracle, CostCurve, CrawlTrace,
};
use liverank::sites::{load_site_map, SiteMap};
use liverank::strategies::{
    dynamic_init, rank_active_site_first, rank_by_scores, rank_double_adaptive, rank_indegree,
    rank_random, rank_simple_adaptive, select_sample, DynamicKind, LiveRankOrder,
};
use liverank::synth::{generate_synthetic, load_labels};
use liverank::DirectedGraph;

use crate::config::{resolve_path, ExperimentConfig, SelectorKind, StrategyKind};
use crate::util::{load_graph_auto, write_atomic, AppError, AppResult};

/// Everything one run needs, loaded or generated once and shared.
pub struct Dataset {
    pub graph: DirectedGraph,
    pub oracle: ActivityOracle,
    pub sites: Option<SiteMap>,
    pub static_pr: ScoreVector,
}

impl Dataset {
    pub fn assemble(
        graph: DirectedGraph,
        oracle: ActivityOracle,
        sites: Option<SiteMap>,
    ) -> AppResult<Self> {
        if oracle.n() != graph.node_count() {
            return Err(AppError::Data(liverank::Error::Shape(format!(
                "graph has {} nodes but the labels cover {}",
                graph.node_count(),
                oracle.n()
            ))));
        }
        let static_pr = pagerank(
            &graph,
            &PageRankConfig::default(),
            &uniform_zap(graph.node_count())?,
        )?;
        Ok(Dataset {
            graph,
            oracle,
            sites,
            static_pr,
        })
    }

    pub fn load_files(
        graph_path: &Path,
        labels_path: &Path,
        urls_path: Option<&Path>,
    ) -> AppResult<Self> {
        let graph = load_graph_auto(graph_path)?;
        let oracle = load_labels(labels_path, graph.node_count())?;
        let sites = urls_path.map(|p| load_site_map(p, &graph)).transpose()?;
        Dataset::assemble(graph, oracle, sites)
    }
}

fn base_order(ds: &Dataset, selector: SelectorKind, seed: u64) -> LiveRankOrder {
    match selector {
        SelectorKind::Random => rank_random(&ds.graph, seed),
        SelectorKind::TopPagerank => rank_by_scores(
            ds.static_pr.as_slice(),
            format!("pagerank(d={})", PageRankConfig::default().damping),
        ),
        SelectorKind::TopIndegree => rank_indegree(&ds.graph),
    }
}

/// Materialize a non-dynamic strategy's full ordering. The sample is
/// probed on a throwaway oracle clone: those labels inform the
/// ordering, while the evaluation crawl still pays for every fetch.
pub fn build_order(
    ds: &Dataset,
    kind: StrategyKind,
    z: Option<usize>,
    selector: SelectorKind,
    seed: u64,
) -> AppResult<LiveRankOrder> {
    let g = &ds.graph;
    let prcfg = PageRankConfig::default();
    let order = match kind {
        StrategyKind::Random => rank_random(g, seed),
        StrategyKind::Indegree => rank_indegree(g),
        StrategyKind::Pagerank => rank_by_scores(
            ds.static_pr.as_slice(),
            format!("pagerank(d={})", prcfg.damping),
        ),
        StrategyKind::Bfs | StrategyKind::ActiveIndegree => {
            return Err(AppError::Config(format!(
                "{} decides its order during the crawl; use `simulate` or `run`",
                kind.name()
            )))
        }
        sampled => {
            let z = z.ok_or_else(|| {
                AppError::Config(format!("strategy {} needs a sample size --z", kind.name()))
            })?;
            let sample = select_sample(&base_order(ds, selector, seed), z)?;
            let labels = probe(&mut ds.oracle.clone(), &sample)?;
            match sampled {
                StrategyKind::SimpleAdaptive => rank_simple_adaptive(g, &prcfg, &sample, &labels)?,
                StrategyKind::DoubleAdaptive => rank_double_adaptive(g, &prcfg, &sample, &labels)?,
                StrategyKind::ActiveSiteFirst => {
                    let sites = ds.sites.as_ref().ok_or_else(|| {
                        AppError::Config(
                            "active_site_first needs site structure (--urls or site_block)".into(),
                        )
                    })?;
                    rank_active_site_first(g, &prcfg, sites, &sample, &labels)?
                }
                _ => unreachable!("static and dynamic kinds handled above"),
            }
        }
    };
    Ok(order)
}

/// Run one full crawl and return its trace. The oracle clone starts at
/// zero fetches, so the trace always covers exactly n paid fetches.
pub fn build_trace(
    ds: &Dataset,
    kind: StrategyKind,
    z: Option<usize>,
    selector: SelectorKind,
    seed: u64,
) -> AppResult<CrawlTrace> {
    if kind.is_dynamic() {
        let z = z.ok_or_else(|| {
            AppError::Config(format!("strategy {} needs a sample size --z", kind.name()))
        })?;
        let sample = select_sample(&base_order(ds, selector, seed), z)?;
        let dk = match kind {
            StrategyKind::Bfs => DynamicKind::Bfs,
            _ => DynamicKind::ActiveIndegree,
        };
        let mut state = dynamic_init(dk, &ds.graph, &ds.static_pr, &sample)?;
        Ok(run_dynamic(&mut state, &ds.graph, &mut ds.oracle.clone())?)
    } else {
        let order = build_order(ds, kind, z, selector, seed)?;
        Ok(run_static(&order, &mut ds.oracle.clone())?)
    }
}

/// Stable run label used as the CSV strategy column: semicolons, not
/// commas, so it stays a single CSV field.
pub fn run_label(
    kind: StrategyKind,
    z: Option<usize>,
    selector: SelectorKind,
    seed: u64,
) -> String {
    let mut label = kind.name().to_string();
    if kind.needs_sample() {
        if let Some(z) = z {
            label.push_str(&format!(";z={z}"));
        }
        label.push_str(&format!(";sel={}", selector.name()));
    }
    label.push_str(&format!(";seed={seed}"));
    label
}

struct RunSpec {
    idx: usize,
    kind: StrategyKind,
    z: Option<usize>,
    selector: SelectorKind,
    seed: u64,
}

impl RunSpec {
    fn label(&self) -> String {
        run_label(self.kind, self.z, self.selector, self.seed)
    }

    fn file_name(&self) -> String {
        format!(
            "run{:03}_{}_seed{}.csv",
            self.idx,
            self.kind.name(),
            self.seed
        )
    }
}

/// Execute every (strategy, seed) run of a config. A failing run is
/// reported and skipped; the others still produce their files. Returns
/// the number of failed runs.
pub fn cmd_run(config_path: &Path, out_override: Option<&Path>) -> AppResult<usize> {
    let text = std::fs::read_to_string(config_path).map_err(|e| {
        AppError::Config(format!("cannot read config {}: {e}", config_path.display()))
    })?;
    let cfg = ExperimentConfig::from_toml_str(&text)?;
    let config_dir = config_path.parent().unwrap_or_else(|| Path::new("."));
    let out_dir = match out_override {
        Some(p) => p.to_path_buf(),
        None => resolve_path(config_dir, &cfg.output.dir),
    };
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| AppError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    let grid = cfg.grid();

    let mut runs = Vec::new();
    for s in &cfg.strategies {
        let kind = StrategyKind::parse(&s.name)?;
        let selector = match &s.selector {
            Some(name) => SelectorKind::parse(name)?,
            None => SelectorKind::default(),
        };
        for &seed in &s.seeds {
            runs.push(RunSpec {
                idx: runs.len(),
                kind,
                z: s.z,
                selector,
                seed,
            });
        }
    }

    // Synthetic datasets are keyed by run seed; file datasets are one
    // shared instance under a single key.
    let mut datasets: BTreeMap<Option<u64>, Arc<Dataset>> = BTreeMap::new();
    if let Some(synth) = &cfg.dataset.synthetic {
        let mut seeds: Vec<u64> = runs.iter().map(|r| r.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        for seed in seeds {
            let generated = generate_synthetic(&synth.to_config(seed)?)?;
            let ds = Dataset::assemble(generated.graph, generated.oracle, generated.sites)?;
            datasets.insert(Some(seed), Arc::new(ds));
        }
    } else {
        let graph_path = resolve_path(config_dir, cfg.dataset.graph.as_ref().unwrap());
        let labels_path = resolve_path(config_dir, cfg.dataset.labels.as_ref().unwrap());
        let urls_path = cfg
            .dataset
            .urls
            .as_ref()
            .map(|p| resolve_path(config_dir, p));
        let ds = Dataset::load_files(&graph_path, &labels_path, urls_path.as_deref())?;
        datasets.insert(None, Arc::new(ds));
    }
    let dataset_for = |seed: u64| -> &Arc<Dataset> {
        datasets
            .get(&Some(seed))
            .or_else(|| datasets.get(&None))
            .expect("every run seed has a dataset")
    };

    let results: Vec<AppResult<CostCurve>> = runs
        .par_iter()
        .map(|spec| {
            let ds = dataset_for(spec.seed);
            let trace = build_trace(ds, spec.kind, spec.z, spec.selector, spec.seed)?;
            let mut curve = cost_curve(&trace, &grid)?;
            curve.strategy = spec.label();
            Ok(curve)
        })
        .collect();

    let mut failed = 0usize;
    let mut succeeded: Vec<&CostCurve> = Vec::new();
    for (spec, result) in runs.iter().zip(&results) {
        match result {
            Ok(curve) => {
                let path = out_dir.join(spec.file_name());
                write_atomic(&path, |w| curve.write_csv(w))?;
                println!("ok {} -> {}", spec.label(), path.display());
                succeeded.push(curve);
            }
            Err(err) => {
                eprintln!("failed {}: {err}", spec.label());
                failed += 1;
            }
        }
    }
    let merged = out_dir.join("merged.csv");
    write_atomic(&merged, |w| {
        writeln!(w, "{}", CostCurve::csv_header())?;
        for curve in &succeeded {
            curve.write_csv_rows(w)?;
        }
        Ok(())
    })?;
    println!(
        "{} runs, {} failed, merged curves in {}",
        runs.len(),
        failed,
        merged.display()
    );
    Ok(failed)
}
