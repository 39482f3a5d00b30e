//! liverank: order an old snapshot's nodes so the still-active ones
//! come first, then measure how much crawling that saves.

mod config;
mod runner;
mod util;

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use liverank::pagerank::{pagerank, uniform_zap, PageRankConfig};
use liverank::simulate::{cost_at, cost_curve, default_alpha_grid, fmt_sig6};
use liverank::sites::synthetic_url;
use liverank::synth::{generate_synthetic, liveness_cdf_report, load_labels, ActivityModel};
use liverank::DirectedGraph;

use config::{SelectorKind, StrategyKind, SyntheticSection};
use runner::Dataset;
use util::{load_graph_auto, write_atomic, AppError, AppResult};

#[derive(Parser)]
#[command(
    name = "liverank",
    version,
    about = "LiveRank orderings and crawl cost evaluation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an edge list, print structure stats, write a binary cache.
    Ingest {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute static PageRank scores (text, or binary when --out ends in .bin).
    Pagerank {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one strategy's complete node ordering.
    Rank {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        urls: Option<PathBuf>,
        #[arg(long)]
        strategy: String,
        /// Sample size for sample-based strategies.
        #[arg(long)]
        z: Option<usize>,
        /// Sample selector: random, top_pagerank, or top_indegree.
        #[arg(long)]
        selector: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Crawl the whole graph in strategy order; write trace and cost curve.
    Simulate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        urls: Option<PathBuf>,
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        z: Option<usize>,
        #[arg(long)]
        selector: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated target fractions in (0, 1].
        #[arg(long, value_delimiter = ',')]
        alpha_grid: Option<Vec<f64>>,
        /// Output directory for trace.csv and curve.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic snapshot: edge list, labels, urls.
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10.0)]
        out_mean: f64,
        /// Activity model: rank_logistic or site_block.
        #[arg(long)]
        model: String,
        #[arg(long)]
        base_rate: Option<f64>,
        #[arg(long)]
        slope: Option<f64>,
        #[arg(long)]
        site_count: Option<usize>,
        #[arg(long)]
        site_death_prob: Option<f64>,
        #[arg(long)]
        within_site_noise: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Liveness-vs-structure CDF report for a labeled snapshot.
    Stats {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Execute every (strategy, seed) run described by a config file.
    Run {
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(err.exit_code());
        }
    }
}

fn dispatch(cli: Cli) -> AppResult<i32> {
    init_workers()?;
    match cli.cmd {
        Cmd::Ingest { graph, out } => cmd_ingest(&graph, &out)?,
        Cmd::Pagerank { graph, out } => cmd_pagerank(&graph, &out)?,
        Cmd::Rank {
            graph,
            labels,
            urls,
            strategy,
            z,
            selector,
            seed,
            out,
        } => cmd_rank(
            &graph,
            labels.as_deref(),
            urls.as_deref(),
            &strategy,
            z,
            selector.as_deref(),
            seed,
            &out,
        )?,
        Cmd::Simulate {
            graph,
            labels,
            urls,
            strategy,
            z,
            selector,
            seed,
            alpha_grid,
            out,
        } => cmd_simulate(
            &graph,
            &labels,
            urls.as_deref(),
            &strategy,
            z,
            selector.as_deref(),
            seed,
            alpha_grid,
            &out,
        )?,
        Cmd::Synth {
            n,
            out_mean,
            model,
            base_rate,
            slope,
            site_count,
            site_death_prob,
            within_site_noise,
            seed,
            out,
        } => {
            let section = SyntheticSection {
                n,
                attachment_out_mean: out_mean,
                model,
                base_rate,
                slope,
                site_count,
                site_death_prob,
                within_site_noise,
            };
            cmd_synth(&section, seed, &out)?
        }
        Cmd::Stats { graph, labels, out } => cmd_stats(&graph, &labels, &out)?,
        Cmd::Run { config, out } => {
            let failed = runner::cmd_run(&config, out.as_deref())?;
            if failed > 0 {
                return Ok(4);
            }
        }
    }
    Ok(0)
}

/// Honor LIVERANK_WORKERS when set; otherwise rayon picks the default.
fn init_workers() -> AppResult<()> {
    if let Ok(raw) = std::env::var("LIVERANK_WORKERS") {
        let workers: usize = raw.parse().map_err(|_| {
            AppError::Config(format!("LIVERANK_WORKERS must be a count, got {raw:?}"))
        })?;
        if workers == 0 {
            return Err(AppError::Config(
                "LIVERANK_WORKERS must be at least 1".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| AppError::Runtime(format!("cannot size the worker pool: {e}")))?;
    }
    Ok(())
}

fn parse_selector(selector: Option<&str>) -> AppResult<SelectorKind> {
    match selector {
        Some(name) => SelectorKind::parse(name),
        None => Ok(SelectorKind::default()),
    }
}

fn print_graph_summary(g: &DirectedGraph) {
    let n = g.node_count();
    let m = g.edge_count();
    let mean = if n == 0 { 0.0 } else { m as f64 / n as f64 };
    let max_out = g.node_ids().map(|v| g.out_degree(v)).max().unwrap_or(0);
    let max_in = g.node_ids().map(|v| g.in_degree(v)).max().unwrap_or(0);
    let dangling = g.node_ids().filter(|&v| g.out_degree(v) == 0).count();
    println!("nodes: {n}");
    println!("edges: {m}");
    println!("out-degree: mean {} max {max_out}", fmt_sig6(mean));
    println!("in-degree: mean {} max {max_in}", fmt_sig6(mean));
    println!("dangling: {dangling}");
}

fn cmd_ingest(graph: &Path, out: &Path) -> AppResult<()> {
    let g = load_graph_auto(graph)?;
    print_graph_summary(&g);
    g.save_cache(out)?;
    println!("cache: {}", out.display());
    Ok(())
}

fn cmd_pagerank(graph: &Path, out: &Path) -> AppResult<()> {
    let g = load_graph_auto(graph)?;
    let scores = pagerank(
        &g,
        &PageRankConfig::default(),
        &uniform_zap(g.node_count())?,
    )?;
    if out.extension().is_some_and(|e| e == "bin") {
        scores.write_binary(out)?;
    } else {
        write_atomic(out, |w| scores.write_text(w))?;
    }
    println!("scores: {}", out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_rank(
    graph: &Path,
    labels: Option<&Path>,
    urls: Option<&Path>,
    strategy: &str,
    z: Option<usize>,
    selector: Option<&str>,
    seed: u64,
    out: &Path,
) -> AppResult<()> {
    let kind = StrategyKind::parse(strategy)?;
    if kind.is_dynamic() {
        return Err(AppError::Config(format!(
            "{} decides its order during the crawl; use `simulate` or `run`",
            kind.name()
        )));
    }
    let selector = parse_selector(selector)?;
    let ds = if kind.needs_sample() {
        let labels = labels
            .ok_or_else(|| AppError::Config(format!("strategy {} needs --labels", kind.name())))?;
        Dataset::load_files(graph, labels, urls)?
    } else {
        // Static orders never look at labels; a trivially all-dead
        // oracle keeps the dataset plumbing uniform.
        let g = load_graph_auto(graph)?;
        let n = g.node_count();
        Dataset::assemble(g, liverank::ActivityOracle::new(vec![false; n]), None)?
    };
    let order = runner::build_order(&ds, kind, z, selector, seed)?;
    write_atomic(out, |w| order.write_text(w))?;
    println!("order ({}): {}", order.provenance(), out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    graph: &Path,
    labels: &Path,
    urls: Option<&Path>,
    strategy: &str,
    z: Option<usize>,
    selector: Option<&str>,
    seed: u64,
    alpha_grid: Option<Vec<f64>>,
    out: &Path,
) -> AppResult<()> {
    let kind = StrategyKind::parse(strategy)?;
    let selector = parse_selector(selector)?;
    let grid = match alpha_grid {
        Some(grid) => {
            if grid.is_empty() || grid.iter().any(|&a| !(a > 0.0 && a <= 1.0)) {
                return Err(AppError::Config(
                    "--alpha-grid values must lie in (0, 1]".into(),
                ));
            }
            grid
        }
        None => default_alpha_grid(),
    };
    let ds = Dataset::load_files(graph, labels, urls)?;
    let trace = runner::build_trace(&ds, kind, z, selector, seed)?;
    let mut curve = cost_curve(&trace, &grid)?;
    curve.strategy = runner::run_label(kind, z, selector, seed);

    std::fs::create_dir_all(out)
        .map_err(|e| AppError::Runtime(format!("cannot create {}: {e}", out.display())))?;
    let trace_path = out.join("trace.csv");
    let curve_path = out.join("curve.csv");
    write_atomic(&trace_path, |w| trace.write_csv(w))?;
    write_atomic(&curve_path, |w| curve.write_csv(w))?;

    println!(
        "n: {}  active: {}  fetches: {}",
        trace.n(),
        trace.active_total(),
        trace.len()
    );
    for alpha in [0.2, 0.5, 1.0] {
        if trace.active_total() > 0 {
            println!("cost(alpha={alpha}): {}", fmt_sig6(cost_at(&trace, alpha)?));
        }
    }
    println!("trace: {}", trace_path.display());
    println!("curve: {}", curve_path.display());
    Ok(())
}

fn cmd_synth(section: &SyntheticSection, seed: u64, out: &Path) -> AppResult<()> {
    let cfg = section.to_config(seed)?;
    let data = generate_synthetic(&cfg)?;
    std::fs::create_dir_all(out)
        .map_err(|e| AppError::Runtime(format!("cannot create {}: {e}", out.display())))?;

    let g = &data.graph;
    let edges_path = out.join("edges.txt");
    write_atomic(&edges_path, |w| {
        writeln!(w, "# {} {}", g.node_count(), g.edge_count())?;
        for u in g.node_ids() {
            for &v in g.out_neighbors(u) {
                writeln!(w, "{u} {v}")?;
            }
        }
        Ok(())
    })?;
    let labels_path = out.join("labels.txt");
    write_atomic(&labels_path, |w| {
        for &active in data.oracle.labels() {
            writeln!(w, "{}", u8::from(active))?;
        }
        Ok(())
    })?;
    println!("edges: {}", edges_path.display());
    println!("labels: {}", labels_path.display());
    if let Some(sites) = &data.sites {
        let urls_path = out.join("urls.txt");
        write_atomic(&urls_path, |w| {
            for v in g.node_ids() {
                writeln!(w, "{}", synthetic_url(sites.site_of(v), v))?;
            }
            Ok(())
        })?;
        println!("urls: {}", urls_path.display());
    }
    let model = match cfg.activity_model {
        ActivityModel::RankLogistic { .. } => "rank_logistic",
        ActivityModel::SiteBlock { .. } => "site_block",
    };
    println!(
        "n: {}  m: {}  active: {}  model: {model}",
        g.node_count(),
        g.edge_count(),
        data.oracle.active_count()
    );
    Ok(())
}

fn cmd_stats(graph: &Path, labels: &Path, out: &Path) -> AppResult<()> {
    let g = load_graph_auto(graph)?;
    let oracle = load_labels(labels, g.node_count())?;
    let scores = pagerank(
        &g,
        &PageRankConfig::default(),
        &uniform_zap(g.node_count())?,
    )?;
    let report = liveness_cdf_report(&g, &oracle, &scores)?;
    write_atomic(out, |w| report.write_csv(w))?;
    println!(
        "n: {}  active: {}  report: {}",
        g.node_count(),
        oracle.active_count(),
        out.display()
    );
    Ok(())
}
