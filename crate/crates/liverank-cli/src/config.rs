//! Versioned experiment configuration. A config file fully determines
//! every output byte of `run`: dataset, alpha grid, and one run per
//! (strategy, seed) pair.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use liverank::simulate::default_alpha_grid;
use liverank::synth::{ActivityModel, SyntheticConfig};

use crate::util::{AppError, AppResult};

pub const CONFIG_VERSION: u32 = 1;

/// The eight strategies the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Random,
    Indegree,
    Pagerank,
    SimpleAdaptive,
    DoubleAdaptive,
    ActiveSiteFirst,
    Bfs,
    ActiveIndegree,
}

impl StrategyKind {
    pub fn parse(name: &str) -> AppResult<Self> {
        Ok(match name {
            "random" => StrategyKind::Random,
            "indegree" => StrategyKind::Indegree,
            "pagerank" => StrategyKind::Pagerank,
            "simple_adaptive" => StrategyKind::SimpleAdaptive,
            "double_adaptive" => StrategyKind::DoubleAdaptive,
            "active_site_first" => StrategyKind::ActiveSiteFirst,
            "bfs" => StrategyKind::Bfs,
            "active_indegree" => StrategyKind::ActiveIndegree,
            other => {
                return Err(AppError::Config(format!(
                    "unknown strategy {other:?}; expected one of random, indegree, pagerank, \
                     simple_adaptive, double_adaptive, active_site_first, bfs, active_indegree"
                )))
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Random => "random",
            StrategyKind::Indegree => "indegree",
            StrategyKind::Pagerank => "pagerank",
            StrategyKind::SimpleAdaptive => "simple_adaptive",
            StrategyKind::DoubleAdaptive => "double_adaptive",
            StrategyKind::ActiveSiteFirst => "active_site_first",
            StrategyKind::Bfs => "bfs",
            StrategyKind::ActiveIndegree => "active_indegree",
        }
    }

    /// Sample-based and dynamic strategies test a training prefix.
    pub fn needs_sample(self) -> bool {
        !matches!(
            self,
            StrategyKind::Random | StrategyKind::Indegree | StrategyKind::Pagerank
        )
    }

    pub fn needs_sites(self) -> bool {
        self == StrategyKind::ActiveSiteFirst
    }

    pub fn is_dynamic(self) -> bool {
        matches!(self, StrategyKind::Bfs | StrategyKind::ActiveIndegree)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectorKind {
    Random,
    #[default]
    TopPagerank,
    TopIndegree,
}

impl SelectorKind {
    pub fn parse(name: &str) -> AppResult<Self> {
        Ok(match name {
            "random" => SelectorKind::Random,
            "top_pagerank" => SelectorKind::TopPagerank,
            "top_indegree" => SelectorKind::TopIndegree,
            other => {
                return Err(AppError::Config(format!(
                    "unknown selector {other:?}; expected random, top_pagerank or top_indegree"
                )))
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SelectorKind::Random => "random",
            SelectorKind::TopPagerank => "top_pagerank",
            SelectorKind::TopIndegree => "top_indegree",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub dataset: DatasetSection,
    #[serde(default)]
    pub alpha_grid: Option<Vec<f64>>,
    pub output: OutputSection,
    #[serde(rename = "strategy", default)]
    pub strategies: Vec<StrategySection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub graph: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub urls: Option<PathBuf>,
    pub synthetic: Option<SyntheticSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSection {
    pub n: usize,
    pub attachment_out_mean: f64,
    pub model: String,
    pub base_rate: Option<f64>,
    pub slope: Option<f64>,
    pub site_count: Option<usize>,
    pub site_death_prob: Option<f64>,
    pub within_site_noise: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySection {
    pub name: String,
    pub seeds: Vec<u64>,
    pub z: Option<usize>,
    pub selector: Option<String>,
}

impl SyntheticSection {
    /// Assemble the generator config for one seed; field requirements
    /// depend on the model.
    pub fn to_config(&self, seed: u64) -> AppResult<SyntheticConfig> {
        let model = match self.model.as_str() {
            "rank_logistic" => {
                if self.site_count.is_some()
                    || self.site_death_prob.is_some()
                    || self.within_site_noise.is_some()
                {
                    return Err(AppError::Config(
                        "rank_logistic does not take site_* fields".into(),
                    ));
                }
                ActivityModel::RankLogistic {
                    base_rate: self.base_rate.ok_or_else(|| {
                        AppError::Config("rank_logistic requires base_rate".into())
                    })?,
                    slope: self
                        .slope
                        .ok_or_else(|| AppError::Config("rank_logistic requires slope".into()))?,
                }
            }
            "site_block" => {
                if self.base_rate.is_some() || self.slope.is_some() {
                    return Err(AppError::Config(
                        "site_block does not take base_rate or slope".into(),
                    ));
                }
                ActivityModel::SiteBlock {
                    site_count: self
                        .site_count
                        .ok_or_else(|| AppError::Config("site_block requires site_count".into()))?,
                    site_death_prob: self.site_death_prob.ok_or_else(|| {
                        AppError::Config("site_block requires site_death_prob".into())
                    })?,
                    within_site_noise: self.within_site_noise.ok_or_else(|| {
                        AppError::Config("site_block requires within_site_noise".into())
                    })?,
                }
            }
            other => {
                return Err(AppError::Config(format!(
                    "unknown synthetic model {other:?}; expected rank_logistic or site_block"
                )))
            }
        };
        let cfg = SyntheticConfig {
            n: self.n,
            attachment_out_mean: self.attachment_out_mean,
            activity_model: model,
            seed,
        };
        cfg.validate().map_err(AppError::from)?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> AppResult<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)
            .map_err(|e| AppError::Config(format!("cannot parse config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> AppResult<()> {
        if self.version != CONFIG_VERSION {
            return Err(AppError::Config(format!(
                "unsupported config version {}; this build expects {CONFIG_VERSION}",
                self.version
            )));
        }
        let has_sites = match (&self.dataset.graph, &self.dataset.synthetic) {
            (Some(_), Some(_)) => {
                return Err(AppError::Config(
                    "dataset declares both a graph file and a synthetic model; pick one".into(),
                ))
            }
            (None, None) => {
                return Err(AppError::Config(
                    "dataset needs either a graph file or a synthetic model".into(),
                ))
            }
            (Some(_), None) => {
                if self.dataset.labels.is_none() {
                    return Err(AppError::Config(
                        "a file dataset needs a labels file".into(),
                    ));
                }
                self.dataset.urls.is_some()
            }
            (None, Some(synth)) => {
                if self.dataset.labels.is_some() || self.dataset.urls.is_some() {
                    return Err(AppError::Config(
                        "a synthetic dataset generates its own labels and urls".into(),
                    ));
                }
                // Validates model fields; the seed does not matter here.
                synth.to_config(0)?;
                synth.model == "site_block"
            }
        };
        if let Some(grid) = &self.alpha_grid {
            if grid.is_empty() {
                return Err(AppError::Config("alpha_grid must not be empty".into()));
            }
            for &a in grid {
                if !(a > 0.0 && a <= 1.0) {
                    return Err(AppError::Config(format!(
                        "alpha_grid values must lie in (0, 1], got {a}"
                    )));
                }
            }
        }
        if self.strategies.is_empty() {
            return Err(AppError::Config(
                "config lists no strategies; nothing to run".into(),
            ));
        }
        for s in &self.strategies {
            let kind = StrategyKind::parse(&s.name)?;
            if s.seeds.is_empty() {
                return Err(AppError::Config(format!(
                    "strategy {} lists no seeds",
                    s.name
                )));
            }
            if kind.needs_sample() {
                if s.z.is_none() {
                    return Err(AppError::Config(format!(
                        "strategy {} needs a sample size z",
                        s.name
                    )));
                }
                if let Some(sel) = &s.selector {
                    SelectorKind::parse(sel)?;
                }
            } else if s.z.is_some() || s.selector.is_some() {
                return Err(AppError::Config(format!(
                    "strategy {} is static and takes neither z nor selector",
                    s.name
                )));
            }
            if kind.needs_sites() && !has_sites {
                return Err(AppError::Config(format!(
                    "strategy {} needs site structure: a urls file or a site_block model",
                    s.name
                )));
            }
        }
        Ok(())
    }

    /// Grid to price every run on; defaults to 50 evenly spaced values.
    pub fn grid(&self) -> Vec<f64> {
        self.alpha_grid.clone().unwrap_or_else(default_alpha_grid)
    }
}

/// Interpret a config-relative path against the config file's
/// directory, leaving absolute paths alone.
pub fn resolve_path(config_dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config_dir.join(p)
    }
}
