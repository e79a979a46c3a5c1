//! Staged event-study pipeline: identify -> ear -> attention -> eventstudy.
//!
//! Each stage reads the previous stage's files from the output directory
//! and writes its own, so later stages can be rerun with different settings
//! without repeating the expensive landmark passes. Output layout:
//!
//! ```text
//! <out>/run.json
//! <out>/identify/<conference>.jsonl, diagnostics.json
//! <out>/ear/<conference>.csv, diagnostics.json
//! <out>/attention/attention.csv, exclusions.csv, diagnostics.json
//! <out>/eventstudy/windows.csv, exclusions.csv, table_<dependent>.{txt,csv,json}
//! ```

mod config;
mod stages;

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io;
use crate::registry::Registry;

pub use config::{MarketConfig, Meta, RunConfig, TOOL, VERSION};
pub use stages::{
    AttentionRow, AttentionSummary, EarRecord, EarSummary, EventStudySummary, Exclusion, IdentifyRecord,
    IdentifySummary, WindowRow, COVARIATES, DEPENDENTS,
};

pub struct Pipeline {
    cfg: RunConfig,
    registry: Registry,
    out: PathBuf,
    meta: Meta,
    pool: rayon::ThreadPool,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    meta: &'a Meta,
    config: &'a RunConfig,
}

impl Pipeline {
    /// Prepares a run into `out`. Refuses to write into a directory holding
    /// outputs of a different configuration unless `force` is set.
    pub fn new(cfg: RunConfig, out: impl Into<PathBuf>, jobs: usize, force: bool) -> Result<Self> {
        cfg.validate()?;
        let out = out.into();
        for (what, p) in [("registry", &cfg.registry), ("gallery", &cfg.gallery), ("prices", &cfg.prices)] {
            let path = cfg.resolve(p);
            if !path.is_file() {
                return Err(Error::Config(format!("{what} file {} does not exist", path.display())));
            }
        }
        let registry = Registry::load(&cfg.resolve(&cfg.registry))?;
        let meta = Meta::for_config(&cfg);

        let manifest_path = out.join("run.json");
        if manifest_path.is_file() && !force {
            let existing: serde_json::Value = serde_json::from_str(&io::read_text(&manifest_path)?)
                .map_err(|e| Error::parse(&manifest_path, e))?;
            let hash = existing["meta"]["config_hash"].as_str().unwrap_or_default();
            if hash != meta.config_hash {
                return Err(Error::Config(format!(
                    "{} holds outputs of config {hash}; refusing to overwrite with config {} (use --force or another --out)",
                    out.display(),
                    meta.config_hash
                )));
            }
        }
        let manifest = RunManifest { meta: &meta, config: &cfg };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::parse(&manifest_path, e))?;
        io::write_text(&manifest_path, &format!("{text}\n"))?;

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(Self {
            cfg,
            registry,
            out,
            meta,
            pool,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    pub fn stage_dir(&self, stage: &str) -> PathBuf {
        self.out.join(stage)
    }

    /// All four stages in order.
    pub fn run_all(&self) -> Result<EventStudySummary> {
        self.identify()?;
        self.ear()?;
        self.attention()?;
        self.eventstudy()
    }
}
