use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::attention::AttentionConfig;
use crate::error::{Error, Result};
use crate::geometry::EyeIndexMap;
use crate::identity::IdentityConfig;
use crate::io::read_text;
use crate::market::parse_close;

pub const TOOL: &str = "attnstudy";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MarketConfig {
    /// Default `HH:MM` end of the trading day, in each conference's offset.
    pub trading_close: String,
}

impl Default for MarketConfig {
    fn default() -> Self {
        Self {
            trading_close: "16:00".into(),
        }
    }
}

/// Everything a pipeline run depends on. Relative paths resolve against the
/// directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub registry: PathBuf,
    pub gallery: PathBuf,
    pub prices: PathBuf,
    pub target_label: String,
    #[serde(default)]
    pub identity: IdentityConfig,
    #[serde(default)]
    pub attention: AttentionConfig,
    #[serde(default)]
    pub market: MarketConfig,
    /// Frame rate for conferences whose registry entry has none.
    #[serde(default = "default_fps")]
    pub default_fps: f64,
    #[serde(default)]
    pub eye_map: EyeIndexMap,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_fps() -> f64 {
    25.0
}

impl RunConfig {
    /// Configuration matching the layout written by `synth`.
    pub fn for_fixture() -> Self {
        Self {
            registry: "registry.json".into(),
            gallery: "gallery.json".into(),
            prices: "prices.csv".into(),
            target_label: "chair".into(),
            identity: IdentityConfig {
                epsilon: 0.5,
                ..Default::default()
            },
            attention: AttentionConfig::default(),
            market: MarketConfig::default(),
            default_fps: default_fps(),
            eye_map: EyeIndexMap::default(),
            base_dir: PathBuf::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.identity.validate()?;
        self.attention.validate()?;
        self.eye_map.validate()?;
        parse_close(&self.market.trading_close)?;
        if self.target_label.is_empty() {
            return Err(Error::Config("target label is empty".into()));
        }
        if !(self.default_fps > 0.0) {
            return Err(Error::Config("default fps must be positive".into()));
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// SHA-256 of the serialized configuration.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Provenance stamped into every output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
}

impl Meta {
    pub fn for_config(cfg: &RunConfig) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            config_hash: cfg.hash(),
        }
    }

    pub fn comment_line(&self) -> String {
        format!("# {} {} config={}", self.tool, self.version, self.config_hash)
    }
}
