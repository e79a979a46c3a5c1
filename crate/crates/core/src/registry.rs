//! Conference registry: the date-ordered catalogue of conferences with
//! their event times and per-conference input files.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_text;
use crate::market::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConferenceRecord {
    pub conference_id: String,
    pub date: NaiveDate,
    pub qa_start: Instant,
    pub conference_end: Instant,
    /// `HH:MM` override of the configured trading close.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trading_close: Option<String>,
    /// Nominal video frame rate; falls back to the run configuration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fps: Option<f64>,
    pub landmarks: PathBuf,
    pub transcript: PathBuf,
    pub segments: PathBuf,
}

impl ConferenceRecord {
    /// Q&A start and end in seconds relative to the Q&A start.
    pub fn qa_bounds_s(&self) -> (f64, f64) {
        let len = (self.conference_end - self.qa_start).num_milliseconds() as f64 / 1000.0;
        (0.0, len)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub conferences: Vec<ConferenceRecord>,
    /// Directory relative paths resolve against; not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Registry {
    pub fn new(conferences: Vec<ConferenceRecord>, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &conferences {
            if c.conference_id.is_empty() || c.conference_id.contains(['/', '\\']) {
                return Err(Error::Config(format!("invalid conference id {:?}", c.conference_id)));
            }
            if !seen.insert(c.conference_id.as_str()) {
                return Err(Error::Config(format!("duplicate conference id {}", c.conference_id)));
            }
        }
        let mut conferences = conferences;
        conferences.sort_by(|a, b| a.date.cmp(&b.date).then(a.qa_start.cmp(&b.qa_start)));
        Ok(Self {
            conferences,
            base_dir: base_dir.into(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let raw: Registry = serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Registry::new(raw.conferences, base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}
