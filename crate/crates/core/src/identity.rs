//! Speaker identification by epsilon-ball voting over a labelled gallery
//! of face embeddings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FaceLandmarkFrame, EMBEDDING_DIM};

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding(Vec<f64>);

impl Embedding {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() != EMBEDDING_DIM {
            return Err(Error::Structural(format!(
                "embedding has {} entries, expected {EMBEDDING_DIM}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Structural("embedding has a non-finite entry".into()));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Euclidean distance between two embedding vectors.
pub fn embedding_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Structural(format!(
            "embedding lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalleryEntry {
    pub label: String,
    pub embedding: Embedding,
}

/// Labelled reference embeddings. Never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Gallery {
    entries: Vec<GalleryEntry>,
}

impl Gallery {
    pub fn new(entries: Vec<GalleryEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Config("gallery is empty".into()));
        }
        if let Some(i) = entries.iter().position(|e| e.label.is_empty()) {
            return Err(Error::Config(format!("gallery entry {i} has an empty label")));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[GalleryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.entries.iter().any(|e| e.label == label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoEmbeddingPolicy {
    /// Frames without an embedding are discarded.
    #[default]
    Drop,
    /// Frames without an embedding are taken to show the target speaker
    /// (for streams that were filtered upstream).
    AssumeTarget,
}

impl std::str::FromStr for NoEmbeddingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop" => Ok(Self::Drop),
            "assume_target" => Ok(Self::AssumeTarget),
            other => Err(Error::Config(format!(
                "unknown no-embedding policy {other:?} (expected drop or assume_target)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IdentityConfig {
    pub epsilon: f64,
    pub min_votes: usize,
    pub no_embedding_policy: NoEmbeddingPolicy,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.6,
            min_votes: 1,
            no_embedding_policy: NoEmbeddingPolicy::Drop,
        }
    }
}

impl IdentityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if self.min_votes == 0 {
            return Err(Error::Config("min_votes must be at least 1".into()));
        }
        Ok(())
    }
}

/// `a[m] = 1` iff the query lies strictly within `epsilon` of gallery entry `m`.
pub fn vote_vector(query: &Embedding, gallery: &Gallery, epsilon: f64) -> Result<Vec<u8>> {
    gallery
        .entries
        .iter()
        .map(|e| Ok(u8::from(embedding_distance(query.as_slice(), e.embedding.as_slice())? < epsilon)))
        .collect()
}

/// Vote totals per label (labels with zero votes omitted).
pub fn vote_counts(query: &Embedding, gallery: &Gallery, epsilon: f64) -> Result<BTreeMap<String, usize>> {
    let votes = vote_vector(query, gallery, epsilon)?;
    let mut counts = BTreeMap::new();
    for (entry, v) in gallery.entries.iter().zip(votes) {
        if v == 1 {
            *counts.entry(entry.label.clone()).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Classification {
    Label(String),
    Unknown,
}

impl Classification {
    pub fn label(&self) -> Option<&str> {
        match self {
            Classification::Label(l) => Some(l),
            Classification::Unknown => None,
        }
    }
}

/// Plurality vote. A tie at the top, or a winner below `min_votes`, is `Unknown`.
pub fn classify(query: &Embedding, gallery: &Gallery, config: &IdentityConfig) -> Result<Classification> {
    let counts = vote_counts(query, gallery, config.epsilon)?;
    let Some(&top) = counts.values().max() else {
        return Ok(Classification::Unknown);
    };
    let mut winners = counts.iter().filter(|(_, &c)| c == top);
    let (label, _) = winners.next().expect("max exists");
    if winners.next().is_some() || top < config.min_votes {
        return Ok(Classification::Unknown);
    }
    Ok(Classification::Label(label.clone()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityDiagnostics {
    pub frames: usize,
    pub kept: usize,
    /// Classified as some other label.
    pub rejected: usize,
    pub unknown: usize,
    pub no_embedding: usize,
    /// Frames without embedding kept under `assume_target`.
    pub assumed: usize,
}

/// Keeps the frames classified as `target_label`, preserving order.
pub fn filter_speaker_frames(
    frames: &[FaceLandmarkFrame],
    gallery: &Gallery,
    target_label: &str,
    config: &IdentityConfig,
) -> Result<(Vec<FaceLandmarkFrame>, IdentityDiagnostics)> {
    config.validate()?;
    if gallery.is_empty() {
        return Err(Error::Config("gallery is empty".into()));
    }
    let mut diag = IdentityDiagnostics {
        frames: frames.len(),
        ..Default::default()
    };
    let mut kept = Vec::new();
    for f in frames {
        let Some(values) = &f.embedding else {
            diag.no_embedding += 1;
            if config.no_embedding_policy == NoEmbeddingPolicy::AssumeTarget {
                diag.assumed += 1;
                diag.kept += 1;
                kept.push(f.clone());
            }
            continue;
        };
        let query = Embedding::new(values.clone()).map_err(|e| {
            Error::Structural(format!("frame {}: {e}", f.frame_index))
        })?;
        match classify(&query, gallery, config)? {
            Classification::Label(l) if l == target_label => {
                diag.kept += 1;
                kept.push(f.clone());
            }
            Classification::Label(_) => diag.rejected += 1,
            Classification::Unknown => diag.unknown += 1,
        }
    }
    Ok((kept, diag))
}
