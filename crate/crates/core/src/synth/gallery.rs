use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{derive_seed, landmarks::sample_embedding};
use crate::error::{Error, Result};
use crate::geometry::EMBEDDING_DIM;
use crate::identity::{Embedding, Gallery, GalleryEntry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GallerySpec {
    pub labels: Vec<String>,
    /// Typical distance of a sample from its cluster center.
    pub cluster_radius: f64,
    /// Distance between any two cluster centers.
    pub separation: f64,
    pub per_label: usize,
    pub queries_per_label: usize,
    pub seed: u64,
}

impl GallerySpec {
    pub fn new(labels: &[&str], cluster_radius: f64, separation: f64, seed: u64) -> Self {
        Self {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            cluster_radius,
            separation,
            per_label: 20,
            queries_per_label: 10,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.labels.is_empty() || self.labels.len() > EMBEDDING_DIM {
            return Err(Error::Scenario(format!(
                "gallery needs 1..={EMBEDDING_DIM} labels, got {}",
                self.labels.len()
            )));
        }
        if self.labels.iter().any(String::is_empty) {
            return Err(Error::Scenario("gallery label is empty".into()));
        }
        if !(self.cluster_radius >= 0.0) || self.per_label == 0 {
            return Err(Error::Scenario("cluster radius must be >= 0 and per_label >= 1".into()));
        }
        if self.labels.len() > 1 && !(self.separation > 4.0 * self.cluster_radius) {
            return Err(Error::Scenario(format!(
                "cluster separation {} must exceed 4 x radius {}",
                self.separation, self.cluster_radius
            )));
        }
        Ok(())
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Centers sit on scaled coordinate axes, so every pair is exactly
    /// `separation` apart.
    pub fn center(&self, label_index: usize) -> Vec<f64> {
        let mut c = vec![0.0; EMBEDDING_DIM];
        c[label_index] = self.separation / std::f64::consts::SQRT_2;
        c
    }

    /// Per-coordinate noise sd giving an expected offset norm of about
    /// `cluster_radius`.
    pub fn coordinate_sd(&self) -> f64 {
        self.cluster_radius / (EMBEDDING_DIM as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeldOutQuery {
    pub label: String,
    pub embedding: Embedding,
}

pub fn gen_gallery(spec: &GallerySpec) -> Result<(Gallery, Vec<HeldOutQuery>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 0x6a11));
    let sd = spec.coordinate_sd();
    let mut entries = Vec::new();
    let mut queries = Vec::new();
    for (k, label) in spec.labels.iter().enumerate() {
        let center = spec.center(k);
        for _ in 0..spec.per_label {
            entries.push(GalleryEntry {
                label: label.clone(),
                embedding: Embedding::new(sample_embedding(&center, sd, &mut rng))?,
            });
        }
        for _ in 0..spec.queries_per_label {
            queries.push(HeldOutQuery {
                label: label.clone(),
                embedding: Embedding::new(sample_embedding(&center, sd, &mut rng))?,
            });
        }
    }
    Ok((Gallery::new(entries)?, queries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::{classify, embedding_distance, Classification, IdentityConfig};

    #[test]
    fn held_out_queries_classified_to_their_cluster() {
        let spec = GallerySpec::new(&["a", "b", "c"], 0.05, 1.0, 11);
        let (g, q) = gen_gallery(&spec).unwrap();
        let cfg = IdentityConfig { epsilon: 0.5, ..Default::default() };
        for query in &q {
            // brute force: nearest gallery entry carries the query's label and
            // every other cluster is farther than epsilon
            for e in g.entries() {
                let d = embedding_distance(query.embedding.as_slice(), e.embedding.as_slice()).unwrap();
                assert_eq!(d < 0.5, e.label == query.label, "d = {d}");
            }
            assert_eq!(classify(&query.embedding, &g, &cfg).unwrap(), Classification::Label(query.label.clone()));
        }
    }

    #[test]
    fn single_label_gallery() {
        let spec = GallerySpec::new(&["only"], 0.05, 1.0, 2);
        let (g, q) = gen_gallery(&spec).unwrap();
        let cfg = IdentityConfig { epsilon: 0.5, ..Default::default() };
        assert!(q.iter().all(|x| classify(&x.embedding, &g, &cfg).unwrap() == Classification::Label("only".into())));
    }

    #[test]
    fn zero_epsilon_gives_unknown() {
        let (g, q) = gen_gallery(&GallerySpec::new(&["a", "b"], 0.05, 1.0, 5)).unwrap();
        let cfg = IdentityConfig { epsilon: 0.0, ..Default::default() };
        assert!(q.iter().all(|x| classify(&x.embedding, &g, &cfg).unwrap() == Classification::Unknown));
    }

    #[test]
    fn separation_enforced() {
        let spec = GallerySpec::new(&["a", "b"], 0.3, 1.0, 1);
        assert!(matches!(gen_gallery(&spec), Err(Error::Scenario(_))));
    }

    #[test]
    fn deterministic() {
        let spec = GallerySpec::new(&["a", "b"], 0.05, 1.0, 9);
        assert_eq!(gen_gallery(&spec).unwrap().0, gen_gallery(&spec).unwrap().0);
    }
}
