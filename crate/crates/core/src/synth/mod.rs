//! Seeded generators for ground-truth fixtures: landmark streams with a
//! scripted EAR trace, identity galleries, one-minute price paths and
//! whole planted-effect conference suites.
//!
//! Every generator is a pure function of its spec and seed. Randomness comes
//! from ChaCha8 streams seeded through [`derive_seed`], so fixtures are
//! identical on every platform.

mod gallery;
mod landmarks;
mod prices;
mod trace;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::attention::{Segment, Speaker, SpeakerSegments};
use crate::error::{Error, Result};
use crate::geometry::FaceLandmarkFrame;
use crate::io;
use crate::market::{Instant, PriceBar};
use crate::pipeline::RunConfig;
use crate::registry::{ConferenceRecord, Registry};

pub use gallery::{gen_gallery, GallerySpec, HeldOutQuery};
pub use landmarks::{eye_points, face_frame, EYE_SPAN_PX};
pub use prices::{gen_price_series, PriceSpec, PriceTruth, LEAD_MINUTES};
pub use trace::{analytic_lambda, analytic_reading_time, Script, TraceSegment, TraceState, BLINK_DURATION_S};

/// Mixes a base seed with a tag (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Half-open interval `[start_s, end_s)` in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start_s: f64,
    pub end_s: f64,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        self.start_s <= t && t < self.end_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub start_s: f64,
    pub end_s: f64,
    pub ear_level: f64,
}

/// Interval during which someone other than the target is on camera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityInterval {
    pub start_s: f64,
    pub end_s: f64,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimelineSpec {
    pub qa_start: Instant,
    pub conference_end: Instant,
    pub trading_close: Instant,
}

impl TimelineSpec {
    pub fn validate(&self) -> Result<()> {
        prices::check_timeline(self)
    }
}

fn default_target() -> String {
    "chair".into()
}

fn default_questions() -> usize {
    12
}

/// One synthetic conference. Overlaps resolve as gap > other speaker on
/// camera > blink > reading episode > baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub conference_id: String,
    pub date: NaiveDate,
    pub seed: u64,
    pub fps: f64,
    pub conference_length_s: f64,
    #[serde(default)]
    pub reading_episodes: Vec<Episode>,
    pub baseline_ear: f64,
    #[serde(default)]
    pub blink_rate_hz: f64,
    #[serde(default)]
    pub gap_intervals: Vec<Interval>,
    #[serde(default)]
    pub identity_script: Vec<IdentityInterval>,
    #[serde(default = "default_target")]
    pub target_label: String,
    #[serde(default = "default_questions")]
    pub questions: usize,
    pub price: PriceSpec,
    pub timeline: TimelineSpec,
}

fn check_disjoint<T>(items: &[T], bounds: impl Fn(&T) -> (f64, f64), what: &str, len: f64) -> Result<()> {
    let mut spans: Vec<(f64, f64)> = items.iter().map(bounds).collect();
    for &(a, b) in &spans {
        if !(a >= 0.0 && b > a && b <= len) {
            return Err(Error::Scenario(format!("{what} [{a}, {b}) outside [0, {len}) or empty")));
        }
    }
    spans.sort_by(|x, y| x.0.total_cmp(&y.0));
    if let Some(w) = spans.windows(2).find(|w| w[1].0 < w[0].1) {
        return Err(Error::Scenario(format!(
            "{what} [{}, {}) and [{}, {}) overlap",
            w[0].0, w[0].1, w[1].0, w[1].1
        )));
    }
    Ok(())
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        let id = &self.conference_id;
        if id.is_empty() || id.contains(['/', '\\']) {
            return Err(Error::Scenario(format!("invalid conference id {id:?}")));
        }
        if !(self.fps > 0.0) || !(self.conference_length_s > 0.0) || !(self.blink_rate_hz >= 0.0) {
            return Err(Error::Scenario(format!("{id}: fps and length must be positive, blink rate >= 0")));
        }
        if !(self.baseline_ear > 0.0) {
            return Err(Error::Scenario(format!("{id}: baseline EAR must be positive")));
        }
        for e in &self.reading_episodes {
            if !(e.ear_level >= 0.0 && e.ear_level < self.baseline_ear) {
                return Err(Error::Scenario(format!(
                    "{id}: episode level {} must lie in [0, baseline {})",
                    e.ear_level, self.baseline_ear
                )));
            }
        }
        let len = self.conference_length_s;
        check_disjoint(&self.reading_episodes, |e| (e.start_s, e.end_s), "reading episodes", len)?;
        check_disjoint(&self.gap_intervals, |g| (g.start_s, g.end_s), "gaps", len)?;
        check_disjoint(&self.identity_script, |i| (i.start_s, i.end_s), "identity intervals", len)?;
        if self.identity_script.iter().any(|i| i.label == self.target_label) {
            return Err(Error::Scenario(format!("{id}: identity script intervals must name non-target speakers")));
        }
        self.price.validate()?;
        self.timeline.validate()
    }

    /// Speaker segments: reporters while another face is on camera, the
    /// chair otherwise.
    pub fn speaker_segments(&self) -> Result<SpeakerSegments> {
        let mut others: Vec<_> = self.identity_script.iter().map(|i| (i.start_s, i.end_s)).collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut segs = Vec::new();
        let mut t = 0.0;
        for (a, b) in others {
            if a > t {
                segs.push(Segment { start_s: t, end_s: a, speaker: Speaker::Chair });
            }
            segs.push(Segment { start_s: a, end_s: b, speaker: Speaker::Reporter });
            t = b;
        }
        if self.conference_length_s > t {
            segs.push(Segment { start_s: t, end_s: self.conference_length_s, speaker: Speaker::Chair });
        }
        SpeakerSegments::new(self.conference_id.clone(), segs)
    }

    pub fn transcript(&self) -> String {
        let mut s = String::new();
        for q in 1..=self.questions {
            s.push_str(&format!("REPORTER: This is question number {q}, could you comment?\n"));
            s.push_str("CHAIR: Thank you. We will continue to monitor the incoming data.\n");
        }
        s
    }
}

/// Ground truth for one generated conference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConferenceTruth {
    pub conference_id: String,
    pub target_label: String,
    pub fps: f64,
    pub segments: Vec<TraceSegment>,
    pub blinks: Vec<Interval>,
    pub episodes: Vec<Episode>,
    /// Frame indices showing the target speaker.
    pub target_frames: Vec<u64>,
    pub frames: usize,
    /// Analytic attention level and reading time at the fixture threshold.
    pub threshold_c: f64,
    pub analytic_lambda: f64,
    pub analytic_reading_time_s: f64,
    pub questions: usize,
    pub chair_speech_s: f64,
    pub price: PriceTruth,
    /// Planted regression inputs when generated as part of a suite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<PlantedRow>,
}

impl ConferenceTruth {
    pub fn lambda_at(&self, c: f64) -> f64 {
        analytic_lambda(&self.segments, &self.target_label, c)
    }

    pub fn reading_time_at(&self, c: f64) -> f64 {
        analytic_reading_time(&self.segments, &self.target_label, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedRow {
    pub delta_lambda: Option<f64>,
    pub expected_r_d: f64,
    pub vol_after_factor: f64,
}

/// Generates the landmark stream and ground truth of one conference.
/// Frames carry embeddings when a gallery spec is supplied.
pub fn gen_landmark_stream(
    spec: &ScenarioSpec,
    gallery: Option<&GallerySpec>,
    threshold_c: f64,
) -> Result<(Vec<FaceLandmarkFrame>, ConferenceTruth)> {
    spec.validate()?;
    let centers: BTreeMap<&str, Vec<f64>> = match gallery {
        Some(g) => {
            g.validate()?;
            let mut labels: Vec<&str> = spec.identity_script.iter().map(|i| i.label.as_str()).collect();
            labels.push(&spec.target_label);
            labels
                .into_iter()
                .map(|l| {
                    g.label_index(l)
                        .map(|k| (l, g.center(k)))
                        .ok_or_else(|| Error::Scenario(format!("label {l:?} not in gallery")))
                })
                .collect::<Result<_>>()?
        }
        None => BTreeMap::new(),
    };
    let sd = gallery.map(GallerySpec::coordinate_sd).unwrap_or(0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 0x1a4d));
    let script = Script::new(spec, &mut rng);
    let mut frames = Vec::new();
    let mut target_frames = Vec::new();
    let mut k: u64 = 0;
    loop {
        let t = k as f64 / spec.fps;
        if t >= spec.conference_length_s {
            break;
        }
        if let Some(state) = script.state_at(t) {
            let embedding = centers
                .get(state.label.as_str())
                .map(|c| landmarks::sample_embedding(c, sd, &mut rng));
            if state.label == spec.target_label {
                target_frames.push(k);
            }
            frames.push(face_frame(&spec.conference_id, k, t, state.ear, embedding, &mut rng));
        }
        k += 1;
    }

    let segments = script.segments();
    let mut price_rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 0x9a1c));
    let (_, price) = gen_price_series(&spec.price, &spec.timeline, &mut price_rng)?;
    let truth = ConferenceTruth {
        conference_id: spec.conference_id.clone(),
        target_label: spec.target_label.clone(),
        fps: spec.fps,
        analytic_lambda: analytic_lambda(&segments, &spec.target_label, threshold_c),
        analytic_reading_time_s: analytic_reading_time(&segments, &spec.target_label, threshold_c),
        segments,
        blinks: script.blinks().to_vec(),
        episodes: spec.reading_episodes.clone(),
        target_frames,
        frames: frames.len(),
        threshold_c,
        questions: spec.questions,
        chair_speech_s: spec.speaker_segments()?.chair_seconds(),
        price,
        planted: None,
    };
    Ok((frames, truth))
}

/// Price bars of one conference day.
pub fn scenario_prices(spec: &ScenarioSpec) -> Result<Vec<PriceBar>> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 0x9a1c));
    Ok(gen_price_series(&spec.price, &spec.timeline, &mut rng)?.0)
}

/// A set of conferences sharing one gallery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPlan {
    pub threshold_c: f64,
    pub gallery: GallerySpec,
    pub conferences: Vec<ScenarioSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<Vec<PlantedRow>>,
}

/// Attention effect planted into a suite's after-conference volatility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolEffect {
    /// Multiplier at zero attention change; must be below 1.
    pub base_factor: f64,
    /// `factor = base_factor * exp(-sensitivity * delta_lambda)`.
    pub sensitivity: f64,
}

fn default_n() -> usize {
    45
}

/// Parameters of a planted-effect suite: conference-level attention varies
/// at random, and each conference's Q&A return is drawn as
/// `alpha + beta * delta_lambda + noise`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteSpec {
    #[serde(default = "default_n")]
    pub n_conferences: usize,
    pub seed: u64,
    pub fps: f64,
    pub conference_length_s: f64,
    pub threshold_c: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Population R^2 of the planted return regression.
    pub target_r2: f64,
    /// One-minute volatility; derived from `beta` and `target_r2` when absent.
    pub per_minute_vol: Option<f64>,
    pub vol_effect: Option<VolEffect>,
    pub blink_rate_hz: f64,
    pub start_date: NaiveDate,
    pub utc_offset: String,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        Self {
            n_conferences: 45,
            seed: 20110427,
            fps: 4.0,
            conference_length_s: 150.0,
            threshold_c: 0.2,
            alpha: 0.0,
            beta: 0.005,
            target_r2: 0.3,
            per_minute_vol: None,
            vol_effect: None,
            blink_rate_hz: 0.05,
            start_date: NaiveDate::from_ymd_opt(2012, 1, 25).expect("valid date"),
            utc_offset: "-05:00".into(),
        }
    }
}

pub const SUITE_LABELS: [&str; 3] = ["chair", "reporter_a", "reporter_b"];
const SUITE_BASELINE: f64 = 0.3;

impl SuiteSpec {
    fn instant(&self, date: NaiveDate, hm: &str) -> Result<Instant> {
        DateTime::parse_from_rfc3339(&format!("{date}T{hm}:00{}", self.utc_offset))
            .map_err(|e| Error::Scenario(format!("bad suite offset {:?}: {e}", self.utc_offset)))
    }

    pub fn build(&self) -> Result<SynthPlan> {
        if self.n_conferences < 4 {
            return Err(Error::Scenario("a suite needs at least 4 conferences".into()));
        }
        if !(self.threshold_c > 0.0 && self.threshold_c < SUITE_BASELINE) {
            return Err(Error::Scenario(format!("suite threshold must lie in (0, {SUITE_BASELINE})")));
        }
        if !(self.conference_length_s >= 60.0) {
            return Err(Error::Scenario("suite conferences must last at least 60 s".into()));
        }
        if let Some(v) = self.vol_effect {
            if !(v.base_factor > 0.0 && v.base_factor < 1.0) {
                return Err(Error::Scenario("vol effect base factor must lie in (0, 1)".into()));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, 0x5017e));
        let len = self.conference_length_s;
        let max_level = (self.threshold_c * 0.9).min(0.17);

        let mut scenarios = Vec::with_capacity(self.n_conferences);
        for k in 0..self.n_conferences {
            let date = self.start_date + Duration::days(14 * k as i64);
            let slots = rng.random_range(1..=4usize);
            let slot = (len - 10.0) / slots as f64;
            let mut reading_episodes = Vec::new();
            for s in 0..slots {
                let dur = rng.random_range(0.15..0.7) * slot;
                let start = 5.0 + s as f64 * slot + rng.random_range(0.0..(slot - dur));
                reading_episodes.push(Episode {
                    start_s: round_ms(start),
                    end_s: round_ms(start + dur),
                    ear_level: round_ms(rng.random_range(0.05..max_level)),
                });
            }
            let half = len / 2.0;
            let identity_script = (0..2)
                .map(|i| {
                    let dur = rng.random_range(3.0..8.0);
                    let start = i as f64 * half + rng.random_range(1.0..(half - dur - 1.0));
                    IdentityInterval {
                        start_s: round_ms(start),
                        end_s: round_ms(start + dur),
                        label: SUITE_LABELS[1 + i].to_string(),
                    }
                })
                .collect();
            let gap_start = rng.random_range(0.0..(len - 6.0));
            let gap_intervals = vec![Interval {
                start_s: round_ms(gap_start),
                end_s: round_ms(gap_start + rng.random_range(1.0..5.0)),
            }];
            let qa_minutes = rng.random_range(40..=60i64);
            let qa_start = self.instant(date, "14:40")?;
            scenarios.push(ScenarioSpec {
                conference_id: format!("{date}"),
                date,
                seed: derive_seed(self.seed, k as u64 + 1),
                fps: self.fps,
                conference_length_s: len,
                reading_episodes,
                baseline_ear: SUITE_BASELINE,
                blink_rate_hz: self.blink_rate_hz,
                gap_intervals,
                identity_script,
                target_label: SUITE_LABELS[0].into(),
                questions: rng.random_range(6..=30),
                price: PriceSpec {
                    base_price: 1300.0 + 10.0 * k as f64,
                    per_minute_vol: 0.0,
                    drift_during_qa: 0.0,
                    vol_after_factor: 1.0,
                },
                timeline: TimelineSpec {
                    qa_start,
                    conference_end: qa_start + Duration::minutes(qa_minutes),
                    trading_close: self.instant(date, "16:00")?,
                },
            });
        }

        // planted effects use the analytic attention of each conference
        let mut levels = Vec::with_capacity(scenarios.len());
        for s in &scenarios {
            let mut r = ChaCha8Rng::seed_from_u64(derive_seed(s.seed, 0x1a4d));
            let segs = Script::new(s, &mut r).segments();
            let lam = analytic_lambda(&segs, &s.target_label, self.threshold_c);
            if !(lam > 0.0) {
                return Err(Error::Scenario(format!("{}: planted attention is zero", s.conference_id)));
            }
            levels.push(lam.ln());
        }
        let deltas: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
        let mean = deltas.iter().sum::<f64>() / deltas.len() as f64;
        let var = deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (deltas.len() - 1) as f64;
        let noise_sd = match self.per_minute_vol {
            Some(_) => None,
            None => {
                if !(self.beta != 0.0 && self.target_r2 > 0.0 && self.target_r2 < 1.0) {
                    return Err(Error::Scenario(
                        "per_minute_vol is required unless beta != 0 and 0 < target_r2 < 1".into(),
                    ));
                }
                Some((self.beta * self.beta * var * (1.0 - self.target_r2) / self.target_r2).sqrt())
            }
        };

        let mut planted = Vec::with_capacity(scenarios.len());
        for (k, s) in scenarios.iter_mut().enumerate() {
            let dl = if k == 0 { None } else { Some(deltas[k - 1]) };
            let x = dl.unwrap_or(0.0);
            let minutes = (s.timeline.conference_end - s.timeline.qa_start).num_minutes() as f64;
            let expected = self.alpha + self.beta * x;
            let vol = match (self.per_minute_vol, noise_sd) {
                (Some(v), _) => v,
                (None, Some(sd)) => sd / minutes.sqrt(),
                (None, None) => unreachable!("checked above"),
            };
            let factor = match self.vol_effect {
                Some(v) => (v.base_factor * (-v.sensitivity * x).exp()).clamp(0.05, 0.99),
                None => 1.0,
            };
            s.price = PriceSpec {
                drift_during_qa: expected / minutes,
                per_minute_vol: vol,
                vol_after_factor: factor,
                ..s.price
            };
            planted.push(PlantedRow {
                delta_lambda: dl,
                expected_r_d: expected,
                vol_after_factor: factor,
            });
        }

        Ok(SynthPlan {
            threshold_c: self.threshold_c,
            gallery: GallerySpec::new(&SUITE_LABELS, 0.05, 1.0, derive_seed(self.seed, 0x6a11e7)),
            conferences: scenarios,
            planted: Some(planted),
        })
    }
}

fn round_ms(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

/// Contents of a scenario file given to `synth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SynthInput {
    Suite { suite: SuiteSpec },
    Plan(SynthPlan),
}

impl SynthInput {
    pub fn into_plan(self, seed_override: Option<u64>) -> Result<SynthPlan> {
        match self {
            SynthInput::Suite { mut suite } => {
                if let Some(s) = seed_override {
                    suite.seed = s;
                }
                suite.build()
            }
            SynthInput::Plan(mut plan) => {
                if let Some(s) = seed_override {
                    plan.gallery.seed = derive_seed(s, 0x6a11e7);
                    for c in &mut plan.conferences {
                        c.seed = derive_seed(s, c.seed);
                    }
                }
                Ok(plan)
            }
        }
    }
}

/// What `synth` wrote.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureManifest {
    pub dir: PathBuf,
    pub config: PathBuf,
    pub registry: PathBuf,
    pub truth: Vec<ConferenceTruth>,
}

/// Writes a complete fixture directory: landmark streams, transcripts,
/// segments, prices, gallery (+ held-out queries), registry, ground truth
/// and a ready-to-run configuration.
pub fn write_fixture(plan: &SynthPlan, dir: &Path) -> Result<FixtureManifest> {
    if plan.conferences.is_empty() {
        return Err(Error::Scenario("plan has no conferences".into()));
    }
    let (gallery, queries) = gen_gallery(&plan.gallery)?;
    io::write_gallery(&dir.join("gallery.json"), &gallery)?;
    let query_json: Vec<serde_json::Value> = queries
        .iter()
        .map(|q| serde_json::json!({ "label": q.label, "embedding": q.embedding.as_slice() }))
        .collect();
    io::write_text(&dir.join("gallery_queries.json"), &format!("{}\n", pretty(&query_json)?))?;

    let mut records = Vec::new();
    let mut truths = Vec::new();
    let mut bars = Vec::new();
    for (k, spec) in plan.conferences.iter().enumerate() {
        let (frames, mut truth) = gen_landmark_stream(spec, Some(&plan.gallery), plan.threshold_c)?;
        truth.planted = plan.planted.as_ref().and_then(|p| p.get(k).copied());
        let id = &spec.conference_id;
        let landmarks = PathBuf::from(format!("landmarks/{id}.jsonl"));
        let transcript = PathBuf::from(format!("transcripts/{id}.txt"));
        let segments = PathBuf::from(format!("segments/{id}.csv"));
        io::write_landmarks(&dir.join(&landmarks), &frames, None)?;
        io::write_text(&dir.join(&transcript), &spec.transcript())?;
        io::write_text(&dir.join(&segments), &io::segments_csv(&spec.speaker_segments()?))?;
        bars.extend(scenario_prices(spec)?);
        records.push(ConferenceRecord {
            conference_id: id.clone(),
            date: spec.date,
            qa_start: spec.timeline.qa_start,
            conference_end: spec.timeline.conference_end,
            trading_close: Some(spec.timeline.trading_close.format("%H:%M").to_string()),
            fps: Some(spec.fps),
            landmarks,
            transcript,
            segments,
        });
        truths.push(truth);
    }
    bars.sort_by_key(|b| b.timestamp);
    if bars.windows(2).any(|w| w[0].timestamp == w[1].timestamp) {
        return Err(Error::Scenario("two conferences produce overlapping price bars".into()));
    }
    io::write_text(&dir.join("prices.csv"), &io::prices_csv(&bars))?;

    let registry = Registry::new(records, dir)?;
    io::write_text(&dir.join("registry.json"), &format!("{}\n", pretty(&registry)?))?;
    io::write_text(&dir.join("ground_truth.json"), &format!("{}\n", pretty(&truths)?))?;

    let mut config = RunConfig::for_fixture();
    config.attention.threshold_c = plan.threshold_c;
    io::write_text(&dir.join("config.json"), &format!("{}\n", pretty(&config)?))?;

    Ok(FixtureManifest {
        dir: dir.to_path_buf(),
        config: dir.join("config.json"),
        registry: dir.join("registry.json"),
        truth: truths,
    })
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Scenario(e.to_string()))
}

pub fn read_truth(path: &Path) -> Result<Vec<ConferenceTruth>> {
    serde_json::from_str(&io::read_text(path)?).map_err(|e| Error::parse(path, e))
}

/// Draws `n` standard normals; exposed for test harnesses that need the
/// same generator family as the fixtures.
pub fn standard_normals(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}
