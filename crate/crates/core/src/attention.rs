//! Attention measure: the time integral of sub-threshold EAR over the
//! speaker's on-camera time, its log level and first differences, and the
//! question-count / duration benchmark variables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::EarSample;

/// Gap-aware EAR series for one conference.
#[derive(Debug, Clone, PartialEq)]
pub struct EarSeries {
    conference_id: String,
    samples: Vec<EarSample>,
    nominal_fps: f64,
}

impl EarSeries {
    pub fn new(conference_id: impl Into<String>, samples: Vec<EarSample>, nominal_fps: f64) -> Result<Self> {
        let conference_id = conference_id.into();
        if !(nominal_fps > 0.0 && nominal_fps.is_finite()) {
            return Err(Error::Config(format!("{conference_id}: nominal fps must be positive")));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.value >= 0.0 && s.value.is_finite()) {
                return Err(Error::Structural(format!(
                    "{conference_id}: sample {i} has invalid EAR {}",
                    s.value
                )));
            }
        }
        if let Some(i) = samples
            .windows(2)
            .position(|w| !(w[1].timestamp_s > w[0].timestamp_s))
        {
            return Err(Error::Structural(format!(
                "{conference_id}: timestamps not strictly increasing at sample {} ({} -> {})",
                i + 1,
                samples[i].timestamp_s,
                samples[i + 1].timestamp_s
            )));
        }
        Ok(Self {
            conference_id,
            samples,
            nominal_fps,
        })
    }

    pub fn conference_id(&self) -> &str {
        &self.conference_id
    }

    pub fn samples(&self) -> &[EarSample] {
        &self.samples
    }

    pub fn nominal_fps(&self) -> f64 {
        self.nominal_fps
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.nominal_fps
    }

    /// Number of inter-sample spacings longer than `gap_factor / fps`.
    pub fn gap_count(&self, gap_factor: f64) -> usize {
        let limit = gap_factor / self.nominal_fps;
        self.samples
            .windows(2)
            .filter(|w| w[1].timestamp_s - w[0].timestamp_s > limit)
            .count()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum LambdaFloorPolicy {
    #[default]
    Error,
    EpsilonFloor { value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttentionConfig {
    pub threshold_c: f64,
    pub gap_factor: f64,
    pub lambda_floor: LambdaFloorPolicy,
}

impl Default for AttentionConfig {
    fn default() -> Self {
        Self {
            threshold_c: 0.2,
            gap_factor: 3.0,
            lambda_floor: LambdaFloorPolicy::Error,
        }
    }
}

impl AttentionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold_c > 0.0 && self.threshold_c.is_finite()) {
            return Err(Error::Config(format!("threshold c must be positive, got {}", self.threshold_c)));
        }
        if !(self.gap_factor > 1.0) {
            return Err(Error::Config(format!("gap factor must exceed 1, got {}", self.gap_factor)));
        }
        if let LambdaFloorPolicy::EpsilonFloor { value } = self.lambda_floor {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("lambda floor must be positive, got {value}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttentionIntegral {
    /// Sum of sub-threshold EAR times the frame interval (EAR x seconds).
    pub lambda_level: f64,
    /// Seconds spent below the threshold.
    pub reading_time_s: f64,
    /// Seconds covered by samples (`samples * dt`).
    pub observed_time_s: f64,
    /// End of the last frame interval, `t_last + dt`.
    pub span_end_s: f64,
    pub gaps: usize,
}

/// Left Riemann sum of `EAR * 1{EAR < c}` with `dt = 1 / fps`. Only samples
/// contribute; gaps between them add nothing.
pub fn integrate_attention(series: &EarSeries, config: &AttentionConfig) -> Result<AttentionIntegral> {
    config.validate()?;
    let samples = series.samples();
    let Some(last) = samples.last() else {
        return Err(Error::InsufficientData(format!(
            "{}: EAR series is empty",
            series.conference_id()
        )));
    };
    let dt = series.dt();
    let c = config.threshold_c;
    let (mut level, mut below) = (0.0, 0usize);
    for s in samples.iter().filter(|s| s.value < c) {
        level += s.value;
        below += 1;
    }
    Ok(AttentionIntegral {
        lambda_level: level * dt,
        reading_time_s: below as f64 * dt,
        observed_time_s: samples.len() as f64 * dt,
        span_end_s: last.timestamp_s + dt,
        gaps: series.gap_count(config.gap_factor),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLevel {
    pub value: f64,
    pub floored: bool,
}

/// Natural log of the attention level, subject to the floor policy.
pub fn log_level(lambda_level: f64, policy: LambdaFloorPolicy, conference_id: &str) -> Result<LogLevel> {
    if lambda_level > 0.0 && lambda_level.is_finite() {
        return Ok(LogLevel {
            value: lambda_level.ln(),
            floored: false,
        });
    }
    match policy {
        LambdaFloorPolicy::Error => Err(Error::Domain(format!(
            "{conference_id}: attention level {lambda_level} has no logarithm"
        ))),
        LambdaFloorPolicy::EpsilonFloor { value } => Ok(LogLevel {
            value: lambda_level.max(value).ln(),
            floored: true,
        }),
    }
}

/// First differences `v[i+1] - v[i]` of a date-ordered series.
pub fn delta_series(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "first differences need at least 2 values, got {}",
            values.len()
        )));
    }
    Ok(values.windows(2).map(|w| w[1] - w[0]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speaker {
    Chair,
    Reporter,
}

impl std::str::FromStr for Speaker {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "chair" => Ok(Speaker::Chair),
            "reporter" => Ok(Speaker::Reporter),
            other => Err(Error::Structural(format!("unknown speaker tag {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start_s: f64,
    pub end_s: f64,
    pub speaker: Speaker,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerSegments {
    pub conference_id: String,
    segments: Vec<Segment>,
}

impl SpeakerSegments {
    pub fn new(conference_id: impl Into<String>, segments: Vec<Segment>) -> Result<Self> {
        let conference_id = conference_id.into();
        for (i, s) in segments.iter().enumerate() {
            if !(s.end_s > s.start_s) || !s.start_s.is_finite() || !s.end_s.is_finite() {
                return Err(Error::Structural(format!(
                    "{conference_id}: segment {i} has end {} <= start {}",
                    s.end_s, s.start_s
                )));
            }
        }
        if let Some(i) = segments.windows(2).position(|w| w[1].start_s < w[0].end_s) {
            return Err(Error::Structural(format!(
                "{conference_id}: segments {i} and {} overlap or are out of order",
                i + 1
            )));
        }
        Ok(Self {
            conference_id,
            segments,
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn chair_seconds(&self) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.speaker == Speaker::Chair)
            .map(|s| s.end_s - s.start_s)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub n_questions_log: f64,
    pub duration_qa_log: f64,
    pub duration_chair_speech_log: f64,
}

pub fn count_questions(transcript: &str) -> usize {
    transcript.chars().filter(|&c| c == '?').count()
}

/// Log question count, log Q&A length and log chair speaking time.
pub fn benchmark_variables(
    transcript: &str,
    segments: &SpeakerSegments,
    qa_start_s: f64,
    qa_end_s: f64,
) -> Result<Benchmark> {
    let id = &segments.conference_id;
    if !(qa_end_s > qa_start_s) {
        return Err(Error::Structural(format!(
            "{id}: Q&A end {qa_end_s} is not after start {qa_start_s}"
        )));
    }
    let questions = count_questions(transcript);
    if questions == 0 {
        return Err(Error::Domain(format!("{id}: transcript contains no question marks")));
    }
    let chair = segments.chair_seconds();
    if !(chair > 0.0) {
        return Err(Error::Domain(format!("{id}: no chair speaking time in segments")));
    }
    Ok(Benchmark {
        n_questions_log: (questions as f64).ln(),
        duration_qa_log: (qa_end_s - qa_start_s).ln(),
        duration_chair_speech_log: chair.ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(fps: f64, values: &[f64]) -> EarSeries {
        let samples = values
            .iter()
            .enumerate()
            .map(|(i, &v)| EarSample { timestamp_s: i as f64 / fps, value: v })
            .collect();
        EarSeries::new("c1", samples, fps).unwrap()
    }

    fn with_c(c: f64) -> AttentionConfig {
        AttentionConfig { threshold_c: c, ..Default::default() }
    }

    #[test]
    fn integral_of_small_trace() {
        let r = integrate_attention(&series(2.0, &[0.30, 0.15, 0.10, 0.25]), &with_c(0.2)).unwrap();
        assert!((r.lambda_level - 0.125).abs() < 1e-15);
        assert!((r.reading_time_s - 1.0).abs() < 1e-15);
        assert_eq!(r.span_end_s, 2.0);
    }

    #[test]
    fn nothing_below_threshold() {
        let r = integrate_attention(&series(2.0, &[0.3, 0.4]), &with_c(0.2)).unwrap();
        assert_eq!(r.lambda_level, 0.0);
        assert_eq!(r.reading_time_s, 0.0);
    }

    #[test]
    fn gap_adds_nothing() {
        let vals = [0.30, 0.15, 0.10, 0.25];
        let mut samples: Vec<_> = vals
            .iter()
            .enumerate()
            .map(|(i, &v)| EarSample { timestamp_s: i as f64 / 2.0, value: v })
            .collect();
        for s in &mut samples[2..] {
            s.timestamp_s += 30.0;
        }
        let gapped = EarSeries::new("c1", samples, 2.0).unwrap();
        let a = integrate_attention(&gapped, &with_c(0.2)).unwrap();
        let b = integrate_attention(&series(2.0, &vals), &with_c(0.2)).unwrap();
        assert_eq!(a.lambda_level, b.lambda_level);
        assert_eq!(a.gaps, 1);
        assert_eq!(b.gaps, 0);
    }

    #[test]
    fn empty_and_unordered_series_rejected() {
        let empty = EarSeries::new("c", vec![], 5.0).unwrap();
        assert!(integrate_attention(&empty, &with_c(0.2)).is_err());
        let s = vec![
            EarSample { timestamp_s: 1.0, value: 0.1 },
            EarSample { timestamp_s: 1.0, value: 0.1 },
        ];
        assert!(matches!(EarSeries::new("c", s, 5.0), Err(Error::Structural(_))));
        assert!(EarSeries::new("c", vec![], 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(AttentionConfig { threshold_c: 0.0, ..Default::default() }.validate().is_err());
        assert!(AttentionConfig { gap_factor: 1.0, ..Default::default() }.validate().is_err());
        assert!(AttentionConfig::default().validate().is_ok());
    }

    #[test]
    fn log_level_cases() {
        assert_eq!(log_level(1.0, LambdaFloorPolicy::Error, "x").unwrap().value, 0.0);
        assert!((log_level(std::f64::consts::E, LambdaFloorPolicy::Error, "x").unwrap().value - 1.0).abs() < 1e-15);
        let err = log_level(0.0, LambdaFloorPolicy::Error, "2020-03-15").unwrap_err();
        assert!(err.to_string().contains("2020-03-15"));
        let f = log_level(0.0, LambdaFloorPolicy::EpsilonFloor { value: 1e-3 }, "x").unwrap();
        assert!(f.floored);
        assert!((f.value - 1e-3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn delta_cases() {
        assert_eq!(delta_series(&[1.0, 1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        let d = delta_series(&[0.0, 0.5, 0.2]).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-15 && (d[1] + 0.3).abs() < 1e-15);
        assert!(delta_series(&[1.0]).is_err());
    }

    #[test]
    fn delta_of_logs_is_log_ratio() {
        let levels = [0.8, 2.5, 1.1, 7.3, 0.02];
        let logs: Vec<f64> = levels.iter().map(|v: &f64| v.ln()).collect();
        let d = delta_series(&logs).unwrap();
        for (i, v) in d.iter().enumerate() {
            assert!((v - (levels[i + 1] / levels[i]).ln()).abs() < 1e-12);
        }
    }

    fn seg(a: f64, b: f64, s: Speaker) -> Segment {
        Segment { start_s: a, end_s: b, speaker: s }
    }

    #[test]
    fn benchmark_cases() {
        assert_eq!(count_questions("A? B? C."), 2);
        let one = SpeakerSegments::new("c", vec![seg(0.0, 300.0, Speaker::Chair)]).unwrap();
        let b = benchmark_variables("A? B? C.", &one, 0.0, 1800.0).unwrap();
        assert!((b.n_questions_log - 2f64.ln()).abs() < 1e-15);
        assert!((b.duration_chair_speech_log - 300f64.ln()).abs() < 1e-15);
        assert!((b.duration_qa_log - 1800f64.ln()).abs() < 1e-15);

        let three = SpeakerSegments::new(
            "c",
            vec![seg(0.0, 100.0, Speaker::Chair), seg(100.0, 160.0, Speaker::Reporter), seg(160.0, 400.0, Speaker::Chair)],
        )
        .unwrap();
        // oracle: add chair segment lengths directly
        let expected: f64 = [(0.0, 100.0), (160.0, 400.0)].iter().map(|(a, b)| b - a).sum();
        assert_eq!(expected, 340.0);
        let b = benchmark_variables("?", &three, 0.0, 1.0).unwrap();
        assert!((b.duration_chair_speech_log - expected.ln()).abs() < 1e-15);
    }

    #[test]
    fn benchmark_domain_errors() {
        let chair = SpeakerSegments::new("c", vec![seg(0.0, 5.0, Speaker::Chair)]).unwrap();
        assert!(matches!(benchmark_variables("no questions.", &chair, 0.0, 1.0), Err(Error::Domain(_))));
        let rep = SpeakerSegments::new("c", vec![seg(0.0, 5.0, Speaker::Reporter)]).unwrap();
        assert!(matches!(benchmark_variables("?", &rep, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(benchmark_variables("?", &chair, 5.0, 5.0).is_err());
    }

    #[test]
    fn segments_must_not_overlap() {
        assert!(SpeakerSegments::new("c", vec![seg(0.0, 10.0, Speaker::Chair), seg(5.0, 12.0, Speaker::Reporter)]).is_err());
        assert!(SpeakerSegments::new("c", vec![seg(3.0, 3.0, Speaker::Chair)]).is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_threshold(vals in proptest::collection::vec(0.0..0.5f64, 1..200), c1 in 0.01..0.5f64, c2 in 0.01..0.5f64) {
            let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
            let s = series(10.0, &vals);
            let a = integrate_attention(&s, &with_c(lo)).unwrap();
            let b = integrate_attention(&s, &with_c(hi)).unwrap();
            prop_assert!(b.lambda_level >= a.lambda_level);
            prop_assert!(b.reading_time_s >= a.reading_time_s);
            prop_assert!(a.lambda_level <= lo * a.reading_time_s + 1e-12);
            prop_assert!(a.reading_time_s <= a.observed_time_s + 1e-12);
            prop_assert!(a.observed_time_s <= a.span_end_s + 1e-9);
        }

        #[test]
        fn delta_inverts_cumsum(steps in proptest::collection::vec(-5.0..5.0f64, 1..50), start in -3.0..3.0f64) {
            let mut levels = vec![start];
            for s in &steps {
                levels.push(levels.last().unwrap() + s);
            }
            let d = delta_series(&levels).unwrap();
            for (a, b) in d.iter().zip(&steps) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
