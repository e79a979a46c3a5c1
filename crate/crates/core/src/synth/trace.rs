//! The scripted EAR trace of one synthetic conference and the analytic
//! quantities derived from it.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::{Interval, ScenarioSpec};

/// Length of one scripted blink.
pub const BLINK_DURATION_S: f64 = 0.2;

/// What the camera shows at an instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceState {
    pub label: String,
    pub ear: f64,
}

/// A maximal interval `[start_s, end_s)` of constant state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSegment {
    pub start_s: f64,
    pub end_s: f64,
    pub label: String,
    pub ear: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Script<'a> {
    spec: &'a ScenarioSpec,
    blinks: Vec<Interval>,
}

impl<'a> Script<'a> {
    pub fn new(spec: &'a ScenarioSpec, rng: &mut impl Rng) -> Self {
        Self {
            spec,
            blinks: draw_blinks(spec, rng),
        }
    }

    pub fn blinks(&self) -> &[Interval] {
        &self.blinks
    }

    /// State at time `t`; `None` inside a gap or past the end.
    pub fn state_at(&self, t: f64) -> Option<TraceState> {
        let s = self.spec;
        if t < 0.0 || t >= s.conference_length_s || s.gap_intervals.iter().any(|g| g.contains(t)) {
            return None;
        }
        if let Some(other) = s.identity_script.iter().find(|i| i.start_s <= t && t < i.end_s) {
            return Some(TraceState {
                label: other.label.clone(),
                ear: s.baseline_ear,
            });
        }
        let ear = if self.blinks.iter().any(|b| b.contains(t)) {
            0.0
        } else if let Some(e) = s.reading_episodes.iter().find(|e| e.start_s <= t && t < e.end_s) {
            e.ear_level
        } else {
            s.baseline_ear
        };
        Some(TraceState {
            label: s.target_label.clone(),
            ear,
        })
    }

    /// Piecewise-constant segments covering every non-gap instant.
    pub fn segments(&self) -> Vec<TraceSegment> {
        let s = self.spec;
        let mut cuts = vec![0.0, s.conference_length_s];
        let mut push = |a: f64, b: f64| {
            cuts.push(a);
            cuts.push(b);
        };
        for i in s.gap_intervals.iter().chain(&self.blinks) {
            push(i.start_s, i.end_s);
        }
        for e in &s.reading_episodes {
            push(e.start_s, e.end_s);
        }
        for i in &s.identity_script {
            push(i.start_s, i.end_s);
        }
        cuts.retain(|c| (0.0..=s.conference_length_s).contains(c));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut out: Vec<TraceSegment> = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let Some(state) = self.state_at(a) else { continue };
            match out.last_mut() {
                Some(last) if last.end_s == a && last.label == state.label && last.ear == state.ear => {
                    last.end_s = b;
                }
                _ => out.push(TraceSegment {
                    start_s: a,
                    end_s: b,
                    label: state.label,
                    ear: state.ear,
                }),
            }
        }
        out
    }
}

fn draw_blinks(spec: &ScenarioSpec, rng: &mut impl Rng) -> Vec<Interval> {
    if spec.blink_rate_hz <= 0.0 {
        return Vec::new();
    }
    let exp = Exp::new(spec.blink_rate_hz).expect("positive rate");
    let mut out = Vec::new();
    let mut t = exp.sample(rng);
    while t < spec.conference_length_s {
        let end = (t + BLINK_DURATION_S).min(spec.conference_length_s);
        out.push(Interval { start_s: t, end_s: end });
        t = end + exp.sample(rng);
    }
    out
}

/// Analytic attention level `sum(ear * len)` over target segments below `c`.
pub fn analytic_lambda(segments: &[TraceSegment], target: &str, c: f64) -> f64 {
    segments
        .iter()
        .filter(|s| s.label == target && s.ear < c)
        .map(|s| s.ear * (s.end_s - s.start_s))
        .sum()
}

/// Analytic seconds spent below `c` on target segments.
pub fn analytic_reading_time(segments: &[TraceSegment], target: &str, c: f64) -> f64 {
    segments
        .iter()
        .filter(|s| s.label == target && s.ear < c)
        .map(|s| s.end_s - s.start_s)
        .sum()
}
