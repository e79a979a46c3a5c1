//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function has a plain Rust twin returning `Result`, which
//! the native tests exercise; the exported wrappers only convert errors.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use wasm_bindgen::prelude::*;

use attnstudy::attention::{integrate_attention, AttentionConfig, EarSeries};
use attnstudy::geometry::{self, stream_ear, EyeIndexMap, EyeLandmarks, Point2};
use attnstudy::regression::{ols_univariate, render_table, RegressionInput, RegressionResult};
use attnstudy::synth::{gen_landmark_stream, SuiteSpec};

/// EAR of one eye given as `[x1, y1, ..., x6, y6]`.
pub fn eye_ratio(coords: &[f64]) -> Result<f64, String> {
    if coords.len() != 12 {
        return Err(format!("expected 12 coordinates, got {}", coords.len()));
    }
    let points: Vec<Point2> = coords.chunks(2).map(|c| Point2 { x: c[0], y: c[1] }).collect();
    let eye = EyeLandmarks::from_slice(&points).map_err(|e| e.to_string())?;
    geometry::eye_ear(&eye).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct TraceView {
    pub times: Vec<f64>,
    pub ear: Vec<f64>,
    pub threshold_c: f64,
    pub lambda_level: f64,
    pub analytic_lambda: f64,
    pub reading_time_s: f64,
    pub analytic_reading_time_s: f64,
    /// `(c, Lambda(c))` pairs, measured and analytic.
    pub curve: Vec<(f64, f64, f64)>,
}

/// Synthetic EAR trace of one conference and its attention level over a
/// range of thresholds.
pub fn trace_view(seed: u32, fps: f64, threshold_c: f64) -> Result<TraceView, String> {
    let plan = SuiteSpec {
        n_conferences: 4,
        seed: seed as u64,
        ..SuiteSpec::default()
    }
    .build()
    .map_err(|e| e.to_string())?;
    let mut spec = plan.conferences[0].clone();
    spec.fps = fps;
    spec.identity_script.clear();
    let (frames, truth) = gen_landmark_stream(&spec, None, threshold_c).map_err(|e| e.to_string())?;
    let (samples, _) = stream_ear(&frames, EyeIndexMap::default());
    let series = EarSeries::new(&spec.conference_id, samples, fps).map_err(|e| e.to_string())?;
    let at = |c: f64| {
        let cfg = AttentionConfig {
            threshold_c: c,
            ..AttentionConfig::default()
        };
        integrate_attention(&series, &cfg).map_err(|e| e.to_string())
    };
    let main = at(threshold_c)?;
    let mut curve = Vec::new();
    for k in 1..=40 {
        let c = k as f64 * 0.01;
        curve.push((c, at(c)?.lambda_level, truth.lambda_at(c)));
    }
    Ok(TraceView {
        times: series.samples().iter().map(|s| s.timestamp_s).collect(),
        ear: series.samples().iter().map(|s| s.value).collect(),
        threshold_c,
        lambda_level: main.lambda_level,
        analytic_lambda: truth.analytic_lambda,
        reading_time_s: main.reading_time_s,
        analytic_reading_time_s: truth.analytic_reading_time_s,
        curve,
    })
}

#[derive(Debug, Serialize)]
pub struct FitView {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub result: RegressionResult,
    pub table: String,
}

/// Draws `y = beta * x + noise` and fits it.
pub fn planted_fit(seed: u32, n: usize, beta: f64, noise_sd: f64) -> Result<FitView, String> {
    if !(noise_sd >= 0.0) {
        return Err("noise must be nonnegative".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|xi| {
            let z: f64 = StandardNormal.sample(&mut rng);
            beta * xi + noise_sd * z
        })
        .collect();
    let input = RegressionInput::unlabelled(y.clone(), x.clone()).map_err(|e| e.to_string())?;
    let result = ols_univariate(&input).map_err(|e| e.to_string())?;
    let table = render_table(std::slice::from_ref(&result), "y", &["x"]).text;
    Ok(FitView { x, y, result, table })
}

fn to_json<T: Serialize>(v: &T) -> Result<String, JsError> {
    serde_json::to_string(v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn eye_ear(coords: &[f64]) -> Result<f64, JsError> {
    eye_ratio(coords).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn attention_trace(seed: u32, fps: f64, threshold_c: f64) -> Result<String, JsError> {
    to_json(&trace_view(seed, fps, threshold_c).map_err(|e| JsError::new(&e))?)
}

#[wasm_bindgen]
pub fn fit_planted(seed: u32, n: usize, beta: f64, noise_sd: f64) -> Result<String, JsError> {
    to_json(&planted_fit(seed, n, beta, noise_sd).map_err(|e| JsError::new(&e))?)
}
