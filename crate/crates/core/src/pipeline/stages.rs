use std::collections::HashMap;
use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Meta, Pipeline};
use crate::attention::{
    benchmark_variables, integrate_attention, log_level, Benchmark, EarSeries,
};
use crate::error::{Error, Result};
use crate::geometry::{stream_ear, EarDiagnostics};
use crate::identity::{filter_speaker_frames, IdentityDiagnostics};
use crate::io;
use crate::market::{build_timeline, close_on_day, event_window_stats, parse_close, EventWindowStats};
use crate::registry::ConferenceRecord;
use crate::regression::{ols_univariate, render_table, RegressionInput, RenderedTable};

/// Dependent variables of the event study, in table order.
pub const DEPENDENTS: [&str; 3] = ["r_d", "r_a", "vol_change_x100"];
/// Covariate labels, in column order.
pub const COVARIATES: [&str; 4] = ["Δλ", "Δ#questions", "ΔDuration Q&A", "ΔDuration speech Chair"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub conference_id: String,
    pub stage: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentifyRecord {
    pub conference_id: String,
    #[serde(flatten)]
    pub diagnostics: IdentityDiagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentifySummary {
    pub meta: Meta,
    pub target_label: String,
    pub conferences: Vec<IdentifyRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EarRecord {
    pub conference_id: String,
    #[serde(flatten)]
    pub diagnostics: EarDiagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EarSummary {
    pub meta: Meta,
    pub conferences: Vec<EarRecord>,
}

/// One row of the attention table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttentionRow {
    pub conference_id: String,
    pub date: String,
    #[serde(rename = "Lambda")]
    pub lambda_level: f64,
    pub lambda: f64,
    pub delta_lambda: Option<f64>,
    pub reading_time_s: f64,
    pub observed_time_s: f64,
    pub span_end_s: f64,
    pub gaps: usize,
    pub lambda_floored: bool,
    pub n_questions_log: Option<f64>,
    pub duration_qa_log: Option<f64>,
    pub duration_chair_speech_log: Option<f64>,
    pub delta_n_questions: Option<f64>,
    pub delta_duration_qa: Option<f64>,
    pub delta_duration_chair_speech: Option<f64>,
}

impl AttentionRow {
    fn covariate(&self, i: usize) -> Option<f64> {
        match i {
            0 => self.delta_lambda,
            1 => self.delta_n_questions,
            2 => self.delta_duration_qa,
            3 => self.delta_duration_chair_speech,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttentionSummary {
    pub meta: Meta,
    pub rows: Vec<AttentionRow>,
    pub exclusions: Vec<Exclusion>,
    pub notes: Vec<Exclusion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    pub conference_id: String,
    pub tau1: String,
    pub tau2: String,
    pub tau3: String,
    pub tau4: String,
    pub r_d: f64,
    pub r_a: f64,
    pub sigma_b: f64,
    pub sigma_a: f64,
    pub vol_change: f64,
    pub returns_before: usize,
    pub returns_after: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedModel {
    pub covariate: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DependentTable {
    pub table: RenderedTable,
    pub skipped: Vec<SkippedModel>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EventStudySummary {
    pub meta: Meta,
    pub windows: Vec<WindowRow>,
    pub exclusions: Vec<Exclusion>,
    pub tables: Vec<DependentTable>,
}

fn to_csv<T: Serialize>(meta: &Meta, rows: &[T], headers: &[&str]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let err = |e: csv::Error| Error::Structural(format!("csv encoding: {e}"));
    w.write_record(headers).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| Error::Structural(e.to_string()))?)
        .expect("csv output is utf-8");
    Ok(format!("{}\n{body}", meta.comment_line()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::parse(path, e))?;
    io::write_text(path, &format!("{text}\n"))
}

const EXCLUSION_HEADERS: [&str; 3] = ["conference_id", "stage", "reason"];

impl Pipeline {
    fn conferences(&self) -> &[ConferenceRecord] {
        &self.registry.conferences
    }

    fn par_map<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&ConferenceRecord) -> T + Sync + Send,
    {
        let confs = self.conferences();
        self.pool.install(|| confs.par_iter().map(&f).collect())
    }

    fn require(&self, path: PathBuf, stage: &str) -> Result<PathBuf> {
        if path.is_file() {
            Ok(path)
        } else {
            Err(Error::MissingStage(format!(
                "{} not found; run `{stage}` first",
                path.display()
            )))
        }
    }

    /// Keeps the frames showing the target speaker.
    pub fn identify(&self) -> Result<IdentifySummary> {
        let gallery = io::read_gallery(&self.cfg.resolve(&self.cfg.gallery))?;
        let target = &self.cfg.target_label;
        if !gallery.contains_label(target) {
            return Err(Error::Config(format!("gallery has no entries labelled {target:?}")));
        }
        let dir = self.stage_dir("identify");
        let header = self.meta.comment_line();
        let results = self.par_map(|rec| -> Result<IdentifyRecord> {
            let frames = io::read_landmarks(&self.registry.resolve(&rec.landmarks))?;
            let (kept, diagnostics) = filter_speaker_frames(&frames, &gallery, target, &self.cfg.identity)?;
            io::write_landmarks(&dir.join(format!("{}.jsonl", rec.conference_id)), &kept, Some(&header))?;
            let warning = kept.is_empty().then(|| {
                warn!("{}: no frames of {target:?} after filtering", rec.conference_id);
                format!("no frames classified as {target}")
            });
            Ok(IdentifyRecord {
                conference_id: rec.conference_id.clone(),
                diagnostics,
                warning,
            })
        });
        let summary = IdentifySummary {
            meta: self.meta.clone(),
            target_label: target.clone(),
            conferences: results.into_iter().collect::<Result<_>>()?,
        };
        write_json(&dir.join("diagnostics.json"), &summary)?;
        Ok(summary)
    }

    /// Per-frame EAR series of the filtered streams.
    pub fn ear(&self) -> Result<EarSummary> {
        let src = self.stage_dir("identify");
        let dir = self.stage_dir("ear");
        let header = self.meta.comment_line();
        let results = self.par_map(|rec| -> Result<EarRecord> {
            let input = self.require(src.join(format!("{}.jsonl", rec.conference_id)), "identify")?;
            let frames = io::read_landmarks(&input)?;
            let (samples, diagnostics) = stream_ear(&frames, self.cfg.eye_map);
            io::write_text(
                &dir.join(format!("{}.csv", rec.conference_id)),
                &io::ear_csv(&samples, Some(&header)),
            )?;
            let warning = samples.is_empty().then(|| {
                warn!("{}: EAR series is empty", rec.conference_id);
                "empty EAR series".to_string()
            });
            Ok(EarRecord {
                conference_id: rec.conference_id.clone(),
                diagnostics,
                warning,
            })
        });
        let summary = EarSummary {
            meta: self.meta.clone(),
            conferences: results.into_iter().collect::<Result<_>>()?,
        };
        write_json(&dir.join("diagnostics.json"), &summary)?;
        Ok(summary)
    }

    /// Attention level, its log and first differences, and the benchmark
    /// variables, one row per conference in date order.
    pub fn attention(&self) -> Result<AttentionSummary> {
        let src = self.stage_dir("ear");
        let dir = self.stage_dir("attention");
        let cfg = &self.cfg.attention;

        type PerConference = (Option<AttentionRow>, Option<Exclusion>, Option<Exclusion>);
        let results = self.par_map(|rec| -> Result<PerConference> {
            let id = &rec.conference_id;
            let input = self.require(src.join(format!("{id}.csv")), "ear")?;
            let samples = io::read_ear_csv(&input)?;
            let exclude = |e: Error| {
                warn!("{id}: excluded: {e}");
                Exclusion {
                    conference_id: id.clone(),
                    stage: "attention".into(),
                    reason: e.to_string(),
                }
            };
            let fps = rec.fps.unwrap_or(self.cfg.default_fps);
            let integral = EarSeries::new(id.clone(), samples, fps).and_then(|s| integrate_attention(&s, cfg));
            let integral = match integral {
                Ok(v) => v,
                Err(e) => return Ok((None, Some(exclude(e)), None)),
            };
            let level = match log_level(integral.lambda_level, cfg.lambda_floor, id) {
                Ok(v) => v,
                Err(e) => return Ok((None, Some(exclude(e)), None)),
            };

            let transcript = io::read_text(&self.registry.resolve(&rec.transcript))?;
            let segments = io::read_segments(&self.registry.resolve(&rec.segments), id)?;
            let (qa_start, qa_end) = rec.qa_bounds_s();
            let (bench, note) = match benchmark_variables(&transcript, &segments, qa_start, qa_end) {
                Ok(b) => (Some(b), None),
                Err(e) => {
                    warn!("{id}: benchmark variables unavailable: {e}");
                    (
                        None,
                        Some(Exclusion {
                            conference_id: id.clone(),
                            stage: "benchmark".into(),
                            reason: e.to_string(),
                        }),
                    )
                }
            };
            let pick = |f: fn(&Benchmark) -> f64| bench.as_ref().map(f);
            Ok((
                Some(AttentionRow {
                    conference_id: id.clone(),
                    date: rec.date.to_string(),
                    lambda_level: integral.lambda_level,
                    lambda: level.value,
                    delta_lambda: None,
                    reading_time_s: integral.reading_time_s,
                    observed_time_s: integral.observed_time_s,
                    span_end_s: integral.span_end_s,
                    gaps: integral.gaps,
                    lambda_floored: level.floored,
                    n_questions_log: pick(|b| b.n_questions_log),
                    duration_qa_log: pick(|b| b.duration_qa_log),
                    duration_chair_speech_log: pick(|b| b.duration_chair_speech_log),
                    delta_n_questions: None,
                    delta_duration_qa: None,
                    delta_duration_chair_speech: None,
                }),
                None,
                note,
            ))
        });

        let mut rows = Vec::new();
        let mut exclusions = Vec::new();
        let mut notes = Vec::new();
        for r in results {
            let (row, excl, note) = r?;
            rows.extend(row);
            exclusions.extend(excl);
            notes.extend(note);
        }
        fill_deltas(&mut rows);

        let headers = [
            "conference_id",
            "date",
            "Lambda",
            "lambda",
            "delta_lambda",
            "reading_time_s",
            "observed_time_s",
            "span_end_s",
            "gaps",
            "lambda_floored",
            "n_questions_log",
            "duration_qa_log",
            "duration_chair_speech_log",
            "delta_n_questions",
            "delta_duration_qa",
            "delta_duration_chair_speech",
        ];
        io::write_text(&dir.join("attention.csv"), &to_csv(&self.meta, &rows, &headers)?)?;
        let mut all_excl = exclusions.clone();
        all_excl.extend(notes.iter().cloned());
        io::write_text(&dir.join("exclusions.csv"), &to_csv(&self.meta, &all_excl, &EXCLUSION_HEADERS)?)?;
        let summary = AttentionSummary {
            meta: self.meta.clone(),
            rows,
            exclusions,
            notes,
        };
        write_json(&dir.join("diagnostics.json"), &summary)?;
        Ok(summary)
    }

    /// Event windows per conference and the dependent x covariate grid of
    /// univariate regressions.
    pub fn eventstudy(&self) -> Result<EventStudySummary> {
        let attention_csv = self.require(self.stage_dir("attention").join("attention.csv"), "attention")?;
        let rows = read_attention(&attention_csv)?;
        let prices = io::read_prices(&self.cfg.resolve(&self.cfg.prices))?;
        let default_close = parse_close(&self.cfg.market.trading_close)?;
        let records: HashMap<&str, &ConferenceRecord> =
            self.conferences().iter().map(|c| (c.conference_id.as_str(), c)).collect();
        let dir = self.stage_dir("eventstudy");

        let stats: Vec<std::result::Result<(EventWindowStats, WindowRow), Exclusion>> = self.pool.install(|| {
            rows.par_iter()
                .map(|row| {
                    let id = row.conference_id.as_str();
                    let excl = |e: Error| {
                        warn!("{id}: excluded: {e}");
                        Exclusion {
                            conference_id: id.to_string(),
                            stage: "eventstudy".into(),
                            reason: e.to_string(),
                        }
                    };
                    let rec = records
                        .get(id)
                        .ok_or_else(|| excl(Error::Config(format!("{id} is not in the registry"))))?;
                    let close = match &rec.trading_close {
                        Some(s) => parse_close(s).map_err(excl)?,
                        None => default_close,
                    };
                    let tau4 = close_on_day(rec.conference_end, close).map_err(excl)?;
                    let tl = build_timeline(rec.qa_start, rec.conference_end, tau4).map_err(excl)?;
                    let st = event_window_stats(id, &prices, &tl).map_err(excl)?;
                    let w = WindowRow {
                        conference_id: id.to_string(),
                        tau1: tl.tau1.to_rfc3339(),
                        tau2: tl.tau2.to_rfc3339(),
                        tau3: tl.tau3.to_rfc3339(),
                        tau4: tl.tau4.to_rfc3339(),
                        r_d: st.r_d,
                        r_a: st.r_a,
                        sigma_b: st.sigma_b,
                        sigma_a: st.sigma_a,
                        vol_change: st.vol_change,
                        returns_before: st.returns_before,
                        returns_after: st.returns_after,
                    };
                    Ok((st, w))
                })
                .collect()
        });

        let mut windows = Vec::new();
        let mut exclusions = Vec::new();
        let mut joined: Vec<(&AttentionRow, EventWindowStats)> = Vec::new();
        for (row, s) in rows.iter().zip(stats) {
            match s {
                Ok((st, w)) => {
                    windows.push(w);
                    joined.push((row, st));
                }
                Err(e) => exclusions.push(e),
            }
        }
        let usable = joined.iter().filter(|(r, _)| r.delta_lambda.is_some()).count();
        if usable < 3 {
            return Err(Error::InsufficientData(format!(
                "only {usable} conferences have both event windows and an attention change; need at least 3"
            )));
        }

        let window_headers = [
            "conference_id",
            "tau1",
            "tau2",
            "tau3",
            "tau4",
            "r_d",
            "r_a",
            "sigma_b",
            "sigma_a",
            "vol_change",
            "returns_before",
            "returns_after",
        ];
        io::write_text(&dir.join("windows.csv"), &to_csv(&self.meta, &windows, &window_headers)?)?;
        io::write_text(&dir.join("exclusions.csv"), &to_csv(&self.meta, &exclusions, &EXCLUSION_HEADERS)?)?;

        let mut tables = Vec::new();
        for (d, dependent) in DEPENDENTS.iter().enumerate() {
            let y_of = |st: &EventWindowStats| match d {
                0 => st.r_d,
                1 => st.r_a,
                _ => st.vol_change * 100.0,
            };
            let mut results = Vec::new();
            let mut labels = Vec::new();
            let mut skipped = Vec::new();
            for (c, covariate) in COVARIATES.iter().enumerate() {
                let (mut y, mut x, mut ids) = (Vec::new(), Vec::new(), Vec::new());
                for (row, st) in &joined {
                    if let Some(v) = row.covariate(c) {
                        y.push(y_of(st));
                        x.push(v);
                        ids.push(row.conference_id.clone());
                    }
                }
                match RegressionInput::new(y, x, ids).and_then(|inp| ols_univariate(&inp)) {
                    Ok(r) => {
                        results.push(r);
                        labels.push(*covariate);
                    }
                    Err(e) => {
                        warn!("{dependent} on {covariate}: skipped: {e}");
                        skipped.push(SkippedModel {
                            covariate: covariate.to_string(),
                            reason: e.to_string(),
                        });
                    }
                }
            }
            let table = render_table(&results, dependent, &labels);
            let base = dir.join(format!("table_{dependent}"));
            io::write_text(&base.with_extension("txt"), &format!("{}\n{}", self.meta.comment_line(), table.text))?;
            io::write_text(&base.with_extension("csv"), &format!("{}\n{}", self.meta.comment_line(), table.csv))?;
            #[derive(Serialize)]
            struct TableFile<'a> {
                meta: &'a Meta,
                #[serde(flatten)]
                table: &'a RenderedTable,
                skipped: &'a [SkippedModel],
            }
            write_json(
                &base.with_extension("json"),
                &TableFile {
                    meta: &self.meta,
                    table: &table,
                    skipped: &skipped,
                },
            )?;
            tables.push(DependentTable { table, skipped });
        }

        Ok(EventStudySummary {
            meta: self.meta.clone(),
            windows,
            exclusions,
            tables,
        })
    }
}

/// Differences between consecutive rows (already in date order); a delta
/// needs both neighbours to carry the value.
fn fill_deltas(rows: &mut [AttentionRow]) {
    for i in 1..rows.len() {
        let (prev, cur) = (rows[i - 1].clone(), &mut rows[i]);
        let diff = |a: Option<f64>, b: Option<f64>| Some(b? - a?);
        cur.delta_lambda = Some(cur.lambda - prev.lambda);
        cur.delta_n_questions = diff(prev.n_questions_log, cur.n_questions_log);
        cur.delta_duration_qa = diff(prev.duration_qa_log, cur.duration_qa_log);
        cur.delta_duration_chair_speech = diff(prev.duration_chair_speech_log, cur.duration_chair_speech_log);
    }
}

pub fn read_attention(path: &Path) -> Result<Vec<AttentionRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::parse(path, e))?;
    rdr.deserialize()
        .map(|r| r.map_err(|e| Error::parse(path, e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attention::delta_series;

    fn row(id: &str, lambda: f64, q: Option<f64>) -> AttentionRow {
        AttentionRow {
            conference_id: id.into(),
            date: "2012-01-01".into(),
            lambda_level: lambda.exp(),
            lambda,
            delta_lambda: None,
            reading_time_s: 1.0,
            observed_time_s: 2.0,
            span_end_s: 3.0,
            gaps: 0,
            lambda_floored: false,
            n_questions_log: q,
            duration_qa_log: Some(7.0),
            duration_chair_speech_log: Some(6.0),
            delta_n_questions: None,
            delta_duration_qa: None,
            delta_duration_chair_speech: None,
        }
    }

    #[test]
    fn deltas_follow_row_order() {
        let mut rows = vec![row("a", 0.0, Some(1.0)), row("b", 0.5, None), row("c", 0.2, Some(2.0))];
        fill_deltas(&mut rows);
        let lambdas: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
        let expected = delta_series(&lambdas).unwrap();
        assert_eq!(rows[0].delta_lambda, None);
        assert_eq!(rows[1].delta_lambda, Some(expected[0]));
        assert_eq!(rows[2].delta_lambda, Some(expected[1]));
        assert_eq!(rows[1].delta_n_questions, None);
        assert_eq!(rows[2].delta_n_questions, None);
        assert_eq!(rows[2].delta_duration_qa, Some(0.0));
    }

    #[test]
    fn attention_csv_round_trip() {
        let mut rows = vec![row("a", 0.1, Some(1.0)), row("b", 0.7, None)];
        fill_deltas(&mut rows);
        let meta = Meta { tool: "t".into(), version: "0".into(), config_hash: "h".into() };
        let headers = [
            "conference_id", "date", "Lambda", "lambda", "delta_lambda", "reading_time_s", "observed_time_s",
            "span_end_s", "gaps", "lambda_floored", "n_questions_log", "duration_qa_log",
            "duration_chair_speech_log", "delta_n_questions", "delta_duration_qa", "delta_duration_chair_speech",
        ];
        let text = to_csv(&meta, &rows, &headers).unwrap();
        assert!(text.starts_with("# t 0 config=h\nconference_id,date,Lambda,lambda,delta_lambda"));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        std::fs::write(&p, &text).unwrap();
        assert_eq!(read_attention(&p).unwrap(), rows);
    }
}
