//! On-disk formats: landmark JSON-lines, gallery JSON, EAR / segment /
//! price CSVs and plain-text transcripts.
//!
//! Text outputs may start with `#` comment lines carrying provenance; all
//! readers here skip them.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::DateTime;
use serde::{Deserialize, Serialize};

use crate::attention::{Segment, SpeakerSegments};
use crate::error::{Error, Result};
use crate::geometry::{EarSample, FaceLandmarkFrame};
use crate::identity::{Embedding, Gallery, GalleryEntry};
use crate::market::{PriceBar, PriceSeries};

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn csv_reader(path: &Path) -> Result<csv::Reader<BufReader<File>>> {
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(open(path)?))
}

fn expect_headers(rdr: &mut csv::Reader<BufReader<File>>, path: &Path, expected: &[&str]) -> Result<()> {
    let headers = rdr.headers().map_err(|e| Error::parse(path, e))?;
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(Error::parse(
            path,
            format!("expected header {:?}, found {:?}", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

/// Reads a landmark stream. Frames are validated and must be in
/// nondecreasing timestamp order per conference.
pub fn read_landmarks(path: &Path) -> Result<Vec<FaceLandmarkFrame>> {
    let mut frames: Vec<FaceLandmarkFrame> = Vec::new();
    for (lineno, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let frame: FaceLandmarkFrame = serde_json::from_str(trimmed)
            .map_err(|e| Error::parse(path, format!("line {}: {e}", lineno + 1)))?;
        frame
            .validate()
            .map_err(|e| Error::parse(path, format!("line {}: {e}", lineno + 1)))?;
        if let Some(prev) = frames.iter().rev().find(|f| f.conference_id == frame.conference_id) {
            if frame.timestamp_s < prev.timestamp_s {
                return Err(Error::parse(
                    path,
                    format!(
                        "line {}: frame {} goes back in time ({} < {})",
                        lineno + 1,
                        frame.frame_index,
                        frame.timestamp_s,
                        prev.timestamp_s
                    ),
                ));
            }
        }
        frames.push(frame);
    }
    Ok(frames)
}

pub fn write_landmarks(path: &Path, frames: &[FaceLandmarkFrame], header: Option<&str>) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    if let Some(h) = header {
        writeln!(w, "{h}").map_err(io)?;
    }
    for f in frames {
        serde_json::to_writer(&mut w, f).map_err(|e| Error::parse(path, e))?;
        w.write_all(b"\n").map_err(io)?;
    }
    w.flush().map_err(io)
}

#[derive(Debug, Serialize, Deserialize)]
struct GalleryRecord {
    label: String,
    embedding: Vec<f64>,
}

pub fn read_gallery(path: &Path) -> Result<Gallery> {
    let records: Vec<GalleryRecord> =
        serde_json::from_reader(open(path)?).map_err(|e| Error::parse(path, e))?;
    let entries = records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(GalleryEntry {
                label: r.label,
                embedding: Embedding::new(r.embedding)
                    .map_err(|e| Error::parse(path, format!("entry {i}: {e}")))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Gallery::new(entries).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn write_gallery(path: &Path, gallery: &Gallery) -> Result<()> {
    let records: Vec<GalleryRecord> = gallery
        .entries()
        .iter()
        .map(|e| GalleryRecord {
            label: e.label.clone(),
            embedding: e.embedding.as_slice().to_vec(),
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&records).map_err(|e| Error::parse(path, e))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_ear_csv(path: &Path) -> Result<Vec<EarSample>> {
    let mut rdr = csv_reader(path)?;
    expect_headers(&mut rdr, path, &["timestamp_s", "ear"])?;
    rdr.deserialize::<(f64, f64)>()
        .map(|row| {
            let (timestamp_s, value) = row.map_err(|e| Error::parse(path, e))?;
            Ok(EarSample { timestamp_s, value })
        })
        .collect()
}

pub fn ear_csv(samples: &[EarSample], header: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(h) = header {
        s.push_str(h);
        s.push('\n');
    }
    s.push_str("timestamp_s,ear\n");
    for e in samples {
        s.push_str(&format!("{},{}\n", e.timestamp_s, e.value));
    }
    s
}

pub fn read_segments(path: &Path, conference_id: &str) -> Result<SpeakerSegments> {
    let mut rdr = csv_reader(path)?;
    expect_headers(&mut rdr, path, &["start_s", "end_s", "speaker"])?;
    let segments = rdr
        .deserialize::<(f64, f64, String)>()
        .map(|row| {
            let (start_s, end_s, speaker) = row.map_err(|e| Error::parse(path, e))?;
            Ok(Segment {
                start_s,
                end_s,
                speaker: speaker.parse().map_err(|e| Error::parse(path, e))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SpeakerSegments::new(conference_id, segments).map_err(|e| Error::parse(path, e))
}

pub fn segments_csv(segments: &SpeakerSegments) -> String {
    let mut s = String::from("start_s,end_s,speaker\n");
    for seg in segments.segments() {
        let tag = match seg.speaker {
            crate::attention::Speaker::Chair => "chair",
            crate::attention::Speaker::Reporter => "reporter",
        };
        s.push_str(&format!("{},{},{}\n", seg.start_s, seg.end_s, tag));
    }
    s
}

pub fn read_prices(path: &Path) -> Result<PriceSeries> {
    let mut rdr = csv_reader(path)?;
    expect_headers(&mut rdr, path, &["timestamp", "price"])?;
    let bars = rdr
        .deserialize::<(String, f64)>()
        .map(|row| {
            let (ts, price) = row.map_err(|e| Error::parse(path, e))?;
            let timestamp = DateTime::parse_from_rfc3339(&ts)
                .map_err(|e| Error::parse(path, format!("timestamp {ts:?}: {e}")))?;
            Ok(PriceBar { timestamp, price })
        })
        .collect::<Result<Vec<_>>>()?;
    PriceSeries::new(bars).map_err(|e| Error::parse(path, e))
}

pub fn prices_csv(bars: &[PriceBar]) -> String {
    let mut s = String::from("timestamp,price\n");
    for b in bars {
        s.push_str(&format!("{},{}\n", b.timestamp.to_rfc3339(), b.price));
    }
    s
}
