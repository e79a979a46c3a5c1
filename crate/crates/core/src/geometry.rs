//! Landmark data model and eye-aspect-ratio (EAR) computation.
//!
//! Each eye is described by six landmarks `l1..l6`: `l1` the outer corner,
//! `l2`/`l3` on the upper lid, `l4` the inner corner and `l5`/`l6` on the
//! lower lid. The ratio of the two vertical lid distances to the horizontal
//! span is close to 0.3 for an open eye and falls toward zero as the lids
//! close or the gaze drops toward a desk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of landmarks in the standard face layout.
pub const FACE_POINTS: usize = 68;
/// Length of an identity embedding vector.
pub const EMBEDDING_DIM: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// The six landmarks of one eye in `l1..l6` order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeLandmarks {
    pub points: [Point2; 6],
}

impl EyeLandmarks {
    pub fn new(points: [Point2; 6]) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Structural("eye landmark is not finite".into()));
        }
        Ok(Self { points })
    }

    pub fn from_slice(points: &[Point2]) -> Result<Self> {
        let arr: [Point2; 6] = points.try_into().map_err(|_| {
            Error::Structural(format!("an eye needs 6 landmarks, got {}", points.len()))
        })?;
        Self::new(arr)
    }
}

/// Where the two eyes sit inside the 68-point layout (zero-based start
/// index of six consecutive points each).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EyeIndexMap {
    pub left_start: usize,
    pub right_start: usize,
}

impl EyeIndexMap {
    pub const STANDARD_68: EyeIndexMap = EyeIndexMap {
        left_start: 36,
        right_start: 42,
    };

    pub fn validate(&self) -> Result<()> {
        let overlap = self.left_start < self.right_start + 6 && self.right_start < self.left_start + 6;
        if self.left_start + 6 > FACE_POINTS || self.right_start + 6 > FACE_POINTS || overlap {
            return Err(Error::Config(format!(
                "eye index map {:?} does not fit two disjoint 6-point groups in {FACE_POINTS} points",
                self
            )));
        }
        Ok(())
    }
}

impl Default for EyeIndexMap {
    fn default() -> Self {
        Self::STANDARD_68
    }
}

/// One video frame: 68 landmarks, a timestamp in seconds from the start of
/// the conference and an optional identity embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceLandmarkFrame {
    pub conference_id: String,
    pub frame_index: u64,
    pub timestamp_s: f64,
    pub points: Vec<Point2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<f64>>,
}

impl FaceLandmarkFrame {
    /// Checks the per-frame invariants (point count, finiteness, timestamp
    /// sign, embedding length).
    pub fn validate(&self) -> Result<()> {
        if self.points.len() != FACE_POINTS {
            return Err(Error::Structural(format!(
                "frame {} has {} landmarks, expected {FACE_POINTS}",
                self.frame_index,
                self.points.len()
            )));
        }
        if self.points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Structural(format!(
                "frame {} has a non-finite landmark",
                self.frame_index
            )));
        }
        if !(self.timestamp_s.is_finite() && self.timestamp_s >= 0.0) {
            return Err(Error::Structural(format!(
                "frame {} has invalid timestamp {}",
                self.frame_index, self.timestamp_s
            )));
        }
        if let Some(e) = &self.embedding {
            if e.len() != EMBEDDING_DIM || e.iter().any(|v| !v.is_finite()) {
                return Err(Error::Structural(format!(
                    "frame {} embedding must have {EMBEDDING_DIM} finite entries, got {}",
                    self.frame_index,
                    e.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarSample {
    pub timestamp_s: f64,
    pub value: f64,
}

pub fn extract_eyes(frame: &FaceLandmarkFrame) -> Result<(EyeLandmarks, EyeLandmarks)> {
    extract_eyes_with(frame, EyeIndexMap::STANDARD_68)
}

pub fn extract_eyes_with(
    frame: &FaceLandmarkFrame,
    map: EyeIndexMap,
) -> Result<(EyeLandmarks, EyeLandmarks)> {
    if frame.points.len() != FACE_POINTS {
        return Err(Error::Structural(format!(
            "frame {} has {} landmarks, expected {FACE_POINTS}",
            frame.frame_index,
            frame.points.len()
        )));
    }
    let left = EyeLandmarks::from_slice(&frame.points[map.left_start..map.left_start + 6])?;
    let right = EyeLandmarks::from_slice(&frame.points[map.right_start..map.right_start + 6])?;
    Ok((left, right))
}

/// EAR of a single eye: `(|l2-l6| + |l3-l5|) / (2 |l1-l4|)`.
pub fn eye_ear(eye: &EyeLandmarks) -> Result<f64> {
    let [l1, l2, l3, l4, l5, l6] = eye.points;
    let span = l1.distance(&l4);
    if !(span > 0.0) {
        return Err(Error::DegenerateEye(
            "outer and inner eye corners coincide".into(),
        ));
    }
    Ok((l2.distance(&l6) + l3.distance(&l5)) / (2.0 * span))
}

/// Frame-level EAR: the mean of both eyes, stamped with the frame time.
pub fn frame_ear(frame: &FaceLandmarkFrame) -> Result<EarSample> {
    frame_ear_with(frame, EyeIndexMap::STANDARD_68)
}

pub fn frame_ear_with(frame: &FaceLandmarkFrame, map: EyeIndexMap) -> Result<EarSample> {
    let (left, right) = extract_eyes_with(frame, map)?;
    let tag = |e: Error| match e {
        Error::DegenerateEye(msg) => {
            Error::DegenerateEye(format!("frame {}: {msg}", frame.frame_index))
        }
        other => other,
    };
    let l = eye_ear(&left).map_err(tag)?;
    let r = eye_ear(&right).map_err(tag)?;
    Ok(EarSample {
        timestamp_s: frame.timestamp_s,
        value: (l + r) / 2.0,
    })
}

/// Tally of frames dropped while converting a stream to EAR samples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EarDiagnostics {
    pub frames: usize,
    pub valid: usize,
    pub degenerate: usize,
    pub malformed: usize,
}

/// Converts a frame stream to EAR samples, dropping frames whose eyes are
/// degenerate or whose layout is malformed.
pub fn stream_ear(frames: &[FaceLandmarkFrame], map: EyeIndexMap) -> (Vec<EarSample>, EarDiagnostics) {
    let mut diag = EarDiagnostics {
        frames: frames.len(),
        ..Default::default()
    };
    let mut out = Vec::with_capacity(frames.len());
    for f in frames {
        match frame_ear_with(f, map) {
            Ok(s) => {
                diag.valid += 1;
                out.push(s);
            }
            Err(Error::DegenerateEye(_)) => diag.degenerate += 1,
            Err(_) => diag.malformed += 1,
        }
    }
    (out, diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn reference_eye() -> EyeLandmarks {
        EyeLandmarks::new([p(0., 0.), p(1., 1.), p(2., 1.), p(3., 0.), p(2., -1.), p(1., -1.)]).unwrap()
    }

    fn frame_with(points: Vec<Point2>) -> FaceLandmarkFrame {
        FaceLandmarkFrame {
            conference_id: "c".into(),
            frame_index: 7,
            timestamp_s: 1.5,
            points,
            embedding: None,
        }
    }

    fn numbered_frame() -> FaceLandmarkFrame {
        frame_with((0..68).map(|i| p(i as f64, -(i as f64))).collect())
    }

    #[test]
    fn extract_picks_standard_indices() {
        let f = numbered_frame();
        let (l, r) = extract_eyes(&f).unwrap();
        assert_eq!(l.points.to_vec(), f.points[36..42].to_vec());
        assert_eq!(r.points.to_vec(), f.points[42..48].to_vec());
    }

    #[test]
    fn extract_rejects_wrong_count() {
        let mut f = numbered_frame();
        f.points.pop();
        let err = extract_eyes(&f).unwrap_err();
        assert!(matches!(err, Error::Structural(ref m) if m.contains("frame 7")));
    }

    #[test]
    fn extract_then_reembed_round_trips() {
        let f = numbered_frame();
        let (l, r) = extract_eyes(&f).unwrap();
        let mut g = f.points.clone();
        g[36..42].copy_from_slice(&l.points);
        g[42..48].copy_from_slice(&r.points);
        assert_eq!(g, f.points);
    }

    #[test]
    fn custom_index_map_validated() {
        assert!(EyeIndexMap { left_start: 36, right_start: 40 }.validate().is_err());
        assert!(EyeIndexMap { left_start: 0, right_start: 63 }.validate().is_err());
        assert!(EyeIndexMap { left_start: 0, right_start: 6 }.validate().is_ok());
    }

    #[test]
    fn ear_of_reference_eye_is_two_thirds() {
        assert!((eye_ear(&reference_eye()).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn closed_eye_has_zero_ear() {
        let e = EyeLandmarks::new([p(0., 0.), p(1., 0.2), p(2., 0.3), p(3., 0.), p(2., 0.3), p(1., 0.2)]).unwrap();
        assert_eq!(eye_ear(&e).unwrap(), 0.0);
    }

    #[test]
    fn coincident_corners_are_degenerate() {
        let e = EyeLandmarks::new([p(1., 1.), p(1., 2.), p(2., 2.), p(1., 1.), p(2., 0.), p(1., 0.)]).unwrap();
        assert!(matches!(eye_ear(&e), Err(Error::DegenerateEye(_))));
    }

    #[test]
    fn non_finite_eye_rejected() {
        let mut pts = reference_eye().points;
        pts[2].x = f64::NAN;
        assert!(EyeLandmarks::new(pts).is_err());
    }

    fn place_eyes(left: [Point2; 6], right: [Point2; 6]) -> FaceLandmarkFrame {
        let mut pts = vec![p(0., 0.); 68];
        pts[36..42].copy_from_slice(&left);
        pts[42..48].copy_from_slice(&right);
        frame_with(pts)
    }

    fn scaled_eye(ear: f64) -> [Point2; 6] {
        // span 10 with lids at +-h gives EAR = h / 5
        let h = ear * 5.0;
        [p(0., 0.), p(3., h), p(7., h), p(10., 0.), p(7., -h), p(3., -h)]
    }

    #[test]
    fn frame_ear_averages_eyes() {
        let f = place_eyes(scaled_eye(0.4), scaled_eye(0.2));
        let s = frame_ear(&f).unwrap();
        assert!((s.value - 0.3).abs() < 1e-15);
        assert_eq!(s.timestamp_s, 1.5);
    }

    #[test]
    fn mirrored_eyes_give_single_eye_value() {
        let left = scaled_eye(0.27);
        let right = left.map(|q| p(100.0 - q.x, q.y));
        let f = place_eyes(left, right);
        let single = eye_ear(&EyeLandmarks::new(left).unwrap()).unwrap();
        assert!((frame_ear(&f).unwrap().value - single).abs() < 1e-15);
    }

    #[test]
    fn frame_ear_of_reference_eyes() {
        let e = reference_eye().points;
        let f = place_eyes(e, e);
        assert!((frame_ear(&f).unwrap().value - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn stream_ear_tallies_invalid_frames() {
        let good = place_eyes(scaled_eye(0.3), scaled_eye(0.3));
        let mut degenerate = good.clone();
        degenerate.points[39] = degenerate.points[36];
        let mut short = good.clone();
        short.points.truncate(60);
        let (samples, diag) = stream_ear(&[good.clone(), degenerate, short, good], EyeIndexMap::default());
        assert_eq!(samples.len(), 2);
        assert_eq!(diag, EarDiagnostics { frames: 4, valid: 2, degenerate: 1, malformed: 1 });
    }

    #[test]
    fn frame_validation() {
        let mut f = numbered_frame();
        assert!(f.validate().is_ok());
        f.embedding = Some(vec![0.0; 127]);
        assert!(f.validate().is_err());
        f.embedding = Some(vec![0.0; 128]);
        f.timestamp_s = -1.0;
        assert!(f.validate().is_err());
    }

    fn arb_eye() -> impl Strategy<Value = [Point2; 6]> {
        proptest::array::uniform6((-50.0..50.0f64, -50.0..50.0f64))
            .prop_map(|a| a.map(|(x, y)| p(x, y)))
            .prop_filter("nondegenerate", |e| e[0].distance(&e[3]) > 1e-3)
    }

    proptest! {
        #[test]
        fn ear_nonnegative(eye in arb_eye()) {
            let v = eye_ear(&EyeLandmarks::new(eye).unwrap()).unwrap();
            prop_assert!(v >= 0.0 && v.is_finite());
        }

        #[test]
        fn frame_ear_exchange_symmetric(a in arb_eye(), b in arb_eye()) {
            let x = frame_ear(&place_eyes(a, b)).unwrap().value;
            let y = frame_ear(&place_eyes(b, a)).unwrap().value;
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
}
