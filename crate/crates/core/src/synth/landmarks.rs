use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::geometry::{FaceLandmarkFrame, Point2, EMBEDDING_DIM, FACE_POINTS};

/// Horizontal eye span in pixels; with symmetric lids at `cy +- h` the EAR
/// is `4h / (2 * 30) = h / 15`.
pub const EYE_SPAN_PX: f64 = 30.0;

const LEFT_EYE_CENTER: (f64, f64) = (160.0, 180.0);
const RIGHT_EYE_CENTER: (f64, f64) = (240.0, 180.0);

/// Six eye landmarks (`l1..l6`) whose EAR equals `ear`.
pub fn eye_points(center: (f64, f64), ear: f64) -> [Point2; 6] {
    let (cx, cy) = center;
    let h = ear * EYE_SPAN_PX / 2.0;
    let half = EYE_SPAN_PX / 2.0;
    let lid = EYE_SPAN_PX / 6.0;
    [
        Point2::new(cx - half, cy),
        Point2::new(cx - lid, cy - h),
        Point2::new(cx + lid, cy - h),
        Point2::new(cx + half, cy),
        Point2::new(cx + lid, cy + h),
        Point2::new(cx - lid, cy + h),
    ]
}

/// A neutral 68-point face, eyes excluded (they are placed per frame).
fn template() -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(FACE_POINTS);
    // jaw 0..=16
    for i in 0..17 {
        let a = std::f64::consts::PI * (i as f64 / 16.0);
        pts.push((200.0 - 110.0 * a.cos(), 190.0 + 120.0 * a.sin()));
    }
    // brows 17..=26
    for i in 0..5 {
        pts.push((125.0 + 14.0 * i as f64, 150.0 - 6.0 * (2.0 - (i as f64 - 2.0).abs())));
    }
    for i in 0..5 {
        pts.push((219.0 + 14.0 * i as f64, 150.0 - 6.0 * (2.0 - (i as f64 - 2.0).abs())));
    }
    // nose bridge 27..=30, base 31..=35
    for i in 0..4 {
        pts.push((200.0, 180.0 + 15.0 * i as f64));
    }
    for i in 0..5 {
        pts.push((184.0 + 8.0 * i as f64, 240.0 - 3.0 * (2.0 - (i as f64 - 2.0).abs())));
    }
    // eyes 36..=47 placeholders
    pts.extend(std::iter::repeat_n((0.0, 0.0), 12));
    // outer lip 48..=59, inner lip 60..=67
    for i in 0..12 {
        let a = 2.0 * std::f64::consts::PI * i as f64 / 12.0;
        pts.push((200.0 - 40.0 * a.cos(), 275.0 + 14.0 * a.sin()));
    }
    for i in 0..8 {
        let a = 2.0 * std::f64::consts::PI * i as f64 / 8.0;
        pts.push((200.0 - 28.0 * a.cos(), 275.0 + 6.0 * a.sin()));
    }
    debug_assert_eq!(pts.len(), FACE_POINTS);
    pts
}

fn round_to(v: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (v * s).round() / s
}

/// Builds one frame. The head moves by whole pixels so the eye geometry
/// (and the EAR) stays exact; other landmarks carry sub-pixel noise.
pub fn face_frame(
    conference_id: &str,
    frame_index: u64,
    timestamp_s: f64,
    ear: f64,
    embedding: Option<Vec<f64>>,
    rng: &mut impl Rng,
) -> FaceLandmarkFrame {
    let dx = rng.random_range(-3i32..=3) as f64;
    let dy = rng.random_range(-3i32..=3) as f64;
    let jitter = Normal::new(0.0, 0.4).expect("valid sd");
    let mut points: Vec<Point2> = template()
        .into_iter()
        .map(|(x, y)| {
            Point2::new(
                round_to(x + dx + jitter.sample(rng), 2),
                round_to(y + dy + jitter.sample(rng), 2),
            )
        })
        .collect();
    let shift = |(x, y): (f64, f64)| (x + dx, y + dy);
    points[36..42].copy_from_slice(&eye_points(shift(LEFT_EYE_CENTER), ear));
    points[42..48].copy_from_slice(&eye_points(shift(RIGHT_EYE_CENTER), ear));
    FaceLandmarkFrame {
        conference_id: conference_id.to_string(),
        frame_index,
        timestamp_s,
        points,
        embedding,
    }
}

/// Noisy embedding around a cluster center, rounded to 4 decimals.
pub fn sample_embedding(center: &[f64], sd: f64, rng: &mut impl Rng) -> Vec<f64> {
    debug_assert_eq!(center.len(), EMBEDDING_DIM);
    let n = Normal::new(0.0, sd).expect("valid sd");
    center.iter().map(|c| round_to(c + n.sample(rng), 4)).collect()
}
