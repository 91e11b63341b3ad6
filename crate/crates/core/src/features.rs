//! Feature extraction from curated landmark pairs.
//!
//! Each frame is normalized on its own: landmarks are centered on the
//! midpoint between the eyes, then each axis is Min-Max scaled over the
//! frame's 68 points so position and size differences between faces drop
//! out. A record then yields one of two 136-value vectors: the normalized
//! peak coordinates (`absolute`) or the normalized peak minus the
//! normalized neutral (`displacement`). Layout is fixed: all 68 x values
//! first, then all 68 y values.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{CuratedDataset, EmotionLabel, LandmarkFrame, SubjectRecord};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::FEATURE_DIM;

/// Landmark index ranges of the standard 68-point scheme.
pub const RIGHT_EYE: std::ops::Range<usize> = 36..42;
pub const LEFT_EYE: std::ops::Range<usize> = 42..48;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedFrame<T> {
    /// 68 points, every coordinate in `[0, 1]`.
    pub points: Vec<(T, T)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    Absolute,
    Displacement,
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureMode::Absolute => "absolute",
            FeatureMode::Displacement => "displacement",
        })
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<FeatureMode> {
        match s.to_ascii_lowercase().as_str() {
            "absolute" => Ok(FeatureMode::Absolute),
            "displacement" => Ok(FeatureMode::Displacement),
            _ => Err(Error::invalid(format!("unknown feature mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    pub subject_id: String,
    pub emotion: EmotionLabel,
    pub mode: FeatureMode,
    /// 136 values: x0..x67 then y0..y67.
    pub values: Vec<T>,
}

/// Midpoint between the two eye centers; each center is the arithmetic
/// mean of that eye's six landmarks (right eye 36-41, left eye 42-47).
pub fn eye_midpoint<T: Scalar>(frame: &LandmarkFrame<T>) -> (T, T) {
    let mean = |range: std::ops::Range<usize>| {
        let mut sx = T::zero();
        let mut sy = T::zero();
        for &(x, y) in &frame.points[range] {
            sx += x;
            sy += y;
        }
        let n = T::c(6.0);
        (sx / n, sy / n)
    };
    let (rx, ry) = mean(RIGHT_EYE);
    let (lx, ly) = mean(LEFT_EYE);
    let two = T::c(2.0);
    ((rx + lx) / two, (ry + ly) / two)
}

/// Center the frame on the eye midpoint, then Min-Max scale each axis
/// independently over the frame's own 68 points, so the axis minimum maps
/// to 0 and the maximum to 1. An axis with zero range maps to the constant
/// 0.5. Centering is absorbed by the affine Min-Max step and is retained
/// for clarity and diagnostic use of the midpoint.
pub fn normalize_frame<T: Scalar>(frame: &LandmarkFrame<T>) -> NormalizedFrame<T> {
    let (mx, my) = eye_midpoint(frame);
    let centered: Vec<(T, T)> = frame.points.iter().map(|&(x, y)| (x - mx, y - my)).collect();

    let mut min_x = T::infinity();
    let mut max_x = T::neg_infinity();
    let mut min_y = T::infinity();
    let mut max_y = T::neg_infinity();
    for &(x, y) in &centered {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }

    let scale = |v: T, min: T, max: T| {
        if max == min {
            T::c(0.5)
        } else {
            (v - min) / (max - min)
        }
    };
    let points = centered
        .iter()
        .map(|&(x, y)| (scale(x, min_x, max_x), scale(y, min_y, max_y)))
        .collect();
    NormalizedFrame { points }
}

/// The 68 points a record contributes under the given mode: the normalized
/// peak for `absolute`, or the per-landmark difference peak − neutral (each
/// frame normalized independently) for `displacement`.
pub fn record_points<T: Scalar>(record: &SubjectRecord<T>, mode: FeatureMode) -> Vec<(T, T)> {
    match mode {
        FeatureMode::Absolute => normalize_frame(&record.peak).points,
        FeatureMode::Displacement => {
            let peak = normalize_frame(&record.peak).points;
            let neutral = normalize_frame(&record.neutral).points;
            peak.iter()
                .zip(&neutral)
                .map(|(&(px, py), &(nx, ny))| (px - nx, py - ny))
                .collect()
        }
    }
}

/// Flatten points into the fixed layout: x0..x67 then y0..y67.
fn flatten<T: Scalar>(points: &[(T, T)]) -> Vec<T> {
    let mut values = Vec::with_capacity(FEATURE_DIM);
    values.extend(points.iter().map(|&(x, _)| x));
    values.extend(points.iter().map(|&(_, y)| y));
    values
}

pub fn features_for<T: Scalar>(record: &SubjectRecord<T>, mode: FeatureMode) -> FeatureVector<T> {
    FeatureVector {
        subject_id: record.subject_id.clone(),
        emotion: record.emotion,
        mode,
        values: flatten(&record_points(record, mode)),
    }
}

/// Normalized peak-frame coordinates.
pub fn absolute_features<T: Scalar>(record: &SubjectRecord<T>) -> FeatureVector<T> {
    features_for(record, FeatureMode::Absolute)
}

/// Normalized peak minus normalized neutral.
pub fn displacement_features<T: Scalar>(record: &SubjectRecord<T>) -> FeatureVector<T> {
    features_for(record, FeatureMode::Displacement)
}

/// One feature row per record, in dataset order, plus the class index of
/// each row (indices into [`EmotionLabel::ALL`]).
pub fn build_feature_matrix<T: Scalar>(
    dataset: &CuratedDataset<T>,
    mode: FeatureMode,
) -> Result<(Matrix<T>, Vec<usize>)> {
    if dataset.is_empty() {
        return Err(Error::invalid("feature matrix of an empty dataset"));
    }
    let mut matrix = Matrix::zeros(dataset.len(), FEATURE_DIM);
    let mut labels = Vec::with_capacity(dataset.len());
    for (i, record) in dataset.records.iter().enumerate() {
        let vector = features_for(record, mode);
        matrix.row_mut(i).copy_from_slice(&vector.values);
        labels.push(record.emotion.index());
    }
    Ok((matrix, labels))
}

/// CSV export: header `subject_id,emotion,f0,...,f135`, one row per record.
pub fn write_feature_csv<T: Scalar, W: Write>(
    dataset: &CuratedDataset<T>,
    mode: FeatureMode,
    writer: &mut W,
) -> Result<()> {
    let mut header = String::from("subject_id,emotion");
    for i in 0..FEATURE_DIM {
        header.push_str(&format!(",f{i}"));
    }
    header.push('\n');
    writer.write_all(header.as_bytes())?;
    for record in &dataset.records {
        let vector = features_for(record, mode);
        let mut row = format!("{},{}", vector.subject_id, vector.emotion);
        for v in &vector.values {
            row.push_str(&format!(",{v}"));
        }
        row.push('\n');
        writer.write_all(row.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::FrameRole;
    use crate::LANDMARK_COUNT;

    fn frame(points: Vec<(f64, f64)>) -> LandmarkFrame<f64> {
        LandmarkFrame::new("t".to_string(), FrameRole::Peak, points).unwrap()
    }

    /// 68 points with both eyes collapsed to fixed locations and the rest
    /// spread deterministically.
    fn frame_with_eyes(right: (f64, f64), left: (f64, f64)) -> LandmarkFrame<f64> {
        let mut points: Vec<(f64, f64)> = (0..LANDMARK_COUNT)
            .map(|i| (i as f64, 2.0 * i as f64))
            .collect();
        for p in &mut points[RIGHT_EYE] {
            *p = right;
        }
        for p in &mut points[LEFT_EYE] {
            *p = left;
        }
        frame(points)
    }

    #[test]
    fn eye_midpoint_symmetric_case() {
        let f = frame_with_eyes((10.0, 10.0), (30.0, 10.0));
        assert_eq!(eye_midpoint(&f), (20.0, 10.0));
    }

    #[test]
    fn eye_midpoint_coincident_eyes() {
        let f = frame_with_eyes((0.0, 0.0), (0.0, 0.0));
        assert_eq!(eye_midpoint(&f), (0.0, 0.0));
    }

    #[test]
    fn eye_midpoint_hexagonal_eyes() {
        // Unit hexagons: vertex k at center + (cos 60k°, sin 60k°). The six
        // offsets cancel exactly, so each eye center is the hexagon center.
        let s = 3.0f64.sqrt() / 2.0;
        let hex = |cx: f64, cy: f64| -> Vec<(f64, f64)> {
            vec![
                (cx + 1.0, cy),
                (cx + 0.5, cy + s),
                (cx - 0.5, cy + s),
                (cx - 1.0, cy),
                (cx - 0.5, cy - s),
                (cx + 0.5, cy - s),
            ]
        };
        let mut points: Vec<(f64, f64)> = (0..LANDMARK_COUNT).map(|i| (i as f64, i as f64)).collect();
        points.splice(RIGHT_EYE, hex(5.0, 5.0));
        points.splice(LEFT_EYE, hex(9.0, 5.0));
        let f = frame(points);
        assert_eq!(eye_midpoint(&f), (7.0, 5.0));
    }

    /// Frame with eye midpoint (0, 4), x spanning [-2, 2] and y spanning
    /// [0, 8]: after centering the ranges are [-2, 2] and [-4, 4], so the
    /// corner points map to (0,0) and (1,1) and the middle one to (0.5, 0.5).
    fn ranged_frame() -> LandmarkFrame<f64> {
        let mut points = vec![(0.0, 4.0); LANDMARK_COUNT];
        points[0] = (-2.0, 0.0);
        points[1] = (2.0, 8.0);
        points[2] = (0.0, 4.0);
        frame(points)
    }

    #[test]
    fn normalize_maps_extremes_and_midpoint() {
        let n = normalize_frame(&ranged_frame());
        assert_eq!(n.points[0], (0.0, 0.0));
        assert_eq!(n.points[1], (1.0, 1.0));
        assert_eq!(n.points[2], (0.5, 0.5));
    }

    #[test]
    fn normalize_degenerate_frame_is_all_half() {
        let f = frame(vec![(3.25, -7.5); LANDMARK_COUNT]);
        let n = normalize_frame(&f);
        assert!(n.points.iter().all(|&p| p == (0.5, 0.5)));
    }

    #[test]
    fn normalize_output_is_within_unit_square() {
        let mut points: Vec<(f64, f64)> = (0..LANDMARK_COUNT)
            .map(|i| ((i * i % 37) as f64 * 3.7 - 40.0, (i * 7 % 23) as f64 * 9.1))
            .collect();
        points[50] = (1000.0, -500.0);
        let n = normalize_frame(&frame(points));
        for &(x, y) in &n.points {
            assert!((0.0..=1.0).contains(&x));
            assert!((0.0..=1.0).contains(&y));
        }
    }

    #[test]
    fn normalize_is_translation_invariant() {
        let base = ranged_frame();
        let shifted = frame(base.points.iter().map(|&(x, y)| (x + 37.0, y - 12.0)).collect());
        let a = normalize_frame(&base);
        let b = normalize_frame(&shifted);
        for (p, q) in a.points.iter().zip(&b.points) {
            assert!((p.0 - q.0).abs() < 1e-12);
            assert!((p.1 - q.1).abs() < 1e-12);
        }
    }

    fn record(neutral: LandmarkFrame<f64>, peak: LandmarkFrame<f64>) -> SubjectRecord<f64> {
        SubjectRecord {
            subject_id: "t".to_string(),
            emotion: EmotionLabel::Anger,
            neutral: LandmarkFrame {
                role: FrameRole::Neutral,
                ..neutral
            },
            peak,
        }
    }

    #[test]
    fn absolute_features_of_degenerate_frame_are_all_half() {
        let f = frame(vec![(9.0, 9.0); LANDMARK_COUNT]);
        let rec = record(f.clone(), f);
        let fv = absolute_features(&rec);
        assert_eq!(fv.mode, FeatureMode::Absolute);
        assert_eq!(fv.values.len(), FEATURE_DIM);
        assert!(fv.values.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn feature_layout_is_xs_then_ys() {
        let f = ranged_frame();
        let n = normalize_frame(&f);
        let rec = record(f.clone(), f);
        let fv = absolute_features(&rec);
        assert_eq!(fv.values[0], n.points[0].0);
        assert_eq!(fv.values[68], n.points[0].1);
        assert_eq!(fv.values[67], n.points[67].0);
        assert_eq!(fv.values[135], n.points[67].1);
    }

    #[test]
    fn uniform_scaling_about_eye_midpoint_is_removed() {
        let base = ranged_frame();
        let (mx, my) = eye_midpoint(&base);
        let scaled = frame(
            base.points
                .iter()
                .map(|&(x, y)| (mx + 2.0 * (x - mx), my + 2.0 * (y - my)))
                .collect(),
        );
        let a = absolute_features(&record(base.clone(), base));
        let b = absolute_features(&record(scaled.clone(), scaled));
        // Doubling is exact in binary floating point, so the normalized
        // results agree bit for bit.
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn displacement_of_identical_frames_is_zero() {
        let f = ranged_frame();
        let fv = displacement_features(&record(f.clone(), f));
        assert_eq!(fv.mode, FeatureMode::Displacement);
        assert!(fv.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn displacement_is_bounded_and_antisymmetric() {
        let neutral = frame_with_eyes((10.0, 12.0), (30.0, 12.0));
        let peak = frame_with_eyes((11.0, 13.0), (29.0, 11.0));
        let fwd = displacement_features(&record(neutral.clone(), peak.clone()));
        let rev = displacement_features(&record(peak, neutral));
        for (&a, &b) in fwd.values.iter().zip(&rev.values) {
            assert!((-1.0..=1.0).contains(&a));
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn displacement_recovers_known_offset_under_shared_anchors() {
        // Both frames share eye positions and min/max anchors, and the
        // axis ranges have width 128 (a power of two), so the expected
        // displacement is exact: moving landmark 5 by (16, -8) inside the
        // range shows up as (16/128, -8/128).
        let mut neutral_pts = vec![(64.0, 64.0); LANDMARK_COUNT];
        neutral_pts[0] = (0.0, 0.0);
        neutral_pts[1] = (128.0, 128.0);
        neutral_pts[5] = (32.0, 96.0);
        let mut peak_pts = neutral_pts.clone();
        peak_pts[5] = (48.0, 88.0);
        let rec = record(frame(neutral_pts), frame(peak_pts));
        let fv = displacement_features(&rec);
        assert_eq!(fv.values[5], 16.0 / 128.0);
        assert_eq!(fv.values[68 + 5], -8.0 / 128.0);
        let moved: Vec<usize> = fv
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(moved, vec![5, 73]);
    }

    fn tiny_dataset(n: usize, identical: bool) -> CuratedDataset<f64> {
        let records = (0..n)
            .map(|i| {
                let neutral = frame_with_eyes((10.0, 12.0), (30.0, 12.0));
                let peak = if identical {
                    neutral.clone()
                } else {
                    frame_with_eyes((10.0 + i as f64, 12.0), (30.0, 12.0 + i as f64))
                };
                SubjectRecord {
                    subject_id: format!("s{i}"),
                    emotion: EmotionLabel::ALL[i % 7],
                    neutral: LandmarkFrame {
                        role: FrameRole::Neutral,
                        ..neutral
                    },
                    peak,
                }
            })
            .collect();
        CuratedDataset {
            records,
            source: None,
        }
    }

    #[test]
    fn feature_matrix_has_expected_shape_and_order() {
        let dataset = tiny_dataset(3, false);
        let (matrix, labels) = build_feature_matrix(&dataset, FeatureMode::Absolute).unwrap();
        assert_eq!(matrix.rows(), 3);
        assert_eq!(matrix.cols(), FEATURE_DIM);
        assert_eq!(labels, vec![0, 1, 2]);
        let row0 = absolute_features(&dataset.records[0]);
        assert_eq!(matrix.row(0), row0.values.as_slice());
    }

    #[test]
    fn displacement_matrix_of_static_records_is_zero() {
        let dataset = tiny_dataset(2, true);
        let (matrix, _) = build_feature_matrix(&dataset, FeatureMode::Displacement).unwrap();
        assert!(matrix.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn empty_dataset_errors() {
        let dataset = CuratedDataset::<f64> {
            records: Vec::new(),
            source: None,
        };
        assert!(build_feature_matrix(&dataset, FeatureMode::Absolute).is_err());
    }

    #[test]
    fn feature_csv_has_exact_header_and_one_row_per_record() {
        let dataset = tiny_dataset(2, false);
        let mut buf = Vec::new();
        write_feature_csv(&dataset, FeatureMode::Displacement, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("subject_id,emotion,f0,f1,"));
        assert!(header.ends_with(",f135"));
        assert_eq!(header.split(',').count(), 2 + FEATURE_DIM);
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].starts_with("s0,anger,"));
        assert!(rows[1].starts_with("s1,contempt,"));
    }

    #[test]
    fn feature_mode_parses() {
        assert_eq!("absolute".parse::<FeatureMode>().unwrap(), FeatureMode::Absolute);
        assert_eq!("Displacement".parse::<FeatureMode>().unwrap(), FeatureMode::Displacement);
        assert!("raw".parse::<FeatureMode>().is_err());
    }
}
