//! Quartile/IQR statistics over landmark coordinates.
//!
//! For each emotion, every landmark coordinate (per axis, across samples)
//! gets a five-number boxplot summary with Tukey fences at 1.5·IQR, and
//! every (sample, landmark) point is sorted into one of three zones:
//! inside the quartile box, between the box and the fences ("whiskers"),
//! or outside the fences (outlier). The per-emotion zone percentages are
//! the headline numbers; the same fences drive the two outlier-handling
//! policies used before training.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::{CuratedDataset, EmotionLabel};
use crate::error::{Error, Result};
use crate::features::{record_points, FeatureMode};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::LANDMARK_COUNT;

/// Quantile by linear interpolation at the fractional rank `h = p·(n−1)`
/// of the sorted sample. `sorted` must be ascending and non-empty.
fn quantile_sorted<T: Scalar>(sorted: &[T], p: f64) -> T {
    let n = sorted.len();
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = T::c(h - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// (q1, median, q3) of the values, by linear interpolation at rank
/// `p·(n−1)`. Values must be finite.
pub fn quartiles<T: Scalar>(values: &[T]) -> Result<(T, T, T)> {
    if values.is_empty() {
        return Err(Error::invalid("quartiles of an empty list"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
    Ok((
        quantile_sorted(&sorted, 0.25),
        quantile_sorted(&sorted, 0.5),
        quantile_sorted(&sorted, 0.75),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotSummary<T> {
    pub q1: T,
    pub median: T,
    pub q3: T,
    pub iqr: T,
    pub lower_fence: T,
    pub upper_fence: T,
    /// Smallest datum at or above the lower fence.
    pub whisker_low: T,
    /// Largest datum at or below the upper fence.
    pub whisker_high: T,
    /// Values strictly outside the fences, in input order.
    pub outliers: Vec<T>,
}

pub fn boxplot_summary<T: Scalar>(values: &[T]) -> Result<BoxplotSummary<T>> {
    let (q1, median, q3) = quartiles(values)?;
    let iqr = q3 - q1;
    let fence_margin = T::c(1.5) * iqr;
    let lower_fence = q1 - fence_margin;
    let upper_fence = q3 + fence_margin;

    // Both whiskers always exist: min ≤ q1 ≤ upper_fence and
    // max ≥ q3 ≥ lower_fence.
    let mut whisker_low = T::infinity();
    let mut whisker_high = T::neg_infinity();
    let mut outliers = Vec::new();
    for &v in values {
        if v < lower_fence || v > upper_fence {
            outliers.push(v);
        } else {
            whisker_low = whisker_low.min(v);
            whisker_high = whisker_high.max(v);
        }
    }
    Ok(BoxplotSummary {
        q1,
        median,
        q3,
        iqr,
        lower_fence,
        upper_fence,
        whisker_low,
        whisker_high,
        outliers,
    })
}

/// The three zones a landmark point can fall into, relative to the
/// per-axis boxplot summaries of its landmark index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Zone {
    WithinQuartiles,
    WithinWhiskers,
    Outlier,
}

/// Zone of a 2-D point given the summaries of its x and y populations.
/// Outlier wins if either coordinate is outside its fences; the quartile
/// box requires both coordinates inside their [q1, q3]; everything else is
/// whisker territory.
pub fn classify_zone<T: Scalar>(
    point: (T, T),
    summary_x: &BoxplotSummary<T>,
    summary_y: &BoxplotSummary<T>,
) -> Zone {
    let (x, y) = point;
    if x < summary_x.lower_fence
        || x > summary_x.upper_fence
        || y < summary_y.lower_fence
        || y > summary_y.upper_fence
    {
        Zone::Outlier
    } else if x >= summary_x.q1 && x <= summary_x.q3 && y >= summary_y.q1 && y <= summary_y.q3 {
        Zone::WithinQuartiles
    } else {
        Zone::WithinWhiskers
    }
}

/// Per-axis summaries for one landmark index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkSummary<T> {
    pub x: BoxplotSummary<T>,
    pub y: BoxplotSummary<T>,
}

/// One (sample, landmark) point with its zone; the raw material of the
/// landmark boxplot figure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMark<T> {
    pub landmark: usize,
    pub x: T,
    pub y: T,
    pub zone: Zone,
}

#[derive(Debug, Clone, Serialize)]
pub struct LandmarkStatsTable<T> {
    pub emotion: EmotionLabel,
    pub mode: FeatureMode,
    pub in_whiskers_pct: f64,
    pub outlier_pct: f64,
    pub in_quartiles_pct: f64,
    pub total_points: usize,
    pub sample_count: usize,
    pub per_landmark: Vec<LandmarkSummary<T>>,
}

/// Summaries plus the classified point cloud for one emotion. Marks are
/// ordered sample-major (dataset order), landmark-minor.
pub fn emotion_landmark_analysis<T: Scalar>(
    dataset: &CuratedDataset<T>,
    emotion: EmotionLabel,
    mode: FeatureMode,
) -> Result<(LandmarkStatsTable<T>, Vec<PointMark<T>>)> {
    let samples: Vec<Vec<(T, T)>> = dataset
        .records
        .iter()
        .filter(|r| r.emotion == emotion)
        .map(|r| record_points(r, mode))
        .collect();
    if samples.len() < 2 {
        return Err(Error::invalid(format!(
            "landmark statistics for '{emotion}' need at least 2 samples, found {}",
            samples.len()
        )));
    }

    let per_landmark: Vec<LandmarkSummary<T>> = (0..LANDMARK_COUNT)
        .map(|i| {
            let xs: Vec<T> = samples.iter().map(|s| s[i].0).collect();
            let ys: Vec<T> = samples.iter().map(|s| s[i].1).collect();
            Ok(LandmarkSummary {
                x: boxplot_summary(&xs)?,
                y: boxplot_summary(&ys)?,
            })
        })
        .collect::<Result<_>>()?;

    let mut marks = Vec::with_capacity(samples.len() * LANDMARK_COUNT);
    let mut counts = [0usize; 3];
    for sample in &samples {
        for (i, &(x, y)) in sample.iter().enumerate() {
            let zone = classify_zone((x, y), &per_landmark[i].x, &per_landmark[i].y);
            counts[match zone {
                Zone::WithinQuartiles => 0,
                Zone::WithinWhiskers => 1,
                Zone::Outlier => 2,
            }] += 1;
            marks.push(PointMark {
                landmark: i,
                x,
                y,
                zone,
            });
        }
    }

    let total_points = samples.len() * LANDMARK_COUNT;
    let pct = |c: usize| c as f64 / total_points as f64 * 100.0;
    let table = LandmarkStatsTable {
        emotion,
        mode,
        in_whiskers_pct: pct(counts[1]),
        outlier_pct: pct(counts[2]),
        in_quartiles_pct: pct(counts[0]),
        total_points,
        sample_count: samples.len(),
        per_landmark,
    };
    Ok((table, marks))
}

/// Table-only variant of [`emotion_landmark_analysis`].
pub fn emotion_landmark_stats<T: Scalar>(
    dataset: &CuratedDataset<T>,
    emotion: EmotionLabel,
    mode: FeatureMode,
) -> Result<LandmarkStatsTable<T>> {
    emotion_landmark_analysis(dataset, emotion, mode).map(|(table, _)| table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutlierPolicy {
    Winsorize,
    Drop,
}

impl std::str::FromStr for OutlierPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<OutlierPolicy> {
        match s.to_ascii_lowercase().as_str() {
            "winsorize" => Ok(OutlierPolicy::Winsorize),
            "drop" => Ok(OutlierPolicy::Drop),
            _ => Err(Error::invalid(format!("unknown outlier policy '{s}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OutlierOutcome<T> {
    pub matrix: Matrix<T>,
    pub labels: Vec<usize>,
    /// Indices of dropped rows (ascending); empty under winsorize.
    pub removed: Vec<usize>,
}

/// Apply the chosen outlier policy to a feature matrix. Fences are computed
/// per column from the input matrix. `winsorize` clips each value into its
/// column's fences; `drop` removes every row with at least one coordinate
/// strictly outside them and fails if that would wipe out a class.
pub fn handle_outliers<T: Scalar>(
    matrix: &Matrix<T>,
    labels: &[usize],
    policy: OutlierPolicy,
) -> Result<OutlierOutcome<T>> {
    if matrix.rows() == 0 {
        return Err(Error::invalid("outlier handling on an empty matrix"));
    }
    assert_eq!(matrix.rows(), labels.len(), "one label per row");

    let fences: Vec<(T, T)> = (0..matrix.cols())
        .map(|j| {
            let column: Vec<T> = (0..matrix.rows()).map(|i| matrix.get(i, j)).collect();
            let summary = boxplot_summary(&column)?;
            Ok((summary.lower_fence, summary.upper_fence))
        })
        .collect::<Result<_>>()?;

    match policy {
        OutlierPolicy::Winsorize => {
            let mut clipped = matrix.clone();
            for i in 0..clipped.rows() {
                let row = clipped.row_mut(i);
                for (j, v) in row.iter_mut().enumerate() {
                    let (lo, hi) = fences[j];
                    *v = (*v).max(lo).min(hi);
                }
            }
            Ok(OutlierOutcome {
                matrix: clipped,
                labels: labels.to_vec(),
                removed: Vec::new(),
            })
        }
        OutlierPolicy::Drop => {
            let mut keep = Vec::new();
            let mut removed = Vec::new();
            for i in 0..matrix.rows() {
                let has_outlier = matrix
                    .row(i)
                    .iter()
                    .enumerate()
                    .any(|(j, &v)| v < fences[j].0 || v > fences[j].1);
                if has_outlier {
                    removed.push(i);
                } else {
                    keep.push(i);
                }
            }
            let kept_labels: Vec<usize> = keep.iter().map(|&i| labels[i]).collect();
            for class in labels.iter().collect::<std::collections::BTreeSet<_>>() {
                if !kept_labels.contains(class) {
                    let name = EmotionLabel::from_index(*class)
                        .map(|e| e.to_string())
                        .unwrap_or_else(|| format!("class {class}"));
                    return Err(Error::invalid(format!(
                        "dropping outliers removed every sample of '{name}'"
                    )));
                }
            }
            Ok(OutlierOutcome {
                matrix: matrix.select_rows(&keep),
                labels: kept_labels,
                removed,
            })
        }
    }
}

/// Table 1-style JSON report: one object per analyzed emotion.
#[derive(Debug, Clone, Serialize)]
pub struct StatsReport<T> {
    pub mode: FeatureMode,
    pub emotions: Vec<LandmarkStatsTable<T>>,
}

impl<T: Scalar> StatsReport<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat CSV: one row per (emotion, landmark, axis) summary.
    pub fn write_csv<W: Write>(&self, writer: &mut W) -> Result<()> {
        writer.write_all(
            b"emotion,landmark,axis,q1,median,q3,iqr,lower_fence,upper_fence,whisker_low,whisker_high,outlier_count\n",
        )?;
        for table in &self.emotions {
            for (i, summary) in table.per_landmark.iter().enumerate() {
                for (axis, s) in [("x", &summary.x), ("y", &summary.y)] {
                    writer.write_all(
                        format!(
                            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                            table.emotion,
                            i,
                            axis,
                            s.q1,
                            s.median,
                            s.q3,
                            s.iqr,
                            s.lower_fence,
                            s.upper_fence,
                            s.whisker_low,
                            s.whisker_high,
                            s.outliers.len()
                        )
                        .as_bytes(),
                    )?;
                }
            }
        }
        Ok(())
    }
}
