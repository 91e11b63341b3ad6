//! Dataset parsing and curation.
//!
//! Raw inputs are CSV files with one landmark frame per row. A subject
//! contributes two frames per emotion — a neutral face and the expression
//! peak — and only complete, consistent (neutral, peak) pairs survive
//! validation. Everything downstream (features, statistics, classifiers)
//! consumes the curated pairs.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::LANDMARK_COUNT;

/// The seven emotion categories, in canonical (alphabetical) order. All
/// class-indexed arrays in the crate use this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmotionLabel {
    Anger,
    Contempt,
    Disgust,
    Fear,
    #[serde(alias = "happy")]
    Happiness,
    Sadness,
    Surprise,
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; 7] = [
        EmotionLabel::Anger,
        EmotionLabel::Contempt,
        EmotionLabel::Disgust,
        EmotionLabel::Fear,
        EmotionLabel::Happiness,
        EmotionLabel::Sadness,
        EmotionLabel::Surprise,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<EmotionLabel> {
        EmotionLabel::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EmotionLabel::Anger => "anger",
            EmotionLabel::Contempt => "contempt",
            EmotionLabel::Disgust => "disgust",
            EmotionLabel::Fear => "fear",
            EmotionLabel::Happiness => "happiness",
            EmotionLabel::Sadness => "sadness",
            EmotionLabel::Surprise => "surprise",
        }
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmotionLabel {
    type Err = Error;

    /// Case-insensitive; `happy` is accepted as a spelling of `happiness`.
    fn from_str(s: &str) -> Result<EmotionLabel> {
        match s.to_ascii_lowercase().as_str() {
            "anger" => Ok(EmotionLabel::Anger),
            "contempt" => Ok(EmotionLabel::Contempt),
            "disgust" => Ok(EmotionLabel::Disgust),
            "fear" => Ok(EmotionLabel::Fear),
            "happiness" | "happy" => Ok(EmotionLabel::Happiness),
            "sadness" => Ok(EmotionLabel::Sadness),
            "surprise" => Ok(EmotionLabel::Surprise),
            _ => Err(Error::invalid(format!("unknown emotion '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameRole {
    Neutral,
    Peak,
}

impl fmt::Display for FrameRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameRole::Neutral => "neutral",
            FrameRole::Peak => "peak",
        })
    }
}

impl FromStr for FrameRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<FrameRole> {
        match s.to_ascii_lowercase().as_str() {
            "neutral" => Ok(FrameRole::Neutral),
            "peak" => Ok(FrameRole::Peak),
            _ => Err(Error::invalid(format!("unknown frame role '{s}'"))),
        }
    }
}

/// One CSV row as parsed: shape is checked (the row had the right column
/// count to produce its points) but the frame-level invariants — exactly 68
/// points, all coordinates finite — are enforced later by [`validate`],
/// because raw frames can also be constructed programmatically.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFrame<T> {
    pub subject_id: String,
    pub emotion: EmotionLabel,
    pub role: FrameRole,
    pub points: Vec<(T, T)>,
}

/// A validated 68-point frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkFrame<T> {
    pub subject_id: String,
    pub role: FrameRole,
    pub points: Vec<(T, T)>,
}

impl<T: Scalar> LandmarkFrame<T> {
    /// Checks the frame invariants: exactly 68 points, all finite.
    pub fn new(subject_id: String, role: FrameRole, points: Vec<(T, T)>) -> Result<Self> {
        if points.len() != LANDMARK_COUNT {
            return Err(Error::invalid(format!(
                "frame for '{subject_id}' has {} points, expected {LANDMARK_COUNT}",
                points.len()
            )));
        }
        if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::invalid(format!(
                "frame for '{subject_id}' contains a non-finite coordinate"
            )));
        }
        Ok(LandmarkFrame {
            subject_id,
            role,
            points,
        })
    }
}

/// A complete (neutral, peak) pair for one subject and emotion.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectRecord<T> {
    pub subject_id: String,
    pub emotion: EmotionLabel,
    pub neutral: LandmarkFrame<T>,
    pub peak: LandmarkFrame<T>,
}

/// The validated dataset: one record per (subject, emotion), in first-seen
/// input order.
#[derive(Debug, Clone)]
pub struct CuratedDataset<T> {
    pub records: Vec<SubjectRecord<T>>,
    /// Where the records came from, when known (a file path or a generator
    /// tag); informational only.
    pub source: Option<String>,
}

impl<T: Scalar> CuratedDataset<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Class labels in record order, as indices into [`EmotionLabel::ALL`].
    pub fn label_indices(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.emotion.index()).collect()
    }

    /// Write the dataset back out in the input CSV format (neutral row then
    /// peak row per record). Coordinates are printed with Rust's shortest
    /// round-trip float formatting, so reading the file back yields the
    /// exact same values.
    pub fn write_csv<W: Write>(&self, writer: &mut W) -> Result<()> {
        writer.write_all(csv_header().as_bytes())?;
        for record in &self.records {
            write_frame_row(writer, &record.subject_id, record.emotion, &record.neutral)?;
            write_frame_row(writer, &record.subject_id, record.emotion, &record.peak)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

fn csv_header() -> String {
    let mut header = String::from("subject_id,emotion,frame");
    for i in 0..LANDMARK_COUNT {
        header.push_str(&format!(",x{i},y{i}"));
    }
    header.push('\n');
    header
}

fn write_frame_row<T: Scalar, W: Write>(
    writer: &mut W,
    subject_id: &str,
    emotion: EmotionLabel,
    frame: &LandmarkFrame<T>,
) -> Result<()> {
    let mut row = format!("{subject_id},{emotion},{}", frame.role);
    for &(x, y) in &frame.points {
        row.push_str(&format!(",{x},{y}"));
    }
    row.push('\n');
    writer.write_all(row.as_bytes())?;
    Ok(())
}

/// Why a subject group was rejected during validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    MissingNeutral,
    MissingPeak,
    BadPointCount,
    LabelMismatch,
    NonFiniteCoordinate,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::MissingNeutral => "missing-neutral",
            RejectReason::MissingPeak => "missing-peak",
            RejectReason::BadPointCount => "bad-point-count",
            RejectReason::LabelMismatch => "label-mismatch",
            RejectReason::NonFiniteCoordinate => "non-finite-coordinate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub subject: String,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub accepted: usize,
    pub rejected: Vec<Rejection>,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Parse a landmark CSV from a reader. Only per-row shape is checked here:
/// the column count must match the header layout, numbers must parse, and
/// the emotion and frame-role tokens must be known. Pairing and
/// finiteness are [`validate`]'s job.
pub fn parse_dataset<T: Scalar, R: BufRead>(reader: R) -> Result<Vec<RawFrame<T>>> {
    let mut frames = Vec::new();
    let mut lines = reader.lines();

    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(Error::parse(1, "empty file: missing header")),
    };
    if !header.trim_end().starts_with("subject_id,emotion,frame") {
        return Err(Error::parse(1, "bad header: expected subject_id,emotion,frame,x0,y0,..."));
    }

    for (index, line) in lines.enumerate() {
        let line_no = index + 2; // 1-based, after the header
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 3 {
            return Err(Error::parse(line_no, "bad-point-count"));
        }
        let coord_fields = &fields[3..];
        if coord_fields.len() != 2 * LANDMARK_COUNT {
            return Err(Error::parse(line_no, "bad-point-count"));
        }
        let subject_id = fields[0].trim().to_string();
        let emotion: EmotionLabel = fields[1]
            .trim()
            .parse()
            .map_err(|e: Error| Error::parse(line_no, e.to_string()))?;
        let role: FrameRole = fields[2]
            .trim()
            .parse()
            .map_err(|e: Error| Error::parse(line_no, e.to_string()))?;

        let mut points = Vec::with_capacity(LANDMARK_COUNT);
        for pair in coord_fields.chunks_exact(2) {
            let x = parse_coord::<T>(pair[0], line_no)?;
            let y = parse_coord::<T>(pair[1], line_no)?;
            points.push((x, y));
        }
        frames.push(RawFrame {
            subject_id,
            emotion,
            role,
            points,
        });
    }
    Ok(frames)
}

fn parse_coord<T: Scalar>(token: &str, line_no: usize) -> Result<T> {
    let value: f64 = token
        .trim()
        .parse()
        .map_err(|_| Error::parse(line_no, format!("invalid number '{}'", token.trim())))?;
    // NaN and infinity parse successfully; they are caught by validate(),
    // not here, so that the rejection ends up in the report.
    Ok(T::c(value))
}

pub fn load_raw_frames<T: Scalar>(path: &Path) -> Result<Vec<RawFrame<T>>> {
    let file = File::open(path)?;
    parse_dataset(BufReader::new(file))
}

/// Group raw frames by (subject, emotion) and keep only the groups that
/// form exactly one complete (neutral, peak) pair. Groups are processed in
/// first-appearance order, so the output is deterministic for a given input
/// order. Problems never abort the run; they become report entries. When a
/// group violates several rules at once the reported reason follows a fixed
/// priority: bad-point-count, then non-finite-coordinate, then
/// label-mismatch (a duplicated role within the group), then missing-*.
pub fn validate<T: Scalar>(raw: Vec<RawFrame<T>>) -> (CuratedDataset<T>, ValidationReport) {
    let mut order: Vec<(String, EmotionLabel)> = Vec::new();
    let mut groups: HashMap<(String, EmotionLabel), Vec<RawFrame<T>>> = HashMap::new();
    for frame in raw {
        let key = (frame.subject_id.clone(), frame.emotion);
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(frame);
    }

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for key in &order {
        let group = groups.remove(key).expect("group recorded in order list");
        match curate_group(key, group) {
            Ok(record) => records.push(record),
            Err(reason) => rejected.push(Rejection {
                subject: key.0.clone(),
                reason,
            }),
        }
    }

    let report = ValidationReport {
        accepted: records.len(),
        rejected,
    };
    (
        CuratedDataset {
            records,
            source: None,
        },
        report,
    )
}

fn curate_group<T: Scalar>(
    key: &(String, EmotionLabel),
    group: Vec<RawFrame<T>>,
) -> std::result::Result<SubjectRecord<T>, RejectReason> {
    if group.iter().any(|f| f.points.len() != LANDMARK_COUNT) {
        return Err(RejectReason::BadPointCount);
    }
    if group
        .iter()
        .flat_map(|f| f.points.iter())
        .any(|&(x, y)| !x.is_finite() || !y.is_finite())
    {
        return Err(RejectReason::NonFiniteCoordinate);
    }

    let neutrals: Vec<&RawFrame<T>> = group.iter().filter(|f| f.role == FrameRole::Neutral).collect();
    let peaks: Vec<&RawFrame<T>> = group.iter().filter(|f| f.role == FrameRole::Peak).collect();
    if neutrals.len() > 1 || peaks.len() > 1 {
        return Err(RejectReason::LabelMismatch);
    }
    let neutral = neutrals.first().ok_or(RejectReason::MissingNeutral)?;
    let peak = peaks.first().ok_or(RejectReason::MissingPeak)?;

    let make = |f: &RawFrame<T>| LandmarkFrame {
        subject_id: f.subject_id.clone(),
        role: f.role,
        points: f.points.clone(),
    };
    Ok(SubjectRecord {
        subject_id: key.0.clone(),
        emotion: key.1,
        neutral: make(neutral),
        peak: make(peak),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionEntry {
    pub emotion: EmotionLabel,
    pub count: usize,
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub total: usize,
    /// One entry per emotion in canonical order, including zero-count classes.
    pub entries: Vec<DistributionEntry>,
}

/// Per-class counts and percentages over the curated records.
pub fn class_distribution<T: Scalar>(dataset: &CuratedDataset<T>) -> Result<DistributionSummary> {
    if dataset.is_empty() {
        return Err(Error::invalid("class distribution of an empty dataset"));
    }
    let mut counts = [0usize; 7];
    for record in &dataset.records {
        counts[record.emotion.index()] += 1;
    }
    let total = dataset.len();
    let entries = EmotionLabel::ALL
        .iter()
        .map(|&emotion| DistributionEntry {
            emotion,
            count: counts[emotion.index()],
            percentage: counts[emotion.index()] as f64 / total as f64 * 100.0,
        })
        .collect();
    Ok(DistributionSummary { total, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(n: usize, base: f64) -> Vec<(f64, f64)> {
        (0..n).map(|i| (base + i as f64, base - i as f64)).collect()
    }

    fn row(subject: &str, emotion: &str, role: &str, pts: &[(f64, f64)]) -> String {
        let mut s = format!("{subject},{emotion},{role}");
        for (x, y) in pts {
            s.push_str(&format!(",{x},{y}"));
        }
        s
    }

    fn csv(rows: &[String]) -> String {
        let mut s = csv_header();
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    #[test]
    fn emotion_parsing_is_case_insensitive_with_happy_alias() {
        assert_eq!("Anger".parse::<EmotionLabel>().unwrap(), EmotionLabel::Anger);
        assert_eq!("HAPPY".parse::<EmotionLabel>().unwrap(), EmotionLabel::Happiness);
        assert_eq!("happiness".parse::<EmotionLabel>().unwrap(), EmotionLabel::Happiness);
        assert!("joy".parse::<EmotionLabel>().is_err());
        assert_eq!(EmotionLabel::Surprise.to_string(), "surprise");
        assert_eq!(EmotionLabel::ALL.len(), 7);
        for (i, &e) in EmotionLabel::ALL.iter().enumerate() {
            assert_eq!(e.index(), i);
            assert_eq!(EmotionLabel::from_index(i), Some(e));
        }
    }

    #[test]
    fn parses_a_complete_row() {
        let pts = points(68, 10.0);
        let text = csv(&[row("s01", "happiness", "neutral", &pts)]);
        let frames: Vec<RawFrame<f64>> = parse_dataset(text.as_bytes()).unwrap();
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].subject_id, "s01");
        assert_eq!(frames[0].emotion, EmotionLabel::Happiness);
        assert_eq!(frames[0].role, FrameRole::Neutral);
        assert_eq!(frames[0].points.len(), 68);
        assert_eq!(frames[0].points[3], (13.0, 7.0));
    }

    #[test]
    fn short_row_reports_point_count_and_line() {
        let pts = points(67, 1.0); // 134 numbers + one extra = 135 columns of coords
        let mut bad = row("s01", "anger", "peak", &pts);
        bad.push_str(",5.0");
        let text = csv(&[row("s00", "anger", "neutral", &points(68, 0.0)), bad]);
        let err = parse_dataset::<f64, _>(text.as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "bad-point-count at line 3");
    }

    #[test]
    fn unknown_emotion_is_a_parse_error() {
        let text = csv(&[row("s01", "joy", "peak", &points(68, 0.0))]);
        let err = parse_dataset::<f64, _>(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("unknown emotion 'joy'"), "{err}");
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn unparsable_number_is_a_parse_error() {
        let pts = points(68, 0.0);
        // Corrupt the x coordinate of point 5 ("...,4,-4,5,-5,..." -> ",five,").
        let r = row("s01", "fear", "peak", &pts).replace(",5,", ",five,");
        let text = csv(&[r]);
        let err = parse_dataset::<f64, _>(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("invalid number"), "{err}");
    }

    #[test]
    fn missing_header_is_rejected() {
        let text = row("s01", "anger", "neutral", &points(68, 0.0));
        let err = parse_dataset::<f64, _>(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("bad header"), "{err}");
    }

    #[test]
    fn nan_parses_and_validation_rejects_it() {
        let mut pts = points(68, 0.0);
        pts[10].0 = f64::NAN;
        let text = csv(&[
            row("s01", "anger", "neutral", &pts),
            row("s01", "anger", "peak", &points(68, 1.0)),
        ]);
        let frames: Vec<RawFrame<f64>> = parse_dataset(text.as_bytes()).unwrap();
        let (dataset, report) = validate(frames);
        assert!(dataset.is_empty());
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].reason, RejectReason::NonFiniteCoordinate);
    }

    fn raw(subject: &str, emotion: EmotionLabel, role: FrameRole, n: usize) -> RawFrame<f64> {
        RawFrame {
            subject_id: subject.to_string(),
            emotion,
            role,
            points: points(n, 0.0),
        }
    }

    #[test]
    fn complete_pair_is_accepted() {
        let (dataset, report) = validate(vec![
            raw("s01", EmotionLabel::Anger, FrameRole::Neutral, 68),
            raw("s01", EmotionLabel::Anger, FrameRole::Peak, 68),
        ]);
        assert_eq!(dataset.len(), 1);
        assert_eq!(report.accepted, 1);
        assert!(report.rejected.is_empty());
        let record = &dataset.records[0];
        assert_eq!(record.subject_id, "s01");
        assert_eq!(record.neutral.role, FrameRole::Neutral);
        assert_eq!(record.peak.role, FrameRole::Peak);
    }

    #[test]
    fn lone_peak_is_missing_neutral() {
        let (dataset, report) = validate(vec![raw("s02", EmotionLabel::Fear, FrameRole::Peak, 68)]);
        assert!(dataset.is_empty());
        assert_eq!(report.rejected, vec![Rejection {
            subject: "s02".to_string(),
            reason: RejectReason::MissingNeutral,
        }]);
    }

    #[test]
    fn lone_neutral_is_missing_peak() {
        let (_, report) = validate(vec![raw("s03", EmotionLabel::Fear, FrameRole::Neutral, 68)]);
        assert_eq!(report.rejected[0].reason, RejectReason::MissingPeak);
    }

    #[test]
    fn duplicate_role_is_label_mismatch() {
        let (_, report) = validate(vec![
            raw("s04", EmotionLabel::Disgust, FrameRole::Neutral, 68),
            raw("s04", EmotionLabel::Disgust, FrameRole::Neutral, 68),
            raw("s04", EmotionLabel::Disgust, FrameRole::Peak, 68),
        ]);
        assert_eq!(report.rejected[0].reason, RejectReason::LabelMismatch);
    }

    #[test]
    fn wrong_point_count_rejects_whole_group() {
        let (_, report) = validate(vec![
            raw("s05", EmotionLabel::Sadness, FrameRole::Neutral, 67),
            raw("s05", EmotionLabel::Sadness, FrameRole::Peak, 68),
        ]);
        assert_eq!(report.rejected[0].reason, RejectReason::BadPointCount);
    }

    #[test]
    fn same_subject_two_emotions_forms_two_groups() {
        // Frames of one subject under different labels land in different
        // groups; each incomplete group is rejected on its own.
        let (dataset, report) = validate(vec![
            raw("s06", EmotionLabel::Anger, FrameRole::Neutral, 68),
            raw("s06", EmotionLabel::Surprise, FrameRole::Peak, 68),
        ]);
        assert!(dataset.is_empty());
        assert_eq!(report.rejected.len(), 2);
        assert_eq!(report.rejected[0].reason, RejectReason::MissingPeak);
        assert_eq!(report.rejected[1].reason, RejectReason::MissingNeutral);
    }

    #[test]
    fn accounting_invariant_holds() {
        let raw_frames = vec![
            raw("a", EmotionLabel::Anger, FrameRole::Neutral, 68),
            raw("a", EmotionLabel::Anger, FrameRole::Peak, 68),
            raw("b", EmotionLabel::Fear, FrameRole::Peak, 68),
            raw("c", EmotionLabel::Disgust, FrameRole::Neutral, 67),
            raw("c", EmotionLabel::Disgust, FrameRole::Peak, 67),
        ];
        let (dataset, report) = validate(raw_frames);
        // 3 groups: a/anger accepted, b/fear and c/disgust rejected.
        assert_eq!(report.accepted + report.rejected.len(), 3);
        assert_eq!(dataset.len(), report.accepted);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let mut pts_n = points(68, 0.25);
        pts_n[7] = (1.0 / 3.0, -2.0 / 7.0);
        let pts_p = points(68, 113.625);
        let (dataset, _) = validate(vec![
            RawFrame {
                subject_id: "s10".to_string(),
                emotion: EmotionLabel::Contempt,
                role: FrameRole::Neutral,
                points: pts_n,
            },
            RawFrame {
                subject_id: "s10".to_string(),
                emotion: EmotionLabel::Contempt,
                role: FrameRole::Peak,
                points: pts_p,
            },
        ]);
        let text = dataset.to_csv_string();
        let reparsed: Vec<RawFrame<f64>> = parse_dataset(text.as_bytes()).unwrap();
        let (dataset2, report2) = validate(reparsed);
        assert!(report2.rejected.is_empty());
        assert_eq!(dataset.records, dataset2.records);
        // And the serialized text itself is stable.
        assert_eq!(text, dataset2.to_csv_string());
    }

    #[test]
    fn report_serializes_with_exact_keys() {
        let report = ValidationReport {
            accepted: 2,
            rejected: vec![Rejection {
                subject: "s9".to_string(),
                reason: RejectReason::NonFiniteCoordinate,
            }],
        };
        let json = report.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["accepted"], 2);
        assert_eq!(value["rejected"][0]["subject"], "s9");
        assert_eq!(value["rejected"][0]["reason"], "non-finite-coordinate");
    }

    fn tiny_dataset(counts: &[(EmotionLabel, usize)]) -> CuratedDataset<f64> {
        let mut frames = Vec::new();
        for &(emotion, n) in counts {
            for i in 0..n {
                let id = format!("{emotion}_{i}");
                let mut a = raw(&id, emotion, FrameRole::Neutral, 68);
                a.subject_id = id.clone();
                let mut b = raw(&id, emotion, FrameRole::Peak, 68);
                b.subject_id = id.clone();
                frames.push(a);
                frames.push(b);
            }
        }
        validate(frames).0
    }

    #[test]
    fn distribution_uniform_seven() {
        let dataset = tiny_dataset(&EmotionLabel::ALL.map(|e| (e, 1)));
        let summary = class_distribution(&dataset).unwrap();
        assert_eq!(summary.total, 7);
        for entry in &summary.entries {
            assert_eq!(entry.count, 1);
            assert!((entry.percentage - 100.0 / 7.0).abs() < 1e-12);
        }
        let sum: f64 = summary.entries.iter().map(|e| e.percentage).sum();
        assert!((sum - 100.0).abs() < 0.01);
    }

    #[test]
    fn distribution_degenerate_single_class() {
        let dataset = tiny_dataset(&[(EmotionLabel::Surprise, 4)]);
        let summary = class_distribution(&dataset).unwrap();
        assert_eq!(summary.entries[EmotionLabel::Surprise.index()].percentage, 100.0);
        assert_eq!(summary.entries[EmotionLabel::Anger.index()].count, 0);
        assert_eq!(summary.entries[EmotionLabel::Anger.index()].percentage, 0.0);
    }

    #[test]
    fn distribution_of_empty_dataset_errors() {
        let dataset: CuratedDataset<f64> = CuratedDataset {
            records: Vec::new(),
            source: None,
        };
        assert!(class_distribution(&dataset).is_err());
    }

    #[test]
    fn counts_sum_to_total() {
        let dataset = tiny_dataset(&[
            (EmotionLabel::Anger, 3),
            (EmotionLabel::Surprise, 5),
            (EmotionLabel::Happiness, 2),
        ]);
        let summary = class_distribution(&dataset).unwrap();
        let count_sum: usize = summary.entries.iter().map(|e| e.count).sum();
        assert_eq!(count_sum, dataset.len());
    }
}
