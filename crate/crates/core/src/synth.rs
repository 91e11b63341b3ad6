//! Deterministic synthetic landmark datasets: per-emotion neutral
//! templates plus displacement patterns, Gaussian pixel noise, and
//! optional verbatim outlier injections. The bundled `separable7` spec is
//! the seven-class benchmark used throughout the test suite.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::dataset::{CuratedDataset, EmotionLabel, FrameRole, LandmarkFrame, SubjectRecord};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::scalar::Scalar;
use crate::LANDMARK_COUNT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            other => Err(Error::invalid(format!(
                "unknown axis '{other}' (expected x or y)"
            ))),
        }
    }
}

/// One coordinate pushed by a fixed offset after noise. Injections target
/// the peak frame, so they surface in both the absolute and the
/// displacement feature views.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Injection<T> {
    pub emotion: EmotionLabel,
    /// Zero-based sample index within the emotion's block.
    pub sample: usize,
    pub landmark: usize,
    pub axis: Axis,
    pub offset: T,
}

/// One emotion's generator: a neutral template and the displacement each
/// peak frame adds to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionSpec<T> {
    pub emotion: EmotionLabel,
    pub count: usize,
    pub neutral: Vec<(T, T)>,
    pub delta: Vec<(T, T)>,
}

/// Full description of a synthetic dataset; serializable so a generation
/// run can be reproduced bit-exactly from the file alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec<T> {
    pub seed: u64,
    /// Standard deviation of the Gaussian pixel noise added to every
    /// coordinate of every frame.
    pub noise_sigma: T,
    pub emotions: Vec<EmotionSpec<T>>,
    #[serde(default = "Vec::new")]
    pub injections: Vec<Injection<T>>,
}

impl<T: Scalar> SynthSpec<T> {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::invalid(e.to_string()))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::invalid(format!("bad synth spec: {e}")))
    }

    fn check(&self) -> Result<()> {
        if !self.noise_sigma.is_finite() || self.noise_sigma < T::zero() {
            return Err(Error::invalid("noise sigma must be finite and ≥ 0"));
        }
        if self.emotions.is_empty() {
            return Err(Error::invalid("spec generates no emotions"));
        }
        for (i, block) in self.emotions.iter().enumerate() {
            if self.emotions[..i].iter().any(|b| b.emotion == block.emotion) {
                return Err(Error::invalid(format!(
                    "duplicate block for emotion '{}'",
                    block.emotion
                )));
            }
            if block.neutral.len() != LANDMARK_COUNT || block.delta.len() != LANDMARK_COUNT {
                return Err(Error::invalid(format!(
                    "emotion '{}' needs {LANDMARK_COUNT}-point template and delta",
                    block.emotion
                )));
            }
            let finite =
                |pts: &[(T, T)]| pts.iter().all(|&(x, y)| x.is_finite() && y.is_finite());
            if !finite(&block.neutral) || !finite(&block.delta) {
                return Err(Error::invalid(format!(
                    "emotion '{}' has a non-finite template or delta coordinate",
                    block.emotion
                )));
            }
        }
        for injection in &self.injections {
            let block = self
                .emotions
                .iter()
                .find(|b| b.emotion == injection.emotion)
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "injection targets emotion '{}' which the spec does not generate",
                        injection.emotion
                    ))
                })?;
            if injection.sample >= block.count {
                return Err(Error::invalid(format!(
                    "injection sample index {} out of range for the {} '{}' samples",
                    injection.sample, block.count, injection.emotion
                )));
            }
            if injection.landmark >= LANDMARK_COUNT {
                return Err(Error::invalid(format!(
                    "injection landmark index {} out of range",
                    injection.landmark
                )));
            }
            if !injection.offset.is_finite() {
                return Err(Error::invalid("injection offset must be finite"));
            }
        }
        Ok(())
    }
}

/// Generate the dataset a spec describes.
///
/// Draw order is part of the format: one generator seeded with
/// `spec.seed` serves the whole run; emotions are visited in spec order,
/// each sample draws its neutral frame then its peak frame, and within a
/// frame landmarks 0..68 each draw x noise then y noise. Injections are
/// added to the finished peak coordinates verbatim, in list order.
pub fn generate<T: Scalar>(spec: &SynthSpec<T>) -> Result<CuratedDataset<T>> {
    spec.check()?;
    let mut rng = Rng::new(spec.seed);
    let sigma = spec.noise_sigma;
    let mut noisy = |template: &[(T, T)], delta: Option<&[(T, T)]>| -> Vec<(T, T)> {
        (0..LANDMARK_COUNT)
            .map(|i| {
                let (mut x, mut y) = template[i];
                if let Some(d) = delta {
                    x += d[i].0;
                    y += d[i].1;
                }
                x += sigma * T::c(rng.gaussian());
                y += sigma * T::c(rng.gaussian());
                (x, y)
            })
            .collect()
    };

    let mut blocks: Vec<Vec<(String, Vec<(T, T)>, Vec<(T, T)>)>> = Vec::new();
    for block in &spec.emotions {
        let mut samples = Vec::with_capacity(block.count);
        for s in 0..block.count {
            let subject_id = format!("{}_{s:03}", block.emotion);
            let neutral = noisy(&block.neutral, None);
            let peak = noisy(&block.neutral, Some(&block.delta));
            samples.push((subject_id, neutral, peak));
        }
        blocks.push(samples);
    }

    for injection in &spec.injections {
        let block_index = spec
            .emotions
            .iter()
            .position(|b| b.emotion == injection.emotion)
            .expect("checked above");
        let (_, _, peak) = &mut blocks[block_index][injection.sample];
        let point = &mut peak[injection.landmark];
        match injection.axis {
            Axis::X => point.0 += injection.offset,
            Axis::Y => point.1 += injection.offset,
        }
    }

    let mut records = Vec::new();
    for (block, samples) in spec.emotions.iter().zip(blocks) {
        for (subject_id, neutral, peak) in samples {
            records.push(SubjectRecord {
                subject_id: subject_id.clone(),
                emotion: block.emotion,
                neutral: LandmarkFrame::new(subject_id.clone(), FrameRole::Neutral, neutral)?,
                peak: LandmarkFrame::new(subject_id, FrameRole::Peak, peak)?,
            });
        }
    }
    Ok(CuratedDataset {
        records,
        source: Some(format!("synth(seed={})", spec.seed)),
    })
}

/// The neutral face every benchmark emotion starts from: a plausible
/// 68-point layout on a ~200 px face, y growing downward.
fn base_face() -> Vec<(f64, f64)> {
    let mut points = Vec::with_capacity(LANDMARK_COUNT);
    // Jaw 0–16: half-ellipse from left temple through the chin.
    for i in 0..17 {
        let phi = std::f64::consts::PI * (i as f64) / 16.0;
        points.push((100.0 - 80.0 * phi.cos(), 100.0 + 100.0 * phi.sin()));
    }
    // Brows 17–21 and 22–26: gentle arches.
    for i in 0..5 {
        let t = i as f64 / 4.0;
        points.push((35.0 + 50.0 * t, 70.0 - 6.0 * (std::f64::consts::PI * t).sin()));
    }
    for i in 0..5 {
        let t = i as f64 / 4.0;
        points.push((115.0 + 50.0 * t, 70.0 - 6.0 * (std::f64::consts::PI * t).sin()));
    }
    // Nose bridge 27–30 and base 31–35.
    for i in 0..4 {
        points.push((100.0, 80.0 + 15.0 * i as f64));
    }
    for i in 0..5 {
        points.push((85.0 + 7.5 * i as f64, 140.0));
    }
    // Eyes 36–41 and 42–47: hexagons.
    let eye = |cx: f64| {
        vec![
            (cx - 15.0, 92.0),
            (cx - 7.0, 86.0),
            (cx + 7.0, 86.0),
            (cx + 15.0, 92.0),
            (cx + 7.0, 98.0),
            (cx - 7.0, 98.0),
        ]
    };
    points.extend(eye(65.0));
    points.extend(eye(135.0));
    // Outer lip 48–59 and inner lip 60–67: ellipses.
    let lip = |n: usize, rx: f64, ry: f64| -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let phi = std::f64::consts::TAU * (i as f64) / (n as f64);
                (100.0 - rx * phi.cos(), 165.0 - ry * phi.sin())
            })
            .collect()
    };
    points.extend(lip(12, 30.0, 13.0));
    points.extend(lip(8, 22.0, 6.0));
    debug_assert_eq!(points.len(), LANDMARK_COUNT);
    points
}

/// Displacement pattern (in pixels) for one benchmark emotion: a sparse
/// caricature of the expression, built so every pair of patterns is far
/// apart (see `separable7`).
fn benchmark_delta(emotion: EmotionLabel) -> Vec<(f64, f64)> {
    let mut d = vec![(0.0, 0.0); LANDMARK_COUNT];
    let mut add = |indices: &[usize], dx: f64, dy: f64| {
        for &i in indices {
            d[i].0 += dx;
            d[i].1 += dy;
        }
    };
    // Landmark groups: brows 17–26 (inner ends 21, 22), outer lip corners
    // 48/54, upper outer lip 49–53, lower outer lip 55–59, upper inner lip
    // 61–63, lower inner lip 65–67, eyelids 37/38/43/44 (upper) and
    // 40/41/46/47 (lower), mid-jaw 6–10, nose base 31–35.
    match emotion {
        EmotionLabel::Anger => {
            add(&[19, 20, 21, 22, 23, 24], 0.0, 6.0);
            add(&[48], 4.0, 6.0);
            add(&[54], -4.0, 6.0);
            add(&[61, 62, 63], 0.0, 3.0);
            add(&[65, 66, 67], 0.0, -3.0);
        }
        EmotionLabel::Contempt => {
            add(&[54], -2.0, -8.0);
            add(&[22, 23, 24, 25, 26], 0.0, -3.0);
        }
        EmotionLabel::Disgust => {
            add(&[31, 32, 33, 34, 35], 0.0, -6.0);
            add(&[49, 50, 51, 52, 53], 0.0, -6.0);
            add(&[61, 62, 63], 0.0, -4.0);
            add(&[17, 18, 19, 20, 21, 22, 23, 24, 25, 26], 0.0, 5.0);
        }
        EmotionLabel::Fear => {
            add(&[17, 18, 19, 20, 21, 22, 23, 24, 25, 26], 0.0, -10.0);
            add(&[37, 38, 43, 44], 0.0, -3.0);
            add(&[40, 41, 46, 47], 0.0, 3.0);
            add(&[55, 56, 57, 58, 59], 0.0, 8.0);
            add(&[65, 66, 67], 0.0, 6.0);
            add(&[48], -3.0, 0.0);
            add(&[54], 3.0, 0.0);
        }
        EmotionLabel::Happiness => {
            add(&[48], -6.0, -10.0);
            add(&[54], 6.0, -10.0);
            add(&[49, 53], 0.0, -4.0);
            add(&[40, 41, 46, 47], 0.0, -2.0);
        }
        EmotionLabel::Sadness => {
            add(&[21, 22], 0.0, -6.0);
            add(&[48, 54], 0.0, 8.0);
            add(&[57], 0.0, 2.0);
        }
        EmotionLabel::Surprise => {
            add(&[17, 18, 19, 20, 21, 22, 23, 24, 25, 26], 0.0, -12.0);
            add(&[37, 38, 43, 44], 0.0, -4.0);
            add(&[40, 41, 46, 47], 0.0, 4.0);
            add(&[55, 56, 57, 58, 59], 0.0, 16.0);
            add(&[65, 66, 67], 0.0, 14.0);
            add(&[6, 7, 8, 9, 10], 0.0, 10.0);
            add(&[48], 2.0, 0.0);
            add(&[54], -2.0, 0.0);
        }
    }
    d
}

/// The benchmark spec: all seven emotions, 24 samples each, σ = 1 px of
/// noise, no injections. Every pair of emotion displacement patterns is
/// at least 10·σ apart in L2, which keeps the classes learnable by every
/// model in the suite.
pub fn separable7<T: Scalar>(seed: u64) -> SynthSpec<T> {
    let face = base_face();
    let to_t = |pts: &[(f64, f64)]| pts.iter().map(|&(x, y)| (T::c(x), T::c(y))).collect();
    SynthSpec {
        seed,
        noise_sigma: T::one(),
        emotions: EmotionLabel::ALL
            .iter()
            .map(|&emotion| EmotionSpec {
                emotion,
                count: 24,
                neutral: to_t(&face),
                delta: to_t(&benchmark_delta(emotion)),
            })
            .collect(),
        injections: Vec::new(),
    }
}
