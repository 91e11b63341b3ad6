//! Standalone SVG figures: the all-landmarks boxplot scatter, class
//! distribution charts, and training learning curves.
//!
//! Rendering is deliberately dumb string assembly with fixed number
//! formatting (two decimals for geometry, one for percentages), so the same
//! input always produces byte-identical output. No external CSS, fonts, or
//! scripts — every file stands alone as SVG 1.1.

use std::fmt::Write as _;

use crate::dataset::DistributionSummary;
use crate::error::{Error, Result};
use crate::neural::TrainingHistory;
use crate::scalar::Scalar;
use crate::stats::{LandmarkStatsTable, PointMark, Zone};

/// Minimal SVG assembly: a sized viewport plus a list of elements.
#[derive(Debug, Clone)]
pub struct SvgDocument {
    width: f64,
    height: f64,
    elements: Vec<String>,
}

/// Two decimals is plenty for pixel geometry and keeps output stable.
fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl SvgDocument {
    pub fn new(width: f64, height: f64) -> Self {
        SvgDocument {
            width,
            height,
            elements: Vec::new(),
        }
    }

    fn push(&mut self, element: String) {
        self.elements.push(element);
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        self.push(format!(
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="1"/>"#,
            px(x1),
            px(y1),
            px(x2),
            px(y2)
        ));
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, size: f64, content: &str) {
        self.push(format!(
            r#"<text x="{}" y="{}" text-anchor="{anchor}" font-family="sans-serif" font-size="{}">{}</text>"#,
            px(x),
            px(y),
            px(size),
            escape(content)
        ));
    }

    pub fn to_svg_string(&self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = write!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
            px(self.width),
            px(self.height),
            px(self.width),
            px(self.height)
        );
        let _ = write!(
            out,
            "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
            px(self.width),
            px(self.height)
        );
        for element in &self.elements {
            out.push_str(element);
            out.push('\n');
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Affine map from a data interval to a pixel interval.
#[derive(Debug, Clone, Copy)]
struct AxisScale {
    data_min: f64,
    data_max: f64,
    px_min: f64,
    px_max: f64,
}

impl AxisScale {
    fn new(data_min: f64, data_max: f64, px_min: f64, px_max: f64) -> Self {
        // Degenerate ranges get a symmetric pad so the map stays finite.
        let (data_min, data_max) = if data_min == data_max {
            (data_min - 0.5, data_max + 0.5)
        } else {
            (data_min, data_max)
        };
        AxisScale {
            data_min,
            data_max,
            px_min,
            px_max,
        }
    }

    fn map(&self, v: f64) -> f64 {
        let t = (v - self.data_min) / (self.data_max - self.data_min);
        self.px_min + t * (self.px_max - self.px_min)
    }
}

const ZONE_LEGEND: [(Zone, &str); 3] = [
    (Zone::WithinQuartiles, "within quartiles"),
    (Zone::WithinWhiskers, "within whiskers"),
    (Zone::Outlier, "outlier"),
];

fn zone_class(zone: Zone) -> &'static str {
    match zone {
        Zone::WithinQuartiles => "zone-within-quartiles",
        Zone::WithinWhiskers => "zone-within-whiskers",
        Zone::Outlier => "zone-outlier",
    }
}

fn draw_zone_mark(doc: &mut SvgDocument, x: f64, y: f64, zone: Zone) {
    let class = zone_class(zone);
    match zone {
        Zone::WithinQuartiles => doc.push(format!(
            r##"<circle class="{class}" cx="{}" cy="{}" r="1.60" fill="#2b6cb0"/>"##,
            px(x),
            px(y)
        )),
        Zone::WithinWhiskers => doc.push(format!(
            r##"<circle class="{class}" cx="{}" cy="{}" r="2.20" fill="none" stroke="#718096" stroke-width="1"/>"##,
            px(x),
            px(y)
        )),
        Zone::Outlier => doc.push(format!(
            r##"<path class="{class}" d="M {} {} L {} {} M {} {} L {} {}" stroke="#c53030" stroke-width="1.2" fill="none"/>"##,
            px(x - 3.0),
            px(y - 3.0),
            px(x + 3.0),
            px(y + 3.0),
            px(x - 3.0),
            px(y + 3.0),
            px(x + 3.0),
            px(y - 3.0)
        )),
    }
}

fn draw_zone_legend(doc: &mut SvgDocument, x: f64, y: f64) {
    for (i, (zone, label)) in ZONE_LEGEND.iter().enumerate() {
        let ly = y + i as f64 * 16.0;
        draw_zone_mark(doc, x, ly - 3.0, *zone);
        doc.text(x + 10.0, ly, "start", 11.0, label);
    }
}

/// All (sample, landmark) points of one emotion in one figure, each styled
/// by its zone. The y axis is inverted so larger y (lower on the face in
/// image coordinates) is drawn lower.
pub fn render_landmark_boxplot<T: Scalar>(
    table: &LandmarkStatsTable<T>,
    marks: &[PointMark<T>],
) -> Result<SvgDocument> {
    if marks.is_empty() {
        return Err(Error::invalid("landmark boxplot with no points"));
    }

    let (width, height) = (640.0, 640.0);
    let (left, right, top, bottom) = (64.0, 160.0, 48.0, 56.0);
    let mut doc = SvgDocument::new(width, height);

    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for mark in marks {
        let (x, y) = (mark.x.to_f64_lossy(), mark.y.to_f64_lossy());
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    // Inverted y: data max at the top margin maps down the screen.
    let sx = AxisScale::new(min_x, max_x, left + 8.0, width - right - 8.0);
    let sy = AxisScale::new(min_y, max_y, height - bottom - 8.0, top + 8.0);

    let title = format!("{} · {} · landmark zones", table.emotion, table.mode);
    doc.text(width / 2.0, 24.0, "middle", 15.0, &title);

    // Plot frame and axis extent labels.
    doc.push(format!(
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333333" stroke-width="1"/>"##,
        px(left),
        px(top),
        px(width - left - right),
        px(height - top - bottom)
    ));
    doc.text(left, height - bottom + 16.0, "middle", 10.0, &format!("{min_x:.2}"));
    doc.text(width - right, height - bottom + 16.0, "middle", 10.0, &format!("{max_x:.2}"));
    doc.text(left - 6.0, height - bottom, "end", 10.0, &format!("{min_y:.2}"));
    doc.text(left - 6.0, top + 10.0, "end", 10.0, &format!("{max_y:.2}"));
    doc.text(width / 2.0, height - 16.0, "middle", 12.0, "x (normalized)");
    doc.push(format!(
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12.00" transform="rotate(-90 {} {})">y (normalized, inverted)</text>"#,
        px(18.0),
        px(height / 2.0),
        px(18.0),
        px(height / 2.0)
    ));

    for mark in marks {
        let x = sx.map(mark.x.to_f64_lossy());
        let y = sy.map(mark.y.to_f64_lossy());
        draw_zone_mark(&mut doc, x, y, mark.zone);
    }

    draw_zone_legend(&mut doc, width - right + 16.0, top + 12.0);
    let counts = format!(
        "{} points · {:.1}% / {:.1}% / {:.1}%",
        table.total_points, table.in_quartiles_pct, table.in_whiskers_pct, table.outlier_pct
    );
    doc.text(width - right + 16.0, top + 70.0, "start", 10.0, &counts);
    Ok(doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    Bar,
    Pie,
}

const CLASS_COLORS: [&str; 7] = [
    "#c53030", "#dd6b20", "#d69e2e", "#38a169", "#319795", "#3182ce", "#805ad5",
];

/// Bar or pie chart of the per-class counts. Classes with zero samples get
/// a zero-height bar in bar mode and no wedge in pie mode; every present
/// class is labeled `<emotion> <percentage>%`.
pub fn render_distribution(
    summary: &DistributionSummary,
    kind: DistributionKind,
) -> Result<SvgDocument> {
    if summary.total == 0 {
        return Err(Error::invalid("distribution chart of an empty summary"));
    }
    match kind {
        DistributionKind::Bar => render_distribution_bar(summary),
        DistributionKind::Pie => render_distribution_pie(summary),
    }
}

fn render_distribution_bar(summary: &DistributionSummary) -> Result<SvgDocument> {
    let (width, height) = (640.0, 400.0);
    let (left, right, top, bottom) = (56.0, 24.0, 48.0, 72.0);
    let mut doc = SvgDocument::new(width, height);
    doc.text(width / 2.0, 24.0, "middle", 15.0, "class distribution");

    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let max_count = summary.entries.iter().map(|e| e.count).max().unwrap_or(1).max(1);
    let slot = plot_w / summary.entries.len() as f64;
    let bar_w = slot * 0.6;

    doc.line(left, height - bottom, width - right, height - bottom, "#333333");
    doc.text(left - 8.0, height - bottom + 4.0, "end", 10.0, "0");
    doc.text(left - 8.0, top + 10.0, "end", 10.0, &max_count.to_string());

    for (i, entry) in summary.entries.iter().enumerate() {
        let h = entry.count as f64 / max_count as f64 * plot_h;
        let x = left + i as f64 * slot + (slot - bar_w) / 2.0;
        let y = height - bottom - h;
        doc.push(format!(
            r#"<rect class="bar" x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
            px(x),
            px(y),
            px(bar_w),
            px(h),
            CLASS_COLORS[i % CLASS_COLORS.len()]
        ));
        let cx = x + bar_w / 2.0;
        doc.text(cx, height - bottom + 16.0, "middle", 10.0, entry.emotion.as_str());
        doc.text(
            cx,
            height - bottom + 30.0,
            "middle",
            10.0,
            &format!("{:.1}%", entry.percentage),
        );
        if entry.count > 0 {
            doc.text(cx, y - 4.0, "middle", 10.0, &entry.count.to_string());
        }
    }
    Ok(doc)
}

fn render_distribution_pie(summary: &DistributionSummary) -> Result<SvgDocument> {
    let (width, height) = (640.0, 400.0);
    let mut doc = SvgDocument::new(width, height);
    doc.text(width / 2.0, 24.0, "middle", 15.0, "class distribution");

    let (cx, cy, r) = (220.0, 220.0, 140.0);
    let present: Vec<_> = summary.entries.iter().enumerate().filter(|(_, e)| e.count > 0).collect();

    if present.len() == 1 {
        let (i, _) = present[0];
        doc.push(format!(
            r#"<circle class="wedge" cx="{}" cy="{}" r="{}" fill="{}"/>"#,
            px(cx),
            px(cy),
            px(r),
            CLASS_COLORS[i % CLASS_COLORS.len()]
        ));
    } else {
        // Wedges start at 12 o'clock and run clockwise in class order.
        let mut angle = -std::f64::consts::FRAC_PI_2;
        for &(i, entry) in &present {
            let sweep = entry.count as f64 / summary.total as f64 * std::f64::consts::TAU;
            let (x0, y0) = (cx + r * angle.cos(), cy + r * angle.sin());
            let end = angle + sweep;
            let (x1, y1) = (cx + r * end.cos(), cy + r * end.sin());
            let large_arc = i32::from(sweep > std::f64::consts::PI);
            doc.push(format!(
                r#"<path class="wedge" d="M {} {} L {} {} A {} {} 0 {} 1 {} {} Z" fill="{}"/>"#,
                px(cx),
                px(cy),
                px(x0),
                px(y0),
                px(r),
                px(r),
                large_arc,
                px(x1),
                px(y1),
                CLASS_COLORS[i % CLASS_COLORS.len()]
            ));
            angle = end;
        }
    }

    // Legend with the percentage labels, one row per present class.
    for (row, &(i, entry)) in present.iter().enumerate() {
        let y = 96.0 + row as f64 * 22.0;
        doc.push(format!(
            r#"<rect x="{}" y="{}" width="12.00" height="12.00" fill="{}"/>"#,
            px(420.0),
            px(y - 10.0),
            CLASS_COLORS[i % CLASS_COLORS.len()]
        ));
        doc.text(
            438.0,
            y,
            "start",
            12.0,
            &format!("{} {:.1}%", entry.emotion, entry.percentage),
        );
    }
    Ok(doc)
}

/// Train/test loss and accuracy over epochs, as two side-by-side panels.
/// A single-epoch history renders point markers instead of polylines.
pub fn render_learning_curves(history: &TrainingHistory) -> Result<SvgDocument> {
    if history.epochs.is_empty() {
        return Err(Error::invalid("learning curves of an empty history"));
    }
    let (width, height) = (900.0, 380.0);
    let mut doc = SvgDocument::new(width, height);

    let loss_max = history
        .epochs
        .iter()
        .flat_map(|e| [e.train_loss, e.test_loss])
        .fold(f64::NEG_INFINITY, f64::max);
    let panels = [
        ("loss", 0.0, loss_max.max(1e-9) * 1.05),
        ("accuracy", 0.0, 1.0),
    ];

    for (panel, (label, y_min, y_max)) in panels.iter().enumerate() {
        let left = 64.0 + panel as f64 * 440.0;
        let (top, plot_w, plot_h) = (48.0, 330.0, 260.0);
        let bottom = top + plot_h;

        let first_epoch = history.epochs.first().map(|e| e.epoch).unwrap_or(1) as f64;
        let last_epoch = history.epochs.last().map(|e| e.epoch).unwrap_or(1) as f64;
        let sx = AxisScale::new(first_epoch, last_epoch, left, left + plot_w);
        let sy = AxisScale::new(*y_min, *y_max, bottom, top);

        doc.push(format!(
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333333" stroke-width="1"/>"##,
            px(left),
            px(top),
            px(plot_w),
            px(plot_h)
        ));
        doc.text(left + plot_w / 2.0, top - 12.0, "middle", 14.0, label);
        doc.text(left + plot_w / 2.0, bottom + 32.0, "middle", 12.0, "epoch");
        doc.text(left - 6.0, bottom + 4.0, "end", 10.0, &format!("{y_min:.2}"));
        doc.text(left - 6.0, top + 10.0, "end", 10.0, &format!("{y_max:.2}"));
        doc.text(left, bottom + 16.0, "middle", 10.0, &format!("{first_epoch:.0}"));
        doc.text(left + plot_w, bottom + 16.0, "middle", 10.0, &format!("{last_epoch:.0}"));

        let series: [(&str, &str, Box<dyn Fn(&crate::neural::EpochRecord) -> f64>); 2] = [
            ("train", "#3182ce", Box::new(move |e| if panel == 0 { e.train_loss } else { e.train_acc })),
            ("test", "#dd6b20", Box::new(move |e| if panel == 0 { e.test_loss } else { e.test_acc })),
        ];
        for (si, (name, color, value)) in series.iter().enumerate() {
            if history.epochs.len() == 1 {
                let e = &history.epochs[0];
                doc.push(format!(
                    r#"<circle class="pt-marker" cx="{}" cy="{}" r="3.00" fill="{color}"/>"#,
                    px(sx.map(e.epoch as f64)),
                    px(sy.map(value(e)))
                ));
            } else {
                let points: Vec<String> = history
                    .epochs
                    .iter()
                    .map(|e| format!("{},{}", px(sx.map(e.epoch as f64)), px(sy.map(value(e)))))
                    .collect();
                doc.push(format!(
                    r#"<polyline class="curve-{name}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                    points.join(" ")
                ));
            }
            let ly = top + 14.0 + si as f64 * 16.0;
            doc.line(left + plot_w - 46.0, ly - 4.0, left + plot_w - 30.0, ly - 4.0, color);
            doc.text(left + plot_w - 26.0, ly, "start", 11.0, name);
        }
    }
    Ok(doc)
}
