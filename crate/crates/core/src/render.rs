//! Deterministic SVG plots and CSV tables for the curve types.
//!
//! Coordinates are written with six significant digits and no timestamps,
//! so identical input always yields identical bytes.

use std::fmt::Write as _;
use std::io::Read;

use crate::compare::{ComparisonCurve, Envelope};
use crate::error::{Error, Result};
use crate::km::KmCurve;
use crate::mrl::MrlCurve;
use crate::step::StepFunction;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 44.0;
const MARGIN_BOTTOM: f64 = 52.0;
const CENSOR_TICK: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesData {
    /// A right-continuous step function drawn from 0 to `end`.
    Step { function: StepFunction, end: f64 },
    /// Values at grid points, joined as steps or straight segments.
    Points {
        grid: Vec<f64>,
        values: Vec<f64>,
        stepped: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub data: SeriesData,
    /// Censoring times, marked on step series when enabled.
    pub censor_marks: Vec<f64>,
}

impl Series {
    pub fn from_km(curve: &KmCurve) -> Self {
        Self {
            label: curve.group().to_string(),
            data: SeriesData::Step {
                function: curve.survival().clone(),
                end: curve.max_time(),
            },
            censor_marks: curve.censor_marks().to_vec(),
        }
    }

    pub fn from_mrl(curve: &MrlCurve) -> Self {
        Self {
            label: curve.group().to_string(),
            data: SeriesData::Points {
                grid: curve.grid().to_vec(),
                values: curve.values().to_vec(),
                stepped: false,
            },
            censor_marks: Vec::new(),
        }
    }

    /// Survival comparisons are step curves; MRL differences are joined
    /// with straight segments.
    pub fn from_comparison(curve: &ComparisonCurve) -> Self {
        Self {
            label: format!("{} vs {}", curve.group_a, curve.group_b),
            data: SeriesData::Points {
                grid: curve.grid.clone(),
                values: curve.values.clone(),
                stepped: curve.kind != crate::compare::ComparisonKind::MrlDiff,
            },
            censor_marks: Vec::new(),
        }
    }

    fn x_max(&self) -> f64 {
        match &self.data {
            SeriesData::Step { function, end } => {
                end.max(function.knots().last().copied().unwrap_or(0.0))
            }
            SeriesData::Points { grid, .. } => grid.last().copied().unwrap_or(0.0),
        }
    }

    fn y_values(&self) -> Vec<f64> {
        match &self.data {
            SeriesData::Step { function, .. } => std::iter::once(function.initial_value())
                .chain(function.values().iter().copied())
                .collect(),
            SeriesData::Points { values, .. } => values.clone(),
        }
    }

    fn is_empty(&self) -> bool {
        match &self.data {
            SeriesData::Step { .. } => false,
            SeriesData::Points { grid, values, .. } => grid.is_empty() || grid.len() != values.len(),
        }
    }
}

/// Shaded reference band drawn behind the series.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub grid: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl From<&Envelope> for Band {
    fn from(env: &Envelope) -> Self {
        Self {
            grid: env.grid.clone(),
            lower: env.lower.clone(),
            upper: env.upper.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YScale {
    /// Fixed to [0, 1].
    Survival,
    /// Symmetric around the given reference value.
    Centered(f64),
    /// From 0 to the data maximum.
    FromZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
    pub series: Vec<Series>,
    pub show_censor_marks: bool,
    pub envelope: Option<Band>,
    pub reference_line: Option<f64>,
    pub y_scale: YScale,
}

impl PlotSpec {
    pub fn new(title: impl Into<String>, y_scale: YScale) -> Self {
        Self {
            title: title.into(),
            x_label: "Time".into(),
            y_label: String::new(),
            width: 720,
            height: 480,
            series: Vec::new(),
            show_censor_marks: true,
            envelope: None,
            reference_line: None,
            y_scale,
        }
    }

    pub fn kaplan_meier(curves: &[&KmCurve]) -> Self {
        let mut spec = Self::new("Kaplan-Meier survival", YScale::Survival);
        spec.y_label = "Survival probability".into();
        spec.series = curves.iter().map(|c| Series::from_km(c)).collect();
        spec
    }

    pub fn mean_residual_life(curves: &[&MrlCurve]) -> Self {
        let mut spec = Self::new("Mean residual life", YScale::FromZero);
        spec.y_label = "Expected remaining time".into();
        spec.series = curves.iter().map(|c| Series::from_mrl(c)).collect();
        spec
    }

    pub fn comparison(curve: &ComparisonCurve, envelope: Option<&Envelope>) -> Self {
        use crate::compare::ComparisonKind::*;
        let (title, y_label) = match curve.kind {
            SurvDiff => ("Difference in survival", "Survival difference"),
            SurvRatio => ("Survival ratio", "Survival ratio"),
            MrlDiff => ("Difference in mean residual life", "MRL difference"),
        };
        let reference = curve.kind.reference();
        let mut spec = Self::new(title, YScale::Centered(reference));
        spec.y_label = format!("{y_label} ({} - {})", curve.group_a, curve.group_b);
        if curve.kind == SurvRatio {
            spec.y_label = format!("{y_label} ({} / {})", curve.group_a, curve.group_b);
        }
        spec.series = vec![Series::from_comparison(curve)];
        spec.envelope = envelope.map(Band::from);
        spec.reference_line = Some(reference);
        spec.show_censor_marks = false;
        spec
    }
}

/// Affine map between data space and SVG pixel space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotFrame {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
}

impl PlotFrame {
    pub fn x_px(&self, x: f64) -> f64 {
        self.left + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * (self.right - self.left)
    }

    pub fn y_px(&self, y: f64) -> f64 {
        self.bottom - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0) * (self.bottom - self.top)
    }

    pub fn x_data(&self, px: f64) -> f64 {
        self.x_range.0 + (px - self.left) / (self.right - self.left) * (self.x_range.1 - self.x_range.0)
    }

    pub fn y_data(&self, px: f64) -> f64 {
        self.y_range.0 + (self.bottom - px) / (self.bottom - self.top) * (self.y_range.1 - self.y_range.0)
    }

    /// Axis ranges and plotting area for a spec.
    pub fn for_spec(spec: &PlotSpec) -> Self {
        let x_max = spec
            .series
            .iter()
            .map(Series::x_max)
            .chain(spec.envelope.iter().flat_map(|b| b.grid.last().copied()))
            .fold(0.0, f64::max);
        let x_max = if x_max > 0.0 { x_max * 1.05 } else { 1.0 };

        let mut ys: Vec<f64> = spec.series.iter().flat_map(Series::y_values).collect();
        if let Some(band) = &spec.envelope {
            ys.extend(band.lower.iter().chain(&band.upper).copied());
        }
        ys.retain(|y| y.is_finite());
        let y_range = match spec.y_scale {
            YScale::Survival => (0.0, 1.0),
            YScale::Centered(r) => {
                let spread = ys.iter().map(|y| (y - r).abs()).fold(0.0, f64::max);
                let spread = if spread > 0.0 { spread * 1.05 } else { 1.0 };
                (r - spread, r + spread)
            }
            YScale::FromZero => {
                let top = ys.iter().copied().fold(0.0, f64::max);
                (0.0, if top > 0.0 { top * 1.05 } else { 1.0 })
            }
        };
        Self {
            x_range: (0.0, x_max),
            y_range,
            left: MARGIN_LEFT,
            right: f64::from(spec.width) - MARGIN_RIGHT,
            top: MARGIN_TOP,
            bottom: f64::from(spec.height) - MARGIN_BOTTOM,
        }
    }
}

/// Formats with six significant digits, trailing zeros trimmed.
pub fn fmt_coord(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn step_path(frame: &PlotFrame, function: &StepFunction, end: f64) -> String {
    let mut d = format!(
        "M{} {}",
        fmt_coord(frame.x_px(0.0)),
        fmt_coord(frame.y_px(function.initial_value()))
    );
    for (&k, &v) in function.knots().iter().zip(function.values()) {
        if k > end {
            break;
        }
        let _ = write!(d, " H{} V{}", fmt_coord(frame.x_px(k)), fmt_coord(frame.y_px(v)));
    }
    let _ = write!(d, " H{}", fmt_coord(frame.x_px(end)));
    d
}

fn points_path(frame: &PlotFrame, grid: &[f64], values: &[f64], stepped: bool) -> String {
    let mut d = String::new();
    let mut pen_down = false;
    for (i, (&t, &v)) in grid.iter().zip(values).enumerate() {
        if !v.is_finite() {
            pen_down = false;
            continue;
        }
        let (x, y) = (fmt_coord(frame.x_px(t)), fmt_coord(frame.y_px(v)));
        if !pen_down {
            if !d.is_empty() {
                d.push(' ');
            }
            let _ = write!(d, "M{x} {y}");
            pen_down = true;
        } else if stepped {
            let _ = write!(d, " H{x} V{y}");
        } else {
            let _ = write!(d, " L{x} {y}");
        }
        // a stepped series holds its last value until the next grid point
        if stepped && i + 1 == grid.len() {
            let _ = write!(d, " H{x}");
        }
    }
    d
}

fn band_polygons(frame: &PlotFrame, band: &Band) -> Vec<String> {
    let mut out = Vec::new();
    let n = band.grid.len();
    let mut i = 0;
    while i < n {
        if !(band.lower[i].is_finite() && band.upper[i].is_finite()) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && band.lower[j + 1].is_finite() && band.upper[j + 1].is_finite() {
            j += 1;
        }
        // stepped outline: along the upper edge, back along the lower edge
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for k in i..=j {
            let x_next = if k < j { band.grid[k + 1] } else { band.grid[k] };
            pts.push((band.grid[k], band.upper[k]));
            pts.push((x_next, band.upper[k]));
        }
        for k in (i..=j).rev() {
            let x_next = if k < j { band.grid[k + 1] } else { band.grid[k] };
            pts.push((x_next, band.lower[k]));
            pts.push((band.grid[k], band.lower[k]));
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt_coord(frame.x_px(x)), fmt_coord(frame.y_px(y))))
            .collect();
        out.push(coords.join(" "));
        i = j + 1;
    }
    out
}

fn ticks(range: (f64, f64), count: usize) -> Vec<f64> {
    (0..=count)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / count as f64)
        .collect()
}

fn tick_label(v: f64) -> String {
    if v.abs() < 1e-12 {
        return "0".into();
    }
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// Renders a standalone SVG 1.1 document.
pub fn render_plot_svg(spec: &PlotSpec) -> Result<String> {
    if spec.series.is_empty() || spec.series.iter().any(Series::is_empty) {
        return Err(Error::NothingToPlot);
    }
    if spec.width == 0 || spec.height == 0 {
        return Err(Error::Domain("plot width and height must be positive".into()));
    }
    if let Some(band) = &spec.envelope {
        let lengths_ok = band.lower.len() == band.grid.len() && band.upper.len() == band.grid.len();
        let matches_series = spec.series.iter().any(|s| match &s.data {
            SeriesData::Points { grid, .. } => *grid == band.grid,
            SeriesData::Step { .. } => false,
        });
        if !lengths_ok || !matches_series {
            return Err(Error::EnvelopeGridMismatch);
        }
    }

    let frame = PlotFrame::for_spec(spec);
    let (w, h) = (spec.width, spec.height);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text class="title" x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        fmt_coord(f64::from(w) / 2.0),
        escape(&spec.title)
    );

    // axes, ticks and labels
    let (l, r, t, b) = (frame.left, frame.right, frame.top, frame.bottom);
    let _ = writeln!(
        svg,
        r#"<path class="axes" d="M{} {} V{} H{}" fill="none" stroke="black"/>"#,
        fmt_coord(l),
        fmt_coord(t),
        fmt_coord(b),
        fmt_coord(r)
    );
    for x in ticks(frame.x_range, 5) {
        let px = fmt_coord(frame.x_px(x));
        let _ = writeln!(
            svg,
            r#"<path class="tick" d="M{px} {} V{}" stroke="black"/><text x="{px}" y="{}" text-anchor="middle">{}</text>"#,
            fmt_coord(b),
            fmt_coord(b + 5.0),
            fmt_coord(b + 18.0),
            tick_label(x)
        );
    }
    for y in ticks(frame.y_range, 5) {
        let py = fmt_coord(frame.y_px(y));
        let _ = writeln!(
            svg,
            r#"<path class="tick" d="M{} {py} H{}" stroke="black"/><text x="{}" y="{py}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            fmt_coord(l - 5.0),
            fmt_coord(l),
            fmt_coord(l - 8.0),
            tick_label(y)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="xlabel" x="{}" y="{}" text-anchor="middle">{}</text>"#,
        fmt_coord((l + r) / 2.0),
        fmt_coord(f64::from(h) - 12.0),
        escape(&spec.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text class="ylabel" x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        fmt_coord((t + b) / 2.0),
        escape(&spec.y_label)
    );

    if let Some(band) = &spec.envelope {
        for poly in band_polygons(&frame, band) {
            let _ = writeln!(
                svg,
                r##"<polygon class="envelope" points="{poly}" fill="#bbbbbb" fill-opacity="0.5" stroke="none"/>"##
            );
        }
    }
    if let Some(reference) = spec.reference_line {
        let _ = writeln!(
            svg,
            r##"<path class="reference" d="M{} {y} H{}" stroke="#555555" stroke-dasharray="4 3"/>"##,
            fmt_coord(l),
            fmt_coord(r),
            y = fmt_coord(frame.y_px(reference))
        );
    }

    for (idx, series) in spec.series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let d = match &series.data {
            SeriesData::Step { function, end } => step_path(&frame, function, *end),
            SeriesData::Points {
                grid,
                values,
                stepped,
            } => points_path(&frame, grid, values, *stepped),
        };
        let _ = writeln!(
            svg,
            r#"<path class="series" data-label="{}" d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            escape(&series.label)
        );
        if let (true, SeriesData::Step { function, end }) = (spec.show_censor_marks, &series.data) {
            for &c in series.censor_marks.iter().filter(|&&c| c <= *end) {
                let value = function.eval(c)?;
                let (x, y) = (frame.x_px(c), frame.y_px(value));
                let _ = writeln!(
                    svg,
                    r#"<path class="censor" d="M{} {} V{}" stroke="{color}"/>"#,
                    fmt_coord(x),
                    fmt_coord(y - CENSOR_TICK),
                    fmt_coord(y + CENSOR_TICK)
                );
            }
        }
        let ly = t + 6.0 + 16.0 * idx as f64;
        let _ = writeln!(
            svg,
            r#"<path class="legend" d="M{x0} {y} H{x1}" stroke="{color}" stroke-width="2"/><text x="{xt}" y="{y}" dominant-baseline="middle">{label}</text>"#,
            x0 = fmt_coord(r - 120.0),
            y = fmt_coord(ly),
            x1 = fmt_coord(r - 100.0),
            xt = fmt_coord(r - 94.0),
            label = escape(&series.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Column data for a curve export. Optional columns are written only when
/// present.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveTable {
    pub t: Vec<f64>,
    pub value: Vec<f64>,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    pub component_km: Option<Vec<f64>>,
    pub component_tail: Option<Vec<f64>>,
}

impl From<&KmCurve> for CurveTable {
    /// One row per knot of Ŝ.
    fn from(curve: &KmCurve) -> Self {
        Self {
            t: curve.survival().knots().to_vec(),
            value: curve.survival().values().to_vec(),
            ..Self::default()
        }
    }
}

impl From<&MrlCurve> for CurveTable {
    fn from(curve: &MrlCurve) -> Self {
        Self {
            t: curve.grid().to_vec(),
            value: curve.values().to_vec(),
            component_km: Some(curve.km_component().to_vec()),
            component_tail: Some(curve.tail_component().to_vec()),
            ..Self::default()
        }
    }
}

impl From<&ComparisonCurve> for CurveTable {
    fn from(curve: &ComparisonCurve) -> Self {
        Self {
            t: curve.grid.clone(),
            value: curve.values.clone(),
            ..Self::default()
        }
    }
}

impl CurveTable {
    /// Attaches envelope bounds; the grids must match exactly.
    pub fn with_envelope(mut self, envelope: &Envelope) -> Result<Self> {
        if envelope.grid != self.t {
            return Err(Error::EnvelopeGridMismatch);
        }
        self.lower = Some(envelope.lower.clone());
        self.upper = Some(envelope.upper.clone());
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    fn columns(&self) -> Vec<(&'static str, &[f64])> {
        let mut cols: Vec<(&'static str, &[f64])> = vec![("t", &self.t), ("value", &self.value)];
        let optional = [
            ("lower", &self.lower),
            ("upper", &self.upper),
            ("component_km", &self.component_km),
            ("component_tail", &self.component_tail),
        ];
        for (name, col) in optional {
            if let Some(c) = col {
                cols.push((name, c.as_slice()));
            }
        }
        cols
    }

    fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptyCurve);
        }
        if self.columns().iter().any(|(_, c)| c.len() != self.t.len()) {
            return Err(Error::Domain("curve columns differ in length".into()));
        }
        Ok(())
    }
}

/// CSV with header `t,value[,lower,upper,component_km,component_tail]`.
/// Values use the shortest round-trip decimal form.
pub fn export_curve_csv(table: &CurveTable) -> Result<String> {
    export_grouped_csv(&[(None, table)])
}

/// Several curves in one file. When any entry carries a group name a
/// leading `group` column is written. All tables must have the same columns.
pub fn export_grouped_csv(tables: &[(Option<&str>, &CurveTable)]) -> Result<String> {
    let first = tables.first().ok_or(Error::EmptyCurve)?.1;
    let names: Vec<&str> = first.columns().iter().map(|(n, _)| *n).collect();
    let grouped = tables.iter().any(|(g, _)| g.is_some());
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = Vec::new();
    if grouped {
        header.push("group");
    }
    header.extend(&names);
    writer.write_record(&header)?;
    for (group, table) in tables {
        table.validate()?;
        let cols = table.columns();
        if cols.iter().map(|(n, _)| *n).ne(names.iter().copied()) {
            return Err(Error::Domain("grouped curves must share columns".into()));
        }
        for row in 0..table.len() {
            let mut record: Vec<String> = Vec::with_capacity(cols.len() + 1);
            if grouped {
                record.push(group.unwrap_or("").to_string());
            }
            record.extend(cols.iter().map(|(_, c)| c[row].to_string()));
            writer.write_record(&record)?;
        }
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Reads back a single-curve CSV written by [`export_curve_csv`].
pub fn parse_curve_csv<R: Read>(source: R) -> Result<CurveTable> {
    let mut reader = csv::Reader::from_reader(source);
    let headers = reader.headers()?.clone();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            row: idx + 1,
            message: e.to_string(),
        })?;
        for (col, field) in cols.iter_mut().zip(record.iter()) {
            col.push(field.parse().map_err(|_| Error::Parse {
                row: idx + 1,
                message: format!("`{field}` is not a number"),
            })?);
        }
    }
    let mut table = CurveTable::default();
    for (name, col) in headers.iter().zip(cols) {
        match name {
            "t" => table.t = col,
            "value" => table.value = col,
            "lower" => table.lower = Some(col),
            "upper" => table.upper = Some(col),
            "component_km" => table.component_km = Some(col),
            "component_tail" => table.component_tail = Some(col),
            other => return Err(Error::Schema(format!("unknown column `{other}`"))),
        }
    }
    table.validate()?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SurvivalSample;
    use crate::km::km_fit;

    fn worked_km() -> KmCurve {
        let s = SurvivalSample::from_pairs("A", &[(2.0, true), (3.0, false), (4.0, true), (5.0, true)]).unwrap();
        km_fit(&s)
    }

    fn series_paths(svg: &str) -> Vec<&str> {
        svg.lines()
            .filter(|l| l.contains(r#"class="series""#))
            .map(|l| {
                let start = l.find(" d=\"").unwrap() + 4;
                let end = start + l[start..].find('"').unwrap();
                &l[start..end]
            })
            .collect()
    }

    #[test]
    fn empty_series_is_an_error() {
        let spec = PlotSpec::new("empty", YScale::Survival);
        assert!(matches!(render_plot_svg(&spec), Err(Error::NothingToPlot)));
    }

    #[test]
    fn three_knot_curve_has_three_jumps() {
        let km = worked_km();
        let svg = render_plot_svg(&PlotSpec::kaplan_meier(&[&km])).unwrap();
        let paths = series_paths(&svg);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].matches('V').count(), 3);
        assert_eq!(svg.matches(r#"class="censor""#).count(), 1);
    }

    #[test]
    fn rendering_is_deterministic() {
        let km = worked_km();
        let spec = PlotSpec::kaplan_meier(&[&km]);
        assert_eq!(render_plot_svg(&spec).unwrap(), render_plot_svg(&spec).unwrap());
    }

    #[test]
    fn envelope_grid_must_match() {
        let curve = ComparisonCurve {
            kind: crate::compare::ComparisonKind::SurvDiff,
            group_a: "A".into(),
            group_b: "B".into(),
            grid: vec![1.0, 2.0],
            values: vec![0.1, -0.2],
            window_end: 2.0,
        };
        let mut spec = PlotSpec::comparison(&curve, None);
        spec.envelope = Some(Band {
            grid: vec![1.0, 3.0],
            lower: vec![-0.3, -0.3],
            upper: vec![0.3, 0.3],
        });
        assert!(matches!(render_plot_svg(&spec), Err(Error::EnvelopeGridMismatch)));
        spec.envelope = Some(Band {
            grid: vec![1.0, 2.0],
            lower: vec![-0.3, -0.3],
            upper: vec![0.3, 0.3],
        });
        let svg = render_plot_svg(&spec).unwrap();
        assert!(svg.contains(r#"class="envelope""#));
        assert!(svg.contains(r#"class="reference""#));
    }

    #[test]
    fn pixel_coordinates_map_back_to_data() {
        let km = worked_km();
        let spec = PlotSpec::kaplan_meier(&[&km]);
        let frame = PlotFrame::for_spec(&spec);
        let svg = render_plot_svg(&spec).unwrap();
        let path = series_paths(&svg)[0];
        let ys: Vec<f64> = path
            .split_whitespace()
            .filter_map(|tok| tok.strip_prefix('V'))
            .map(|v| v.parse().unwrap())
            .collect();
        let px_per_unit = (frame.bottom - frame.top) / (frame.y_range.1 - frame.y_range.0);
        for (py, expected) in ys.iter().zip(km.survival().values()) {
            assert!((frame.y_data(*py) - expected).abs() * px_per_unit <= 0.5);
        }
        let xs: Vec<f64> = path
            .split_whitespace()
            .filter_map(|tok| tok.strip_prefix('H'))
            .map(|v| v.parse().unwrap())
            .collect();
        let px_per_x = (frame.right - frame.left) / (frame.x_range.1 - frame.x_range.0);
        for (px, expected) in xs.iter().zip(km.survival().knots()) {
            assert!((frame.x_data(*px) - expected).abs() * px_per_x <= 0.5);
        }
    }

    #[test]
    fn coordinate_formatting() {
        assert_eq!(fmt_coord(0.0), "0");
        assert_eq!(fmt_coord(123.456789), "123.457");
        assert_eq!(fmt_coord(64.0), "64");
        assert_eq!(fmt_coord(-0.000001), "-0.000001");
        assert_eq!(fmt_coord(0.1234567), "0.123457");
    }

    #[test]
    fn km_csv_has_one_row_per_knot() {
        let csv = export_curve_csv(&CurveTable::from(&worked_km())).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines, ["t,value", "2,0.75", "4,0.375", "5,0"]);
    }

    #[test]
    fn csv_round_trip_with_envelope_columns() {
        let table = CurveTable {
            t: vec![0.5, 1.0 / 3.0 + 1.0, 2.0],
            value: vec![0.1, std::f64::consts::PI, -1e-17],
            lower: Some(vec![-0.2, 0.0, f64::NAN]),
            upper: Some(vec![0.3, 4.0, f64::NAN]),
            ..CurveTable::default()
        };
        let text = export_curve_csv(&table).unwrap();
        assert!(text.starts_with("t,value,lower,upper\n"));
        let back = parse_curve_csv(text.as_bytes()).unwrap();
        assert_eq!(back.t, table.t);
        assert_eq!(back.value, table.value);
        assert!(back.lower.unwrap()[2].is_nan());
    }

    #[test]
    fn empty_curve_export_fails() {
        assert!(matches!(export_curve_csv(&CurveTable::default()), Err(Error::EmptyCurve)));
    }
}
