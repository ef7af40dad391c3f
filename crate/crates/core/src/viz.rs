//! Deterministic renderers: SVG figures (point progression, zone heatmaps,
//! zone grids) and RFC-4180 CSV for every query table. Identical inputs
//! produce identical bytes; there are no timestamps or generated ids.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    format_clock, Event, MatchSummary, RosterEntry, RvdRow, SkillRecord, Standing, Subject, ZoneId,
    ZoneRecord, ZoneType,
};
use crate::stats::ProgressionSeries;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VizError {
    #[error("point progression needs a non-empty series; check match availability first")]
    EmptySeries,
    #[error("no zone records to draw; check zonal data availability for the season")]
    NoZoneData,
    #[error("zone grid needs at least one panel")]
    NoPanels,
}

/// Court dimensions in metres. The men's court is the default; the women's
/// court is available as an option.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CourtDims {
    pub width_m: f64,
    pub half_depth_m: f64,
    pub baulk_m: f64,
    pub bonus_m: f64,
    pub lobby_m: f64,
}

impl CourtDims {
    pub fn men() -> CourtDims {
        CourtDims { width_m: 10.0, half_depth_m: 6.5, baulk_m: 3.75, bonus_m: 4.75, lobby_m: 1.0 }
    }

    pub fn women() -> CourtDims {
        CourtDims { width_m: 8.0, half_depth_m: 6.0, baulk_m: 3.75, bonus_m: 4.75, lobby_m: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub width: u32,
    pub height: u32,
    /// Series colors for charts; [low, high] ramp endpoints for heatmaps.
    /// Empty means the documented defaults.
    pub palette: Vec<String>,
    pub max_cols: u32,
    pub title: Option<String>,
    pub court: CourtDims,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width: 800,
            height: 500,
            palette: Vec::new(),
            max_cols: 2,
            title: None,
            court: CourtDims::men(),
        }
    }
}

const SERIES_COLORS: [&str; 2] = ["#1f77b4", "#ff7f0e"];
const STRONG_RAMP: [&str; 2] = ["#e8f5e9", "#1b5e20"];
const WEAK_RAMP: [&str; 2] = ["#ffebee", "#b71c1c"];

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
    out
}

/// Pixel transform of a chart's plot area. Exposed so tests can map data
/// coordinates to the exact pixel strings the renderer emits.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartLayout {
    pub plot_left: f64,
    pub plot_top: f64,
    pub plot_width: f64,
    pub plot_height: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl ChartLayout {
    pub fn px(&self, x: f64) -> f64 {
        self.plot_left + (x - self.x_min) / (self.x_max - self.x_min) * self.plot_width
    }

    pub fn py(&self, y: f64) -> f64 {
        self.plot_top + self.plot_height
            - (y - self.y_min) / (self.y_max - self.y_min) * self.plot_height
    }

    /// The exact "x,y" token the renderer writes for a data point.
    pub fn point_token(&self, x: f64, y: f64) -> String {
        format!("{},{}", fmt2(self.px(x)), fmt2(self.py(y)))
    }
}

fn nice_ceil(v: f64, step: f64) -> f64 {
    let steps = (v / step).ceil();
    (steps.max(1.0)) * step
}

/// Layout used by `render_point_progression` for a given series and options.
pub fn progression_layout(series: &ProgressionSeries, opts: &RenderOptions) -> ChartLayout {
    let n = series.points.len() as f64;
    let y_peak = series.points.iter().map(|(_, a, b)| (*a).max(*b)).max().unwrap_or(0) as f64;
    ChartLayout {
        plot_left: 60.0,
        plot_top: 48.0,
        plot_width: opts.width as f64 - 60.0 - 170.0,
        plot_height: opts.height as f64 - 48.0 - 56.0,
        x_min: 0.0,
        x_max: n.max(2.0),
        y_min: 0.0,
        y_max: nice_ceil(y_peak, 5.0),
    }
}

/// Two cumulative-score polylines over event index, with axes, ticks and a
/// team legend. One polyline vertex per series entry.
pub fn render_point_progression(
    series: &ProgressionSeries,
    team_names: (&str, &str),
    opts: &RenderOptions,
) -> Result<String, VizError> {
    if series.points.is_empty() {
        return Err(VizError::EmptySeries);
    }
    let layout = progression_layout(series, opts);
    let (w, h) = (opts.width, opts.height);
    let colors: Vec<&str> = if opts.palette.len() >= 2 {
        opts.palette.iter().take(2).map(|s| s.as_str()).collect()
    } else {
        SERIES_COLORS.to_vec()
    };

    let mut svg = String::new();
    let _ = write!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{w}" height="{h}" font-family="sans-serif">"##
    );
    svg.push('\n');
    let _ = writeln!(svg, r##"  <rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##);

    let title = opts
        .title
        .clone()
        .unwrap_or_else(|| format!("Point progression, match {}", series.match_id));
    let _ = writeln!(
        svg,
        r##"  <text x="{}" y="28" font-size="18" text-anchor="middle" fill="#111111">{}</text>"##,
        fmt2(layout.plot_left + layout.plot_width / 2.0),
        xml_escape(&title)
    );

    // Axes.
    let x_axis_y = layout.plot_top + layout.plot_height;
    let _ = writeln!(
        svg,
        r##"  <line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#333333" stroke-width="1"/>"##,
        fmt2(layout.plot_left),
        fmt2(x_axis_y),
        fmt2(layout.plot_left + layout.plot_width)
    );
    let _ = writeln!(
        svg,
        r##"  <line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#333333" stroke-width="1"/>"##,
        fmt2(layout.plot_left),
        fmt2(layout.plot_top),
        fmt2(x_axis_y)
    );

    // Y ticks every 5 points, X ticks on round event indexes.
    let mut y = 0.0;
    while y <= layout.y_max {
        let py = layout.py(y);
        let _ = writeln!(
            svg,
            r##"  <line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#dddddd" stroke-width="1"/>"##,
            fmt2(layout.plot_left),
            fmt2(py),
            fmt2(layout.plot_left + layout.plot_width)
        );
        let _ = writeln!(
            svg,
            r##"  <text x="{}" y="{}" font-size="11" text-anchor="end" fill="#333333">{}</text>"##,
            fmt2(layout.plot_left - 6.0),
            fmt2(py + 4.0),
            y as u32
        );
        y += 5.0;
    }
    let x_step = ((layout.x_max / 10.0).ceil() as u32).max(1) as f64;
    let mut x = 0.0;
    while x <= layout.x_max {
        let px = layout.px(x);
        let _ = writeln!(
            svg,
            r##"  <line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#333333" stroke-width="1"/>"##,
            fmt2(px),
            fmt2(x_axis_y),
            fmt2(x_axis_y + 4.0)
        );
        let _ = writeln!(
            svg,
            r##"  <text x="{}" y="{}" font-size="11" text-anchor="middle" fill="#333333">{}</text>"##,
            fmt2(px),
            fmt2(x_axis_y + 16.0),
            x as u32
        );
        x += x_step;
    }
    let _ = writeln!(
        svg,
        r##"  <text x="{}" y="{}" font-size="13" text-anchor="middle" fill="#111111">Event</text>"##,
        fmt2(layout.plot_left + layout.plot_width / 2.0),
        fmt2(x_axis_y + 36.0)
    );
    let _ = writeln!(
        svg,
        r##"  <text x="16" y="{}" font-size="13" text-anchor="middle" fill="#111111" transform="rotate(-90 16 {0})">Points</text>"##,
        fmt2(layout.plot_top + layout.plot_height / 2.0)
    );

    // One vertex per event, x positions 1..=n.
    for (series_index, color) in colors.iter().enumerate().take(2) {
        let mut points = String::new();
        for (i, (_, a, b)) in series.points.iter().enumerate() {
            let value = if series_index == 0 { *a } else { *b };
            if i > 0 {
                points.push(' ');
            }
            points.push_str(&layout.point_token(i as f64 + 1.0, value as f64));
        }
        let _ = writeln!(
            svg,
            r##"  <polyline fill="none" stroke="{color}" stroke-width="2" points="{points}"/>"##
        );
    }

    // Legend.
    let legend_x = layout.plot_left + layout.plot_width + 14.0;
    for (i, name) in [team_names.0, team_names.1].iter().enumerate() {
        let ly = layout.plot_top + 10.0 + i as f64 * 22.0;
        let _ = writeln!(
            svg,
            r##"  <line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{3}" stroke-width="3"/>"##,
            fmt2(legend_x),
            fmt2(ly),
            fmt2(legend_x + 22.0),
            colors[i]
        );
        let _ = writeln!(
            svg,
            r##"  <text x="{}" y="{}" font-size="12" fill="#111111">{}</text>"##,
            fmt2(legend_x + 28.0),
            fmt2(ly + 4.0),
            xml_escape(name)
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Position of one zone on the half-court, in metres from the top-left
/// corner (midline at the top). `None` for zones outside the taxonomy.
pub fn zone_rect_m(zone: &ZoneId, court: &CourtDims) -> Option<(f64, f64, f64, f64)> {
    let w = court.width_m;
    let d = court.half_depth_m;
    let lob = court.lobby_m;
    let play_left = lob;
    let play_width = w - 2.0 * lob;
    let col3 = play_width / 3.0;
    let col2 = play_width / 2.0;
    // Bands: midline third, baulk band up to the bonus line, bonus band
    // beyond it.
    let mid_band = d * 0.38;
    let bonus_line = court.bonus_m;
    Some(match zone {
        ZoneId::LeftLobby => (0.0, 0.0, lob, d),
        ZoneId::RightLobby => (w - lob, 0.0, lob, d),
        ZoneId::MidlineLeft => (play_left, 0.0, col3, mid_band),
        ZoneId::MidlineCentre => (play_left + col3, 0.0, col3, mid_band),
        ZoneId::MidlineRight => (play_left + 2.0 * col3, 0.0, col3, mid_band),
        ZoneId::BaulkLeft => (play_left, mid_band, col2, bonus_line - mid_band),
        ZoneId::BaulkRight => (play_left + col2, mid_band, col2, bonus_line - mid_band),
        ZoneId::BonusLeft => (play_left, bonus_line, col2, d - bonus_line),
        ZoneId::BonusRight => (play_left + col2, bonus_line, col2, d - bonus_line),
        ZoneId::Other(_) => return None,
    })
}

fn parse_hex(color: &str) -> (u8, u8, u8) {
    let hex = color.trim_start_matches('#');
    let parse = |s: &str| u8::from_str_radix(s, 16).unwrap_or(0);
    if hex.len() >= 6 {
        (parse(&hex[0..2]), parse(&hex[2..4]), parse(&hex[4..6]))
    } else {
        (0, 0, 0)
    }
}

/// Linear interpolation between two hex colors, t in [0, 1].
pub fn ramp_color(low: &str, high: &str, t: f64) -> String {
    let (lr, lg, lb) = parse_hex(low);
    let (hr, hg, hb) = parse_hex(high);
    let mix = |a: u8, b: u8| -> u8 { (a as f64 + (b as f64 - a as f64) * t).round() as u8 };
    format!("#{:02x}{:02x}{:02x}", mix(lr, hr), mix(lg, hg), mix(lb, hb))
}

/// Perceived luminance of a hex color; tests use it to compare shade order.
pub fn luminance(color: &str) -> f64 {
    let (r, g, b) = parse_hex(color);
    0.2126 * r as f64 + 0.7152 * g as f64 + 0.0722 * b as f64
}

fn ramp_endpoints(zone_type: ZoneType, opts: &RenderOptions) -> (&str, &str) {
    if opts.palette.len() >= 2 {
        (opts.palette[0].as_str(), opts.palette[1].as_str())
    } else {
        match zone_type {
            ZoneType::Strong => (STRONG_RAMP[0], STRONG_RAMP[1]),
            ZoneType::Weak => (WEAK_RAMP[0], WEAK_RAMP[1]),
        }
    }
}

/// Emits one half-court with the supplied zones shaded, as body content to
/// place inside an `<svg>` or `<g>`.
fn court_body(
    records: &[ZoneRecord],
    zone_type: ZoneType,
    opts: &RenderOptions,
    origin: (f64, f64),
    size: (f64, f64),
) -> String {
    let court = &opts.court;
    let scale = (size.0 / court.width_m).min(size.1 / court.half_depth_m);
    let court_w = court.width_m * scale;
    let court_h = court.half_depth_m * scale;
    let left = origin.0 + (size.0 - court_w) / 2.0;
    let top = origin.1;
    let (lo, hi) = ramp_endpoints(zone_type, opts);

    let min = records.iter().map(|r| r.points).min().unwrap_or(0) as f64;
    let max = records.iter().map(|r| r.points).max().unwrap_or(0) as f64;
    let shade = |points: u32| -> String {
        // Degenerate record sets: a lone zero sits at the bottom of the
        // ramp, a lone nonzero at the top.
        let t = if max > min {
            (points as f64 - min) / (max - min)
        } else if max == 0.0 {
            0.0
        } else {
            1.0
        };
        ramp_color(lo, hi, t)
    };

    let mut body = String::new();
    // Outline and unshaded zones first.
    let _ = writeln!(
        body,
        r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="#fafafa" stroke="#333333" stroke-width="1.5"/>"##,
        fmt2(left),
        fmt2(top),
        fmt2(court_w),
        fmt2(court_h)
    );
    for zone in ZoneId::KNOWN {
        if let Some((x, y, w, h)) = zone_rect_m(&zone, court) {
            let _ = writeln!(
                body,
                r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#bbbbbb" stroke-width="0.75"/>"##,
                fmt2(left + x * scale),
                fmt2(top + y * scale),
                fmt2(w * scale),
                fmt2(h * scale)
            );
        }
    }
    // Shaded zones with point labels.
    for record in records {
        let Some((x, y, w, h)) = zone_rect_m(&record.zone_id, court) else { continue };
        let fill = shade(record.points);
        let (rx, ry, rw, rh) = (left + x * scale, top + y * scale, w * scale, h * scale);
        let _ = writeln!(
            body,
            r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="#333333" stroke-width="0.75"/>"##,
            fmt2(rx),
            fmt2(ry),
            fmt2(rw),
            fmt2(rh),
            fill
        );
        let text_fill = if luminance(&fill) < 110.0 { "#ffffff" } else { "#111111" };
        let _ = writeln!(
            body,
            r##"  <text x="{}" y="{}" font-size="14" font-weight="bold" text-anchor="middle" fill="{}">{}</text>"##,
            fmt2(rx + rw / 2.0),
            fmt2(ry + rh / 2.0 + 1.0),
            text_fill,
            record.points
        );
        let _ = writeln!(
            body,
            r##"  <text x="{}" y="{}" font-size="8" text-anchor="middle" fill="{}">{}</text>"##,
            fmt2(rx + rw / 2.0),
            fmt2(ry + rh / 2.0 + 12.0),
            text_fill,
            xml_escape(record.zone_id.as_str())
        );
    }
    // Court lines: midline on top, baulk solid, bonus dashed.
    let play_left = left + court.lobby_m * scale;
    let play_right = left + (court.width_m - court.lobby_m) * scale;
    let _ = writeln!(
        body,
        r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#111111" stroke-width="2.5"/>"##,
        fmt2(left),
        fmt2(top),
        fmt2(left + court_w),
        fmt2(top)
    );
    for (line_m, dash) in [(court.baulk_m, ""), (court.bonus_m, r##" stroke-dasharray="6,4""##)] {
        let ly = top + line_m * scale;
        let _ = writeln!(
            body,
            r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#111111" stroke-width="1.5"{}/>"##,
            fmt2(play_left),
            fmt2(ly),
            fmt2(play_right),
            fmt2(ly),
            dash
        );
    }
    for lx in [play_left, play_right] {
        let _ = writeln!(
            body,
            r##"  <line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#111111" stroke-width="1"/>"##,
            fmt2(lx),
            fmt2(top),
            fmt2(top + court_h)
        );
    }
    body
}

/// Half-court heatmap of one subject-season's zones, shaded on a linear
/// scale from the record set's minimum to its maximum.
pub fn render_zone_heatmap(
    records: &[ZoneRecord],
    zone_type: ZoneType,
    opts: &RenderOptions,
) -> Result<String, VizError> {
    if records.is_empty() {
        return Err(VizError::NoZoneData);
    }
    let (w, h) = (opts.width, opts.height);
    let mut svg = String::new();
    let _ = write!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{w}" height="{h}" font-family="sans-serif">"##
    );
    svg.push('\n');
    let _ = writeln!(svg, r##"  <rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##);
    let title = opts.title.clone().unwrap_or_else(|| {
        let subject = records[0].subject;
        format!("{} zones, {subject}, season {}", zone_type, records[0].season)
    });
    let _ = writeln!(
        svg,
        r##"  <text x="{}" y="24" font-size="16" text-anchor="middle" fill="#111111">{}</text>"##,
        fmt2(w as f64 / 2.0),
        xml_escape(&title)
    );
    svg.push_str(&court_body(
        records,
        zone_type,
        opts,
        (16.0, 40.0),
        (w as f64 - 32.0, h as f64 - 56.0),
    ));
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// One tile of a zone grid: a caption plus the subject's records, empty when
/// the subject has no zone data.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonePanel {
    pub title: String,
    pub records: Vec<ZoneRecord>,
}

/// Small-multiples grid of zone heatmaps, row-major with `max_cols` panels
/// per row. Panels without data render an explicit placeholder.
pub fn render_zone_grid(
    panels: &[ZonePanel],
    zone_type: ZoneType,
    opts: &RenderOptions,
) -> Result<String, VizError> {
    if panels.is_empty() {
        return Err(VizError::NoPanels);
    }
    let cols = (opts.max_cols.max(1) as usize).min(panels.len());
    let rows = panels.len().div_ceil(cols);
    let panel_w = 360.0;
    let panel_h = 280.0;
    let gap = 16.0;
    let header = 34.0;
    let w = cols as f64 * panel_w + (cols as f64 + 1.0) * gap;
    let h = header + rows as f64 * panel_h + (rows as f64 + 1.0) * gap;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {0} {1}" width="{0}" height="{1}" font-family="sans-serif">"##,
        fmt2(w),
        fmt2(h)
    );
    svg.push('\n');
    let _ = writeln!(
        svg,
        r##"  <rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##,
        fmt2(w),
        fmt2(h)
    );
    if let Some(title) = &opts.title {
        let _ = writeln!(
            svg,
            r##"  <text x="{}" y="24" font-size="16" text-anchor="middle" fill="#111111">{}</text>"##,
            fmt2(w / 2.0),
            xml_escape(title)
        );
    }
    for (i, panel) in panels.iter().enumerate() {
        let col = i % cols;
        let row = i / cols;
        let px = gap + col as f64 * (panel_w + gap);
        let py = header + gap + row as f64 * (panel_h + gap);
        let _ = writeln!(svg, r##"  <g transform="translate({} {})">"##, fmt2(px), fmt2(py));
        let _ = writeln!(
            svg,
            r##"  <text x="{}" y="14" font-size="13" text-anchor="middle" fill="#111111">{}</text>"##,
            fmt2(panel_w / 2.0),
            xml_escape(&panel.title)
        );
        if panel.records.is_empty() {
            let _ = writeln!(
                svg,
                r##"  <rect x="8" y="24" width="{}" height="{}" fill="#f2f2f2" stroke="#999999" stroke-dasharray="5,4"/>"##,
                fmt2(panel_w - 16.0),
                fmt2(panel_h - 32.0)
            );
            let _ = writeln!(
                svg,
                r##"  <text x="{}" y="{}" font-size="13" text-anchor="middle" fill="#666666">data unavailable</text>"##,
                fmt2(panel_w / 2.0),
                fmt2(panel_h / 2.0)
            );
        } else {
            let panel_opts = RenderOptions { title: None, ..opts.clone() };
            svg.push_str(&court_body(
                &panel.records,
                zone_type,
                &panel_opts,
                (8.0, 24.0),
                (panel_w - 16.0, panel_h - 32.0),
            ));
        }
        svg.push_str("  </g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// A table that knows its schema-ordered column names and how to print each
/// row's cells.
pub trait Tabular {
    fn headers() -> &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

impl Tabular for MatchSummary {
    fn headers() -> &'static [&'static str] {
        &[
            "season",
            "match_id",
            "match_name",
            "league_stage",
            "year",
            "venue",
            "start_date",
            "end_date",
            "team_id_1",
            "team_name_1",
            "team_score_1",
            "team_id_2",
            "team_name_2",
            "team_score_2",
            "match_outcome",
            "winning_margin",
            "result",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.season.to_string(),
            self.match_id.to_string(),
            self.match_name.clone(),
            self.league_stage.to_string(),
            self.year.to_string(),
            self.venue.clone(),
            self.start_date.to_string(),
            self.end_date.to_string(),
            self.team_1.team_id.to_string(),
            self.team_1.team_name.clone(),
            self.team_1.score.to_string(),
            self.team_2.team_id.to_string(),
            self.team_2.team_name.clone(),
            self.team_2.score.to_string(),
            self.match_outcome.clone(),
            self.winning_margin.to_string(),
            self.result.clone(),
        ]
    }
}

impl Tabular for Event {
    fn headers() -> &'static [&'static str] {
        &[
            "event_no",
            "event",
            "event_text",
            "event_half",
            "event_id",
            "raiding_team_id",
            "defending_team_id",
            "raider_id",
            "defender_id",
            "raid_points",
            "raid_touch_points",
            "raid_bonus_points",
            "raid_technical_points",
            "raid_all_out_points",
            "defending_points",
            "defending_capture_points",
            "defending_bonus_points",
            "defending_technical_points",
            "defending_all_out_points",
            "super_raid",
            "super_tackle",
            "do_or_die",
            "super_ten",
            "high_five",
            "review",
            "clock",
            "status_id",
            "score",
            "seq_no",
            "defenders",
            "created_date",
            "player_id",
            "substituted_by",
            "team_id",
            "substitute_time",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.event_no.to_string(),
            self.kind.to_string(),
            opt(&self.event_text),
            self.event_half.to_string(),
            self.event_id.to_string(),
            opt(&self.raiding_team_id),
            opt(&self.defending_team_id),
            opt(&self.raider_id),
            opt(&self.defender_id),
            self.raid_points.to_string(),
            self.raid_touch_points.to_string(),
            self.raid_bonus_points.to_string(),
            self.raid_technical_points.to_string(),
            self.raid_all_out_points.to_string(),
            self.defending_points.to_string(),
            self.defending_capture_points.to_string(),
            self.defending_bonus_points.to_string(),
            self.defending_technical_points.to_string(),
            self.defending_all_out_points.to_string(),
            self.super_raid.to_string(),
            self.super_tackle.to_string(),
            self.do_or_die.to_string(),
            self.super_ten.to_string(),
            self.high_five.to_string(),
            self.review.to_string(),
            self.clock.map(format_clock).unwrap_or_default(),
            self.status_id.to_string(),
            self.score.map(|s| s.to_string()).unwrap_or_default(),
            self.seq_no.to_string(),
            self.defenders.to_string(),
            self.created_date.map(|d| d.to_string()).unwrap_or_default(),
            opt(&self.player_id),
            opt(&self.substituted_by),
            opt(&self.team_id),
            opt(&self.substitute_time),
        ]
    }
}

impl Tabular for Standing {
    fn headers() -> &'static [&'static str] {
        &[
            "group",
            "season",
            "team_id",
            "team_name",
            "league_position",
            "matches_played",
            "wins",
            "lost",
            "tied",
            "draws",
            "no_result",
            "league_points",
            "score_diff",
            "qualified",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.group.clone(),
            self.season.to_string(),
            self.team_id.to_string(),
            self.team_name.clone(),
            self.league_position.to_string(),
            self.matches_played.to_string(),
            self.wins.to_string(),
            self.lost.to_string(),
            self.tied.to_string(),
            self.draws.to_string(),
            self.no_result.to_string(),
            self.league_points.to_string(),
            self.score_diff.to_string(),
            self.qualified.to_string(),
        ]
    }
}

impl Tabular for RosterEntry {
    fn headers() -> &'static [&'static str] {
        &[
            "player_id",
            "name",
            "jersey_number",
            "played_count",
            "total_points",
            "team_name",
            "team_id",
            "matches",
            "captain_count",
            "green_card_count",
            "yellow_card_count",
            "red_card_count",
            "starter_count",
            "top_raider_count",
            "top_defender_count",
            "total_matches_in_season",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.player_id.to_string(),
            self.name.clone(),
            opt(&self.jersey_number),
            self.played_count.to_string(),
            self.total_points.to_string(),
            self.team_name.clone(),
            self.team_id.to_string(),
            self.matches.to_string(),
            self.captain_count.to_string(),
            self.green_card_count.to_string(),
            self.yellow_card_count.to_string(),
            self.red_card_count.to_string(),
            self.starter_count.to_string(),
            self.top_raider_count.to_string(),
            self.top_defender_count.to_string(),
            self.total_matches_in_season.to_string(),
        ]
    }
}

impl Tabular for RvdRow {
    fn headers() -> &'static [&'static str] {
        &[
            "season",
            "player_id",
            "raider_name",
            "team_id",
            "team_name",
            "number_of_defenders",
            "total_raids",
            "percentage_of_raids",
            "empty_raids_percentage",
            "successful_raids_percentage",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.season.to_string(),
            self.player_id.to_string(),
            self.raider_name.clone(),
            self.team_id.to_string(),
            self.team_name.clone(),
            self.number_of_defenders.to_string(),
            self.total_raids.to_string(),
            fmt2(self.percentage_of_raids),
            fmt2(self.empty_raids_percentage),
            fmt2(self.successful_raids_percentage),
        ]
    }
}

impl Tabular for SkillRecord {
    fn headers() -> &'static [&'static str] {
        &["season", "skill_type", "skill_name", "value"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.season.to_string(),
            self.skill_type.to_string(),
            self.skill_name.to_string(),
            if self.value.fract() == 0.0 {
                format!("{}", self.value as u64)
            } else {
                fmt2(self.value)
            },
        ]
    }
}

impl Tabular for ZoneRecord {
    fn headers() -> &'static [&'static str] {
        &["season", "subject_type", "subject_id", "zone_id", "zone_type", "points"]
    }

    fn cells(&self) -> Vec<String> {
        let (subject_type, subject_id) = match self.subject {
            Subject::Team { team_id } => ("team", team_id),
            Subject::Player { player_id } => ("player", player_id),
        };
        vec![
            self.season.to_string(),
            subject_type.to_string(),
            subject_id.to_string(),
            self.zone_id.to_string(),
            self.zone_type.to_string(),
            self.points.to_string(),
        ]
    }
}

fn csv_field(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// RFC-4180 CSV: header row from the schema field names, CRLF line endings,
/// UTF-8, quoting only where needed.
pub fn export_csv<T: Tabular>(rows: &[T]) -> Vec<u8> {
    let mut out = String::new();
    out.push_str(&T::headers().join(","));
    out.push_str("\r\n");
    for row in rows {
        let cells: Vec<String> = row.cells().iter().map(|c| csv_field(c)).collect();
        out.push_str(&cells.join(","));
        out.push_str("\r\n");
    }
    out.into_bytes()
}
