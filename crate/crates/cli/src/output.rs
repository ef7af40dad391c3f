//! Aligned text tables and the per-command row shapes the CLI prints.

use kabaddi_core::model::{format_clock, Event};
use kabaddi_core::query::TeamInfo;
use kabaddi_core::viz::Tabular;
use serde::Serialize;

/// Column-aligned plain text: header, rule, rows. Deterministic for
/// identical input.
pub fn print_table<T: Tabular>(rows: &[T]) {
    let headers = T::headers();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.cells()).collect();
    for row in &cells {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut line = String::new();
    for (i, h) in headers.iter().enumerate() {
        if i > 0 {
            line.push_str("  ");
        }
        line.push_str(&format!("{h:<width$}", width = widths[i]));
    }
    println!("{}", line.trim_end());
    println!("{}", "-".repeat(line.trim_end().len().min(120)));
    for row in &cells {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{cell:<width$}", width = widths[i]));
        }
        println!("{}", line.trim_end());
    }
}

/// The play-by-play columns shown by default, mirroring the familiar
/// listing; the full 35-column record is available as CSV or JSON.
#[derive(Serialize)]
pub struct EventBrief {
    pub event_no: u32,
    pub event: String,
    pub event_text: String,
    pub clock: String,
    pub raider_id: Option<u32>,
    pub defender_id: Option<u32>,
    pub score: Option<String>,
}

impl From<&Event> for EventBrief {
    fn from(e: &Event) -> Self {
        EventBrief {
            event_no: e.event_no,
            event: e.kind.to_string(),
            event_text: e.event_text.clone().unwrap_or_default(),
            clock: e.clock.map(format_clock).unwrap_or_default(),
            raider_id: e.raider_id,
            defender_id: e.defender_id,
            score: e.score.map(|s| s.to_string()),
        }
    }
}

impl Tabular for EventBrief {
    fn headers() -> &'static [&'static str] {
        &["event_no", "event", "event_text", "clock", "raider_id", "defender_id", "score"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.event_no.to_string(),
            self.event.clone(),
            self.event_text.clone(),
            self.clock.clone(),
            self.raider_id.map(|v| v.to_string()).unwrap_or_default(),
            self.defender_id.map(|v| v.to_string()).unwrap_or_default(),
            self.score.clone().unwrap_or_default(),
        ]
    }
}

/// One metric row of the team-info output.
#[derive(Serialize)]
pub struct MetricLine {
    pub metric: String,
    pub value: String,
    pub rank: String,
    pub per_match: String,
}

impl MetricLine {
    pub fn from_info(info: &TeamInfo) -> Vec<MetricLine> {
        info.values
            .iter()
            .map(|(key, value)| {
                let rank = info
                    .ranks
                    .iter()
                    .find(|(k, _)| k == key)
                    .map(|(_, r)| r.to_string())
                    .unwrap_or_default();
                let per_match = info
                    .per_match
                    .iter()
                    .find(|(k, _)| k == key)
                    .map(|(_, v)| format!("{v:.2}"))
                    .unwrap_or_default();
                let value = if value.fract() == 0.0 {
                    format!("{}", *value as u64)
                } else {
                    format!("{value:.2}")
                };
                MetricLine { metric: key.data_key().to_string(), value, rank, per_match }
            })
            .collect()
    }
}

impl Tabular for MetricLine {
    fn headers() -> &'static [&'static str] {
        &["metric", "value", "rank", "per_match"]
    }

    fn cells(&self) -> Vec<String> {
        vec![self.metric.clone(), self.value.clone(), self.rank.clone(), self.per_match.clone()]
    }
}
