//! Fixture-corpus ingestion: parses the on-disk data directory into typed
//! records, enforces schema invariants, and builds the indexed in-memory
//! store.
//!
//! Layout contract:
//!
//! ```text
//! data/
//!   manifest.json              {"version": 1, "files": [{"path", "kind", "season", "sha256"}]}
//!   season_<N>/matches.json
//!   season_<N>/standings.json
//!   season_<N>/team_stats.json
//!   season_<N>/rosters.json
//!   season_<N>/zones.json      may be absent (availability gap)
//!   season_<N>/events/match_<ID>.json
//!   rvd.json                   all seasons, keyed by player
//! ```
//!
//! All files are UTF-8 JSON arrays (the manifest is an object). Input field
//! names are matched case-insensitively: keys are lowercased, runs of
//! spaces/dashes collapse to underscores, and a small alias table maps the
//! remaining synonyms, so `Team_Id`, `team-id` and `Team ID` all land on
//! `team_id`. Flat match columns (`team_id_1`, `team_score_1`, ...) fold
//! into the nested `team_1`/`team_2` objects.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Component, Path};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{
    Event, EventKind, MatchSummary, RosterEntry, RvdRow, Standing, Subject, TeamSeasonStats,
    ZoneRecord,
};
use crate::rules::{codes, point_sum_violations, Severity, Violation, ViolationSource};

/// The file types a data directory may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureKind {
    SeasonMatches,
    MatchEvents,
    Standings,
    TeamStats,
    Rosters,
    Rvd,
    Zones,
    Manifest,
}

impl fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FixtureKind::SeasonMatches => "season_matches",
            FixtureKind::MatchEvents => "match_events",
            FixtureKind::Standings => "standings",
            FixtureKind::TeamStats => "team_stats",
            FixtureKind::Rosters => "rosters",
            FixtureKind::Rvd => "rvd",
            FixtureKind::Zones => "zones",
            FixtureKind::Manifest => "manifest",
        };
        f.write_str(name)
    }
}

/// Optional identifier mappings shipped with the manifest: alternate player
/// ids and team-name spellings seen across sources.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aliases {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub players: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub team_names: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub path: String,
    pub kind: FixtureKind,
    #[serde(default)]
    pub season: Option<u32>,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub files: Vec<ManifestFile>,
    #[serde(default)]
    pub aliases: Aliases,
}

/// Lowercase hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: malformed JSON at line {line}, column {column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{path}: expected a JSON array of records")]
    NotAnArray { path: String },
    #[error("manifest not found at {0}")]
    MissingManifest(String),
    #[error("manifest unreadable: {0}")]
    ManifestIo(#[from] std::io::Error),
    #[error("manifest invalid: {0}")]
    ManifestSyntax(String),
    #[error("manifest version {0} is not supported (expected 1)")]
    ManifestVersion(u32),
}

/// Typed records of one fixture file.
#[derive(Debug, Clone, PartialEq)]
pub enum FixtureRecords {
    Matches(Vec<MatchSummary>),
    Events(Vec<Event>),
    Standings(Vec<Standing>),
    TeamStats(Vec<TeamSeasonStats>),
    Rosters(Vec<RosterEntry>),
    Rvd(Vec<RvdRow>),
    Zones(Vec<ZoneRecord>),
    Manifest(Manifest),
}

impl FixtureRecords {
    pub fn len(&self) -> usize {
        match self {
            FixtureRecords::Matches(v) => v.len(),
            FixtureRecords::Events(v) => v.len(),
            FixtureRecords::Standings(v) => v.len(),
            FixtureRecords::TeamStats(v) => v.len(),
            FixtureRecords::Rosters(v) => v.len(),
            FixtureRecords::Rvd(v) => v.len(),
            FixtureRecords::Zones(v) => v.len(),
            FixtureRecords::Manifest(_) => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Canonical serialization: schema-ordered keys, two-space indentation,
    /// `\n` line endings, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        match self {
            FixtureRecords::Matches(v) => canonical_json(v),
            FixtureRecords::Events(v) => canonical_json(v),
            FixtureRecords::Standings(v) => canonical_json(v),
            FixtureRecords::TeamStats(v) => canonical_json(v),
            FixtureRecords::Rosters(v) => canonical_json(v),
            FixtureRecords::Rvd(v) => canonical_json(v),
            FixtureRecords::Zones(v) => canonical_json(v),
            FixtureRecords::Manifest(m) => canonical_json_value(m),
        }
    }
}

pub fn canonical_json<T: Serialize>(records: &[T]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("records serialize");
    s.push('\n');
    s
}

pub fn canonical_json_value<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

// Known canonical field names per record shape, used to warn on extras.
const MATCH_FIELDS: &[&str] = &[
    "season",
    "match_id",
    "match_name",
    "league_stage",
    "year",
    "venue",
    "start_date",
    "end_date",
    "team_1",
    "team_2",
    "match_outcome",
    "winning_margin",
    "result",
    "team_id_1",
    "team_name_1",
    "team_score_1",
    "team_id_2",
    "team_name_2",
    "team_score_2",
];
const EVENT_FIELDS: &[&str] = &[
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
];
const STANDING_FIELDS: &[&str] = &[
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
];
const TEAM_STATS_FIELDS: &[&str] = &[
    "season",
    "team_id",
    "team_name",
    "matches_played",
    "metrics",
    "raider_skills",
    "defender_skills",
];
const ROSTER_FIELDS: &[&str] = &[
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
];
const RVD_FIELDS: &[&str] = &[
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
];
const ZONE_FIELDS: &[&str] =
    &["season", "subject_type", "team_id", "player_id", "zone_id", "zone_type", "points"];

/// Documented synonyms applied after normalization.
const KEY_ALIASES: &[(&str, &str)] = &[
    ("player_name", "name"),
    ("event_name", "event"),
    ("zone", "zone_id"),
    ("pct_of_raids", "percentage_of_raids"),
    ("total_matches", "total_matches_in_season"),
];

/// Lowercases a key and collapses spaces, dashes and repeated separators to
/// single underscores: "Winning Margin" and "player-id" become
/// "winning_margin" and "player_id".
pub fn normalize_key(key: &str) -> String {
    let mut out = String::with_capacity(key.len());
    let mut last_sep = true;
    for ch in key.trim().chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
            last_sep = false;
        } else if !last_sep {
            out.push('_');
            last_sep = true;
        }
    }
    while out.ends_with('_') {
        out.pop();
    }
    let normalized = out;
    for (alias, canonical) in KEY_ALIASES {
        if normalized == *alias {
            return (*canonical).to_string();
        }
    }
    normalized
}

fn file_source(path: &str, record: Option<usize>) -> ViolationSource {
    ViolationSource::File { path: path.to_string(), record }
}

/// Normalizes one record's keys, reporting unknown leftovers.
fn normalize_record(
    raw: &Map<String, Value>,
    known: &[&str],
    path: &str,
    index: usize,
    violations: &mut Vec<Violation>,
) -> Map<String, Value> {
    let mut out = Map::new();
    for (key, value) in raw {
        let norm = normalize_key(key);
        if known.contains(&norm.as_str()) {
            out.insert(norm, value.clone());
        } else {
            violations.push(Violation::warning(
                file_source(path, Some(index)),
                codes::W_UNKNOWN_FIELD,
                format!("field {key:?} is not in the schema; ignored"),
            ));
        }
    }
    out
}

/// Folds flat `team_id_1`-style columns into nested `team_1`/`team_2`.
fn fold_flat_teams(record: &mut Map<String, Value>, _: usize, _: &mut Vec<Violation>) {
    for side in ["1", "2"] {
        let nested_key = format!("team_{side}");
        if record.contains_key(&nested_key) {
            continue;
        }
        let id = record.remove(&format!("team_id_{side}"));
        let name = record.remove(&format!("team_name_{side}"));
        let score = record.remove(&format!("team_score_{side}"));
        if id.is_none() && name.is_none() && score.is_none() {
            continue;
        }
        let mut team = Map::new();
        if let Some(v) = id {
            team.insert("team_id".into(), v);
        }
        if let Some(v) = name {
            team.insert("team_name".into(), v);
        }
        if let Some(v) = score {
            team.insert("score".into(), v);
        }
        record.insert(nested_key, Value::Object(team));
    }
}

fn parse_array(bytes: &[u8], path: &str) -> Result<Vec<Value>, IngestError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| IngestError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    match value {
        Value::Array(items) => Ok(items),
        _ => Err(IngestError::NotAnArray { path: path.to_string() }),
    }
}

type Decoded<T> = (Vec<(usize, T)>, Vec<Violation>);

fn decode_records<T: serde::de::DeserializeOwned>(
    bytes: &[u8],
    path: &str,
    known: &[&str],
    mut prepare: impl FnMut(&mut Map<String, Value>, usize, &mut Vec<Violation>),
) -> Result<Decoded<T>, IngestError> {
    let items = parse_array(bytes, path)?;
    let mut violations = Vec::new();
    let mut records = Vec::new();
    for (index, item) in items.into_iter().enumerate() {
        let Value::Object(raw) = item else {
            violations.push(Violation::error(
                file_source(path, Some(index)),
                codes::E_SCHEMA,
                "record is not a JSON object",
            ));
            continue;
        };
        let mut normalized = normalize_record(&raw, known, path, index, &mut violations);
        prepare(&mut normalized, index, &mut violations);
        match serde_json::from_value::<T>(Value::Object(normalized)) {
            Ok(record) => records.push((index, record)),
            Err(e) => violations.push(Violation::error(
                file_source(path, Some(index)),
                codes::E_SCHEMA,
                e.to_string(),
            )),
        }
    }
    Ok((records, violations))
}

fn check_match(m: &MatchSummary, path: &str, index: usize, violations: &mut Vec<Violation>) {
    let src = || file_source(path, Some(index));
    if m.winning_margin != m.team_1.score.abs_diff(m.team_2.score) {
        violations.push(Violation::error(
            src(),
            codes::E_MARGIN,
            format!(
                "winning_margin {} but scores are {} and {}",
                m.winning_margin, m.team_1.score, m.team_2.score
            ),
        ));
    }
    if m.start_date > m.end_date {
        violations.push(Violation::error(
            src(),
            codes::E_DATE_ORDER,
            format!("start_date {} is after end_date {}", m.start_date, m.end_date),
        ));
    }
    for team in [&m.team_1, &m.team_2] {
        if team.team_id == 0 {
            violations.push(Violation::error(src(), codes::E_RANGE, "team_id must be positive"));
        }
    }
    if m.season == 0 || m.match_id == 0 {
        violations.push(Violation::error(
            src(),
            codes::E_RANGE,
            "season and match_id must be positive",
        ));
    }
}

fn check_event(e: &Event, path: &str, index: usize, violations: &mut Vec<Violation>) {
    let src = || file_source(path, Some(index));
    if e.event_no == 0 {
        violations.push(Violation::error(src(), codes::E_RANGE, "event_no must be positive"));
    }
    if !(1..=2).contains(&e.event_half) {
        violations.push(Violation::error(
            src(),
            codes::E_RANGE,
            format!("event_half {} must be 1 or 2", e.event_half),
        ));
    }
    if e.defenders > 7 {
        violations.push(Violation::error(
            src(),
            codes::E_RANGE,
            format!("defenders {} out of range 0..=7", e.defenders),
        ));
    }
    for v in point_sum_violations(e, 0) {
        violations.push(Violation { source: src(), ..v });
    }
    if e.kind == EventKind::EmptyRaid && e.total_points() > 0 {
        violations.push(Violation::error(
            src(),
            codes::E_EMPTY_POINTS,
            format!("empty raid carries {} points", e.total_points()),
        ));
    }
    if matches!(e.kind, EventKind::Substitution | EventKind::Timeout)
        && (e.total_points() > 0 || e.raider_id.is_some())
    {
        violations.push(Violation::error(
            src(),
            codes::E_NONRAID_POINTS,
            format!("{} carries points or a raider", e.kind),
        ));
    }
}

fn check_standing(s: &Standing, path: &str, index: usize, violations: &mut Vec<Violation>) {
    let src = || file_source(path, Some(index));
    if s.wins + s.lost + s.tied + s.draws + s.no_result != s.matches_played {
        violations.push(Violation::error(
            src(),
            codes::E_TALLY,
            format!(
                "wins {} + lost {} + tied {} + draws {} + no_result {} != matches_played {}",
                s.wins, s.lost, s.tied, s.draws, s.no_result, s.matches_played
            ),
        ));
    }
    if s.team_id == 0 || s.league_position == 0 {
        violations.push(Violation::error(
            src(),
            codes::E_RANGE,
            "team_id and league_position must be positive",
        ));
    }
}

fn check_standings_positions(
    rows: &[(usize, Standing)],
    path: &str,
    violations: &mut Vec<Violation>,
) {
    let mut groups: BTreeMap<(u32, &str), Vec<u32>> = BTreeMap::new();
    for (_, s) in rows {
        groups.entry((s.season, s.group.as_str())).or_default().push(s.league_position);
    }
    for ((season, group), mut positions) in groups {
        positions.sort_unstable();
        let contiguous = positions.iter().enumerate().all(|(i, p)| *p == i as u32 + 1);
        if !contiguous {
            violations.push(Violation::error(
                file_source(path, None),
                codes::E_POSITIONS,
                format!("season {season} group {group:?} positions {positions:?} are not contiguous from 1"),
            ));
        }
    }
}

fn check_team_stats(
    t: &TeamSeasonStats,
    path: &str,
    index: usize,
    violations: &mut Vec<Violation>,
) {
    let src = || file_source(path, Some(index));
    for (key, cell) in &t.metrics {
        if cell.value < 0.0 {
            violations.push(Violation::error(
                src(),
                codes::E_RANGE,
                format!("{key} is negative: {}", cell.value),
            ));
        }
        if key.is_percent() && !(0.0..=100.0).contains(&cell.value) {
            violations.push(Violation::error(
                src(),
                codes::E_RANGE,
                format!("{key} is {} but percent metrics live in [0, 100]", cell.value),
            ));
        }
    }
    for (records, expected) in [
        (&t.raider_skills, crate::model::SkillType::Raider),
        (&t.defender_skills, crate::model::SkillType::Defender),
    ] {
        for skill in records.iter() {
            match skill.skill_name.family() {
                Some(family) if family != skill.skill_type || skill.skill_type != expected => {
                    violations.push(Violation::error(
                        src(),
                        codes::E_SKILL_FAMILY,
                        format!(
                            "skill {:?} belongs to the {} family, recorded under {}",
                            skill.skill_name.as_str(),
                            family,
                            skill.skill_type
                        ),
                    ));
                }
                None => violations.push(Violation::warning(
                    src(),
                    codes::W_UNKNOWN_NAME,
                    format!(
                        "skill {:?} is outside the documented taxonomy",
                        skill.skill_name.as_str()
                    ),
                )),
                _ => {}
            }
            if skill.value < 0.0 {
                violations.push(Violation::error(src(), codes::E_RANGE, "skill value is negative"));
            }
        }
    }
}

fn check_roster(r: &RosterEntry, path: &str, index: usize, violations: &mut Vec<Violation>) {
    let src = || file_source(path, Some(index));
    if r.played_count > r.matches {
        violations.push(Violation::error(
            src(),
            codes::E_RANGE,
            format!("played_count {} exceeds team matches {}", r.played_count, r.matches),
        ));
    }
    if r.starter_count > r.played_count {
        violations.push(Violation::error(
            src(),
            codes::E_RANGE,
            format!("starter_count {} exceeds played_count {}", r.starter_count, r.played_count),
        ));
    }
}

fn check_rvd(r: &RvdRow, path: &str, index: usize, violations: &mut Vec<Violation>) {
    let src = || file_source(path, Some(index));
    if !(1..=7).contains(&r.number_of_defenders) {
        violations.push(Violation::error(
            src(),
            codes::E_RANGE,
            format!("number_of_defenders {} out of range 1..=7", r.number_of_defenders),
        ));
    }
    for (label, pct) in [
        ("percentage_of_raids", r.percentage_of_raids),
        ("empty_raids_percentage", r.empty_raids_percentage),
        ("successful_raids_percentage", r.successful_raids_percentage),
    ] {
        if !(0.0..=100.0).contains(&pct) {
            violations.push(Violation::error(
                src(),
                codes::E_RANGE,
                format!("{label} is {pct}, outside [0, 100]"),
            ));
        }
    }
}

fn check_rvd_sums(rows: &[(usize, RvdRow)], path: &str, violations: &mut Vec<Violation>) {
    let mut sums: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for (_, r) in rows {
        *sums.entry((r.player_id, r.season)).or_insert(0.0) += r.percentage_of_raids;
    }
    for ((player, season), sum) in sums {
        if !(99.0..=101.0).contains(&sum) {
            violations.push(Violation::error(
                file_source(path, None),
                codes::E_PCT_SUM,
                format!("player {player} season {season}: percentage_of_raids sums to {sum:.2}"),
            ));
        }
    }
}

fn check_zones(rows: &[(usize, ZoneRecord)], path: &str, violations: &mut Vec<Violation>) {
    let mut seen: BTreeMap<(u32, Subject, String, crate::model::ZoneType), usize> = BTreeMap::new();
    for (index, z) in rows {
        if let crate::model::ZoneId::Other(name) = &z.zone_id {
            violations.push(Violation::warning(
                file_source(path, Some(*index)),
                codes::W_UNKNOWN_NAME,
                format!("zone {name:?} is outside the nine-zone taxonomy"),
            ));
        }
        let key = (z.season, z.subject, z.zone_id.as_str().to_string(), z.zone_type);
        if let Some(first) = seen.insert(key, *index) {
            violations.push(Violation::error(
                file_source(path, Some(*index)),
                codes::E_KEY_DUP,
                format!(
                    "duplicate zone record for {} season {} {} ({}); first at record {first}",
                    z.subject, z.season, z.zone_id, z.zone_type
                ),
            ));
        }
    }
}

/// Pre-shapes a team-stats record for one path: plain metric numbers widen
/// to `{"value": n}` cells, and metric keys outside the taxonomy warn and
/// drop out.
fn prepare_team_stats(
    path: &str,
) -> impl FnMut(&mut Map<String, Value>, usize, &mut Vec<Violation>) + '_ {
    move |record, index, violations| {
        if let Some(Value::Object(metrics)) = record.get_mut("metrics") {
            let keys: Vec<String> = metrics.keys().cloned().collect();
            for key in keys {
                let entry = metrics.get_mut(&key).expect("key listed");
                if entry.is_number() {
                    let wrapped = serde_json::json!({ "value": entry.clone() });
                    *entry = wrapped;
                }
                if crate::model::MetricKey::parse(&key).is_none() {
                    metrics.remove(&key);
                    violations.push(Violation::warning(
                        file_source(path, Some(index)),
                        codes::W_UNKNOWN_NAME,
                        format!("metric {key:?} is not in the metric taxonomy; ignored"),
                    ));
                }
            }
        }
    }
}

/// Parses one fixture file into typed records plus findings. Syntax failures
/// are hard errors carrying line/column; schema and range findings come back
/// as violations (errors reject the record, warnings keep it).
pub fn load_fixture(
    kind: FixtureKind,
    bytes: &[u8],
    path: &str,
) -> Result<(FixtureRecords, Vec<Violation>), IngestError> {
    match kind {
        FixtureKind::SeasonMatches => {
            let (rows, mut violations) =
                decode_records::<MatchSummary>(bytes, path, MATCH_FIELDS, fold_flat_teams)?;
            for (index, m) in &rows {
                check_match(m, path, *index, &mut violations);
            }
            Ok((FixtureRecords::Matches(rows.into_iter().map(|(_, m)| m).collect()), violations))
        }
        FixtureKind::MatchEvents => {
            let (rows, mut violations) =
                decode_records::<Event>(bytes, path, EVENT_FIELDS, |_, _, _| {})?;
            for (index, e) in &rows {
                check_event(e, path, *index, &mut violations);
            }
            Ok((FixtureRecords::Events(rows.into_iter().map(|(_, e)| e).collect()), violations))
        }
        FixtureKind::Standings => {
            let (rows, mut violations) =
                decode_records::<Standing>(bytes, path, STANDING_FIELDS, |_, _, _| {})?;
            for (index, s) in &rows {
                check_standing(s, path, *index, &mut violations);
            }
            check_standings_positions(&rows, path, &mut violations);
            Ok((FixtureRecords::Standings(rows.into_iter().map(|(_, s)| s).collect()), violations))
        }
        FixtureKind::TeamStats => {
            let (rows, mut violations) = decode_records::<TeamSeasonStats>(
                bytes,
                path,
                TEAM_STATS_FIELDS,
                prepare_team_stats(path),
            )?;
            for (index, t) in &rows {
                check_team_stats(t, path, *index, &mut violations);
            }
            Ok((FixtureRecords::TeamStats(rows.into_iter().map(|(_, t)| t).collect()), violations))
        }
        FixtureKind::Rosters => {
            let (rows, mut violations) =
                decode_records::<RosterEntry>(bytes, path, ROSTER_FIELDS, |_, _, _| {})?;
            for (index, r) in &rows {
                check_roster(r, path, *index, &mut violations);
            }
            Ok((FixtureRecords::Rosters(rows.into_iter().map(|(_, r)| r).collect()), violations))
        }
        FixtureKind::Rvd => {
            let (rows, mut violations) =
                decode_records::<RvdRow>(bytes, path, RVD_FIELDS, |_, _, _| {})?;
            for (index, r) in &rows {
                check_rvd(r, path, *index, &mut violations);
            }
            check_rvd_sums(&rows, path, &mut violations);
            Ok((FixtureRecords::Rvd(rows.into_iter().map(|(_, r)| r).collect()), violations))
        }
        FixtureKind::Zones => {
            let (rows, mut violations) =
                decode_records::<ZoneRecord>(bytes, path, ZONE_FIELDS, |_, _, _| {})?;
            check_zones(&rows, path, &mut violations);
            Ok((FixtureRecords::Zones(rows.into_iter().map(|(_, z)| z).collect()), violations))
        }
        FixtureKind::Manifest => {
            let manifest: Manifest =
                serde_json::from_slice(bytes).map_err(|e| IngestError::Parse {
                    path: path.to_string(),
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                })?;
            Ok((FixtureRecords::Manifest(manifest), Vec::new()))
        }
    }
}

/// True when a manifest path is relative, normalized and free of traversal.
pub fn safe_relative_path(path: &str) -> bool {
    let p = Path::new(path);
    !path.is_empty()
        && !path.contains('\\')
        && p.components().all(|c| matches!(c, Component::Normal(_)))
}

/// The indexed, immutable store every query runs against.
#[derive(Debug, Clone, Default)]
pub struct DataStore {
    matches: BTreeMap<(u32, u32), MatchSummary>,
    events: BTreeMap<(u32, u32), Vec<Event>>,
    standings: BTreeMap<u32, Vec<Standing>>,
    team_stats: BTreeMap<(u32, u32), TeamSeasonStats>,
    rosters: BTreeMap<(u32, u32), Vec<RosterEntry>>,
    rvd: BTreeMap<u32, Vec<RvdRow>>,
    zones: BTreeMap<(u32, Subject), Vec<ZoneRecord>>,
    availability: BTreeSet<(u32, FixtureKind)>,
    rvd_seasons: BTreeSet<u32>,
    skills_seasons: BTreeSet<u32>,
    aliases: Aliases,
}

impl DataStore {
    pub fn has(&self, season: u32, kind: FixtureKind) -> bool {
        match kind {
            FixtureKind::Rvd => self.rvd_seasons.contains(&season),
            _ => self.availability.contains(&(season, kind)),
        }
    }

    /// Seasons where team skill breakdowns exist.
    pub fn has_skills(&self, season: u32) -> bool {
        self.skills_seasons.contains(&season)
    }

    pub fn seasons(&self) -> BTreeSet<u32> {
        self.availability.iter().map(|(s, _)| *s).collect()
    }

    pub fn matches_for_season(&self, season: u32) -> Vec<&MatchSummary> {
        self.matches.range((season, 0)..=(season, u32::MAX)).map(|(_, m)| m).collect()
    }

    pub fn match_summary(&self, season: u32, match_id: u32) -> Option<&MatchSummary> {
        self.matches.get(&(season, match_id))
    }

    pub fn events_for(&self, season: u32, match_id: u32) -> Option<&[Event]> {
        self.events.get(&(season, match_id)).map(|v| v.as_slice())
    }

    pub fn standings_for(&self, season: u32) -> Option<&[Standing]> {
        self.standings.get(&season).map(|v| v.as_slice())
    }

    pub fn team_stats_for(&self, season: u32, team_id: u32) -> Option<&TeamSeasonStats> {
        self.team_stats.get(&(season, team_id))
    }

    pub fn season_team_stats(&self, season: u32) -> Vec<&TeamSeasonStats> {
        self.team_stats.range((season, 0)..=(season, u32::MAX)).map(|(_, t)| t).collect()
    }

    pub fn roster_for(&self, season: u32, team_id: u32) -> Option<&[RosterEntry]> {
        self.rosters.get(&(season, team_id)).map(|v| v.as_slice())
    }

    pub fn rvd_for(&self, player_id: u32) -> Option<&[RvdRow]> {
        self.rvd.get(&player_id).map(|v| v.as_slice())
    }

    pub fn rvd_players(&self) -> Vec<u32> {
        self.rvd.keys().copied().collect()
    }

    pub fn zones_for(&self, season: u32, subject: Subject) -> Option<&[ZoneRecord]> {
        self.zones.get(&(season, subject)).map(|v| v.as_slice())
    }

    pub fn aliases(&self) -> &Aliases {
        &self.aliases
    }

    /// Resolves a player id through the manifest alias table.
    pub fn resolve_player(&self, player_id: u32) -> u32 {
        self.aliases.players.get(&player_id.to_string()).copied().unwrap_or(player_id)
    }

    /// Canonical spelling of a team name per the alias table.
    pub fn canonical_team_name<'a>(&'a self, name: &'a str) -> &'a str {
        let trimmed = name.trim();
        self.aliases.team_names.get(trimmed).map(|s| s.as_str()).unwrap_or(trimmed)
    }

    /// Exact match after trimming an alias resolution; fuzzy matching is
    /// deliberately out of scope.
    pub fn team_names_equal(&self, a: &str, b: &str) -> bool {
        self.canonical_team_name(a) == self.canonical_team_name(b)
    }
}

fn events_match_id(path: &str) -> Option<u32> {
    let name = Path::new(path).file_stem()?.to_str()?;
    name.strip_prefix("match_")?.parse().ok()
}

struct LoadedFile {
    entry: ManifestFile,
    records: Option<FixtureRecords>,
    violations: Vec<Violation>,
}

/// A manifest digest is 64 lowercase-insensitive hex characters.
pub fn well_formed_digest(digest: &str) -> bool {
    digest.len() == 64 && digest.bytes().all(|b| b.is_ascii_hexdigit())
}

fn load_one(data_dir: &Path, entry: &ManifestFile) -> LoadedFile {
    let mut violations = Vec::new();
    if !safe_relative_path(&entry.path) {
        violations.push(Violation::error(
            file_source(&entry.path, None),
            codes::E_SCHEMA,
            "manifest path must be relative with no traversal segments",
        ));
        return LoadedFile { entry: entry.clone(), records: None, violations };
    }
    if !well_formed_digest(&entry.sha256) {
        violations.push(Violation::error(
            file_source(&entry.path, None),
            codes::E_SCHEMA,
            format!("manifest digest {:?} is not 64 hex characters", entry.sha256),
        ));
        return LoadedFile { entry: entry.clone(), records: None, violations };
    }
    let full = data_dir.join(&entry.path);
    let bytes = match std::fs::read(&full) {
        Ok(b) => b,
        Err(e) => {
            violations.push(Violation::error(
                file_source(&entry.path, None),
                codes::E_SCHEMA,
                format!("unreadable: {e}"),
            ));
            return LoadedFile { entry: entry.clone(), records: None, violations };
        }
    };
    if sha256_hex(&bytes) != entry.sha256.to_ascii_lowercase() {
        violations.push(Violation::warning(
            file_source(&entry.path, None),
            codes::W_DIGEST,
            "file bytes do not match the manifest digest",
        ));
    }
    match load_fixture(entry.kind, &bytes, &entry.path) {
        Ok((records, mut file_violations)) => {
            violations.append(&mut file_violations);
            LoadedFile { entry: entry.clone(), records: Some(records), violations }
        }
        Err(e) => {
            violations.push(Violation::error(
                file_source(&entry.path, None),
                codes::E_SCHEMA,
                e.to_string(),
            ));
            LoadedFile { entry: entry.clone(), records: None, violations }
        }
    }
}

/// Reads every file named in the manifest and builds the store. Files with
/// any error-severity finding contribute no records; everything else loads
/// (partial-store semantics). The violation list is canonically ordered by
/// path, then record index, regardless of parse order.
pub fn build_store(data_dir: &Path) -> Result<(DataStore, Vec<Violation>), IngestError> {
    let manifest_path = data_dir.join("manifest.json");
    if !manifest_path.exists() {
        return Err(IngestError::MissingManifest(manifest_path.display().to_string()));
    }
    let manifest_bytes = std::fs::read(&manifest_path)?;
    let manifest: Manifest = serde_json::from_slice(&manifest_bytes)
        .map_err(|e| IngestError::ManifestSyntax(e.to_string()))?;
    if manifest.version != 1 {
        return Err(IngestError::ManifestVersion(manifest.version));
    }

    // Parse files in parallel chunks; merge preserves manifest order.
    let loaded: Vec<LoadedFile> = {
        let entries = &manifest.files;
        let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8);
        if workers <= 1 || entries.len() <= 1 {
            entries.iter().map(|e| load_one(data_dir, e)).collect()
        } else {
            let chunk = entries.len().div_ceil(workers);
            let mut out: Vec<Vec<LoadedFile>> = Vec::new();
            std::thread::scope(|scope| {
                let handles: Vec<_> = entries
                    .chunks(chunk)
                    .map(|slice| {
                        scope.spawn(move || {
                            slice.iter().map(|e| load_one(data_dir, e)).collect::<Vec<_>>()
                        })
                    })
                    .collect();
                for handle in handles {
                    out.push(handle.join().expect("loader thread panicked"));
                }
            });
            out.into_iter().flatten().collect()
        }
    };

    let mut store = DataStore { aliases: manifest.aliases.clone(), ..DataStore::default() };
    let mut violations: Vec<Violation> = Vec::new();

    // Insert summaries before events so team references can be checked.
    let phase = |kind: FixtureKind| -> usize {
        match kind {
            FixtureKind::MatchEvents => 1,
            _ => 0,
        }
    };
    let mut order: Vec<usize> = (0..loaded.len()).collect();
    order.sort_by_key(|&i| (phase(loaded[i].entry.kind), i));

    for i in order {
        let file = &loaded[i];
        violations.extend(file.violations.iter().cloned());
        if file.violations.iter().any(|v| v.is_error()) {
            continue;
        }
        let Some(records) = &file.records else { continue };
        let season = file.entry.season;
        let path = &file.entry.path;
        match records {
            FixtureRecords::Matches(rows) => {
                let mut clean = true;
                for m in rows {
                    if store.matches.insert((m.season, m.match_id), m.clone()).is_some() {
                        violations.push(Violation::error(
                            file_source(path, None),
                            codes::E_KEY_DUP,
                            format!("match ({}, {}) already loaded", m.season, m.match_id),
                        ));
                        clean = false;
                    }
                }
                if clean {
                    if let Some(season) = season {
                        store.availability.insert((season, FixtureKind::SeasonMatches));
                    }
                }
            }
            FixtureRecords::Events(rows) => {
                let Some(season) = season else {
                    violations.push(Violation::error(
                        file_source(path, None),
                        codes::E_SCHEMA,
                        "events entry missing its season in the manifest",
                    ));
                    continue;
                };
                let Some(match_id) = events_match_id(path) else {
                    violations.push(Violation::error(
                        file_source(path, None),
                        codes::E_SCHEMA,
                        "events file name must be match_<ID>.json",
                    ));
                    continue;
                };
                let Some(summary) = store.matches.get(&(season, match_id)) else {
                    violations.push(Violation::error(
                        file_source(path, None),
                        codes::E_ORPHAN,
                        format!("no match ({season}, {match_id}) in the season's match list"),
                    ));
                    continue;
                };
                let (t1, t2) = (summary.team_1.team_id, summary.team_2.team_id);
                let mut clean = true;
                for e in rows {
                    for team in [e.raiding_team_id, e.defending_team_id].into_iter().flatten() {
                        if team != t1 && team != t2 {
                            violations.push(Violation::error(
                                file_source(path, None),
                                codes::E_TEAM_REF,
                                format!(
                                    "event {} references team {team}, not one of {t1} or {t2}",
                                    e.event_no
                                ),
                            ));
                            clean = false;
                        }
                    }
                }
                if clean {
                    store.events.insert((season, match_id), rows.clone());
                    store.availability.insert((season, FixtureKind::MatchEvents));
                }
            }
            FixtureRecords::Standings(rows) => {
                if let Some(season) = season {
                    store.standings.insert(season, rows.clone());
                    store.availability.insert((season, FixtureKind::Standings));
                }
            }
            FixtureRecords::TeamStats(rows) => {
                for t in rows {
                    if store.team_stats.insert((t.season, t.team_id), t.clone()).is_some() {
                        violations.push(Violation::error(
                            file_source(path, None),
                            codes::E_KEY_DUP,
                            format!("team stats ({}, {}) already loaded", t.season, t.team_id),
                        ));
                    }
                    if !t.raider_skills.is_empty() || !t.defender_skills.is_empty() {
                        store.skills_seasons.insert(t.season);
                    }
                }
                if let Some(season) = season {
                    store.availability.insert((season, FixtureKind::TeamStats));
                }
            }
            FixtureRecords::Rosters(rows) => {
                let Some(season) = season else { continue };
                for r in rows {
                    store.rosters.entry((season, r.team_id)).or_default().push(r.clone());
                }
                store.availability.insert((season, FixtureKind::Rosters));
            }
            FixtureRecords::Rvd(rows) => {
                for r in rows {
                    store.rvd.entry(r.player_id).or_default().push(r.clone());
                    store.rvd_seasons.insert(r.season);
                }
            }
            FixtureRecords::Zones(rows) => {
                for z in rows {
                    store.zones.entry((z.season, z.subject)).or_default().push(z.clone());
                }
                if let Some(season) = season {
                    store.availability.insert((season, FixtureKind::Zones));
                }
            }
            FixtureRecords::Manifest(_) => {}
        }
    }

    violations.sort_by(|a, b| {
        a.source
            .cmp(&b.source)
            .then_with(|| a.rule_id.cmp(&b.rule_id))
            .then_with(|| a.message.cmp(&b.message))
    });

    Ok((store, violations))
}

/// Severity summary helper for callers deciding exit codes.
pub fn count_by_severity(violations: &[Violation]) -> (usize, usize) {
    let errors = violations.iter().filter(|v| v.severity == Severity::Error).count();
    (errors, violations.len() - errors)
}
