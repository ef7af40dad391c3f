//! Domain types shared by every other module: teams, matches, play-by-play
//! events, standings, per-team metrics, rosters, raider-vs-defenders tables
//! and court zones, plus the small pure helpers that operate on them.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{NaiveDate, NaiveDateTime};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One side of a match: identity plus the final match score.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamRef {
    pub team_id: u32,
    pub team_name: String,
    pub score: u32,
}

/// Stage of a season a match belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeagueStage {
    League,
    Eliminator,
    Qualifier,
    SemiFinal,
    Final,
    Other(String),
}

impl LeagueStage {
    pub fn parse(text: &str) -> LeagueStage {
        let t = text.trim();
        match t.to_ascii_lowercase().replace([' ', '-', '_'], "").as_str() {
            "league" => LeagueStage::League,
            "eliminator" => LeagueStage::Eliminator,
            "qualifier" => LeagueStage::Qualifier,
            "semifinal" => LeagueStage::SemiFinal,
            "final" => LeagueStage::Final,
            _ => LeagueStage::Other(t.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            LeagueStage::League => "League",
            LeagueStage::Eliminator => "Eliminator",
            LeagueStage::Qualifier => "Qualifier",
            LeagueStage::SemiFinal => "Semi Final",
            LeagueStage::Final => "Final",
            LeagueStage::Other(s) => s,
        }
    }
}

impl fmt::Display for LeagueStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for LeagueStage {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LeagueStage {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(LeagueStage::parse(&s))
    }
}

/// One row of a season's match list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub season: u32,
    pub match_id: u32,
    pub match_name: String,
    pub league_stage: LeagueStage,
    pub year: i32,
    pub venue: String,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub team_1: TeamRef,
    pub team_2: TeamRef,
    pub match_outcome: String,
    pub winning_margin: u32,
    pub result: String,
}

impl MatchSummary {
    /// True when the given team id is one of the two sides.
    pub fn involves(&self, team_id: u32) -> bool {
        self.team_1.team_id == team_id || self.team_2.team_id == team_id
    }
}

/// Running match score ordered as [team_1, team_2], matching the summary's
/// team order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Score {
    pub team_1_total: u32,
    pub team_2_total: u32,
}

impl Score {
    pub fn new(team_1_total: u32, team_2_total: u32) -> Score {
        Score { team_1_total, team_2_total }
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.team_1_total, self.team_2_total)
    }
}

// Score pairs travel as two-element arrays, the shape the source data uses.
impl Serialize for Score {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.team_1_total, self.team_2_total).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (a, b) = <(u32, u32)>::deserialize(deserializer)?;
        Ok(Score::new(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CardColor {
    Green,
    Yellow,
    Red,
}

impl fmt::Display for CardColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardColor::Green => f.write_str("Green"),
            CardColor::Yellow => f.write_str("Yellow"),
            CardColor::Red => f.write_str("Red"),
        }
    }
}

/// Kind of a play-by-play event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    SuccessfulRaid,
    UnsuccessfulRaid,
    EmptyRaid,
    Substitution,
    Timeout,
    AllOut,
    Card(CardColor),
    Other(String),
}

impl EventKind {
    /// True for the three raid outcomes.
    pub fn is_raid(&self) -> bool {
        matches!(
            self,
            EventKind::SuccessfulRaid | EventKind::UnsuccessfulRaid | EventKind::EmptyRaid
        )
    }

    pub fn as_str(&self) -> &str {
        match self {
            EventKind::SuccessfulRaid => "Successful Raid",
            EventKind::UnsuccessfulRaid => "Unsuccessful Raid",
            EventKind::EmptyRaid => "Empty Raid",
            EventKind::Substitution => "Substitution",
            EventKind::Timeout => "Timeout",
            EventKind::AllOut => "All Out",
            EventKind::Card(CardColor::Green) => "Green Card",
            EventKind::Card(CardColor::Yellow) => "Yellow Card",
            EventKind::Card(CardColor::Red) => "Red Card",
            EventKind::Other(s) => s,
        }
    }

    /// Extended name mapping used when reading fixture files. On top of the
    /// five names `classify_event` knows, the fixture dialect declares
    /// "All Out" and the three card names.
    pub fn from_fixture_name(name: &str) -> EventKind {
        let t = name.trim();
        match t.to_ascii_lowercase().as_str() {
            "all out" => EventKind::AllOut,
            "green card" => EventKind::Card(CardColor::Green),
            "yellow card" => EventKind::Card(CardColor::Yellow),
            "red card" => EventKind::Card(CardColor::Red),
            _ => classify_event(t),
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for EventKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for EventKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(EventKind::from_fixture_name(&s))
    }
}

/// Maps an event name to its kind. Total: unrecognized names come back as
/// `Other` with the original text, never an error.
pub fn classify_event(event_name: &str) -> EventKind {
    let t = event_name.trim();
    match t.to_ascii_lowercase().as_str() {
        "successful raid" => EventKind::SuccessfulRaid,
        "unsuccessful raid" => EventKind::UnsuccessfulRaid,
        "empty raid" => EventKind::EmptyRaid,
        "substitution" => EventKind::Substitution,
        "timeout" => EventKind::Timeout,
        _ => EventKind::Other(t.to_string()),
    }
}

/// |a - b|, the winning margin of a match.
pub fn winning_margin(a: u32, b: u32) -> u32 {
    a.abs_diff(b)
}

/// Half clocks count down from 20 minutes; events carry seconds remaining.
pub const HALF_SECONDS: u32 = 1200;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClockParseError {
    #[error("clock {0:?} is not in MM:SS form")]
    Malformed(String),
    #[error("clock minutes {0:?} out of range 0..=20")]
    Minutes(String),
    #[error("clock seconds {0:?} out of range 0..=59")]
    Seconds(String),
    #[error("clock {0:?} exceeds the 20:00 half length")]
    TooLong(String),
}

/// Parses a "MM:SS" half clock into seconds remaining (0..=1200).
pub fn parse_clock(text: &str) -> Result<u32, ClockParseError> {
    let (mm, ss) =
        text.split_once(':').ok_or_else(|| ClockParseError::Malformed(text.to_string()))?;
    if mm.is_empty() || ss.len() != 2 || !mm.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ClockParseError::Malformed(text.to_string()));
    }
    let minutes: u32 = mm.parse().map_err(|_| ClockParseError::Malformed(text.to_string()))?;
    let seconds: u32 = ss.parse().map_err(|_| ClockParseError::Malformed(text.to_string()))?;
    if minutes > 20 {
        return Err(ClockParseError::Minutes(mm.to_string()));
    }
    if seconds > 59 {
        return Err(ClockParseError::Seconds(ss.to_string()));
    }
    let total = minutes * 60 + seconds;
    if total > HALF_SECONDS {
        return Err(ClockParseError::TooLong(text.to_string()));
    }
    Ok(total)
}

/// Canonical formatter inverted by `parse_clock`.
pub fn format_clock(seconds: u32) -> String {
    format!("{:02}:{:02}", seconds / 60, seconds % 60)
}

/// Serde helper for optional clocks: accepts "MM:SS" strings or raw second
/// counts, always emits the "MM:SS" form.
pub mod clock_opt {
    use super::*;
    use serde_json::Value;

    pub fn serialize<S: Serializer>(v: &Option<u32>, serializer: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(secs) => serializer.serialize_some(&format_clock(*secs)),
            None => serializer.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Option<u32>, D::Error> {
        match Option::<Value>::deserialize(deserializer)? {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => parse_clock(&s).map(Some).map_err(D::Error::custom),
            Some(Value::Number(n)) => {
                let secs = n
                    .as_u64()
                    .filter(|&v| v <= HALF_SECONDS as u64)
                    .ok_or_else(|| D::Error::custom(format!("clock {n} out of range 0..=1200")))?;
                Ok(Some(secs as u32))
            }
            Some(other) => {
                Err(D::Error::custom(format!("clock must be a string or number, got {other}")))
            }
        }
    }
}

/// One play-by-play record. Optional fields are absent where the source
/// prints no value (raider ids on timeouts, scores on substitutions).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub event_no: u32,
    #[serde(rename = "event")]
    pub kind: EventKind,
    #[serde(default)]
    pub event_text: Option<String>,
    pub event_half: u8,
    #[serde(default)]
    pub event_id: i64,
    #[serde(default)]
    pub raiding_team_id: Option<u32>,
    #[serde(default)]
    pub defending_team_id: Option<u32>,
    #[serde(default)]
    pub raider_id: Option<u32>,
    #[serde(default)]
    pub defender_id: Option<u32>,
    #[serde(default)]
    pub raid_points: u32,
    #[serde(default)]
    pub raid_touch_points: u32,
    #[serde(default)]
    pub raid_bonus_points: u32,
    #[serde(default)]
    pub raid_technical_points: u32,
    #[serde(default)]
    pub raid_all_out_points: u32,
    #[serde(default)]
    pub defending_points: u32,
    #[serde(default)]
    pub defending_capture_points: u32,
    #[serde(default)]
    pub defending_bonus_points: u32,
    #[serde(default)]
    pub defending_technical_points: u32,
    #[serde(default)]
    pub defending_all_out_points: u32,
    #[serde(default)]
    pub super_raid: bool,
    #[serde(default)]
    pub super_tackle: bool,
    #[serde(default)]
    pub do_or_die: bool,
    #[serde(default)]
    pub super_ten: bool,
    #[serde(default)]
    pub high_five: bool,
    #[serde(default)]
    pub review: bool,
    #[serde(default, with = "clock_opt")]
    pub clock: Option<u32>,
    #[serde(default)]
    pub status_id: i32,
    #[serde(default)]
    pub score: Option<Score>,
    #[serde(default)]
    pub seq_no: u32,
    #[serde(default)]
    pub defenders: u8,
    #[serde(default)]
    pub created_date: Option<NaiveDateTime>,
    #[serde(default)]
    pub player_id: Option<u32>,
    #[serde(default)]
    pub substituted_by: Option<u32>,
    #[serde(default)]
    pub team_id: Option<u32>,
    #[serde(default)]
    pub substitute_time: Option<u32>,
}

impl Event {
    /// Sum of the four raid point components.
    pub fn raid_component_sum(&self) -> u32 {
        self.raid_touch_points
            + self.raid_bonus_points
            + self.raid_technical_points
            + self.raid_all_out_points
    }

    /// Sum of the four defending point components.
    pub fn defending_component_sum(&self) -> u32 {
        self.defending_capture_points
            + self.defending_bonus_points
            + self.defending_technical_points
            + self.defending_all_out_points
    }

    pub fn total_points(&self) -> u32 {
        self.raid_points + self.defending_points
    }
}

/// A match summary together with its ordered event stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchDetail {
    pub summary: MatchSummary,
    pub events: Vec<Event>,
}

/// One team's row in a season table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Standing {
    pub group: String,
    pub season: u32,
    pub team_id: u32,
    pub team_name: String,
    pub league_position: u32,
    pub matches_played: u32,
    pub wins: u32,
    pub lost: u32,
    pub tied: u32,
    pub draws: u32,
    pub no_result: u32,
    pub league_points: u32,
    pub score_diff: i64,
    pub qualified: bool,
}

/// The nineteen team-season metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricKey {
    AllOutsConceded,
    SuccessfulTacklePercent,
    SuperRaid,
    SuccessfulRaidPercent,
    DodRaidPoints,
    SuperTackles,
    TotalTouchPoints,
    TotalBonusPoints,
    RaidPoints,
    SuccessfulRaids,
    TotalPointsConceded,
    TacklePoints,
    TotalPoints,
    SuccessfulTackles,
    SuccessfulTacklesPerMatch,
    AllOutsInflicted,
    AverageRaidPoints,
    AvgPointsScored,
    AverageTacklePoints,
}

/// Whether rank 1 means the largest or the smallest value of a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankDirection {
    HigherBetter,
    LowerBetter,
}

impl MetricKey {
    pub const ALL: [MetricKey; 19] = [
        MetricKey::AllOutsConceded,
        MetricKey::SuccessfulTacklePercent,
        MetricKey::SuperRaid,
        MetricKey::SuccessfulRaidPercent,
        MetricKey::DodRaidPoints,
        MetricKey::SuperTackles,
        MetricKey::TotalTouchPoints,
        MetricKey::TotalBonusPoints,
        MetricKey::RaidPoints,
        MetricKey::SuccessfulRaids,
        MetricKey::TotalPointsConceded,
        MetricKey::TacklePoints,
        MetricKey::TotalPoints,
        MetricKey::SuccessfulTackles,
        MetricKey::SuccessfulTacklesPerMatch,
        MetricKey::AllOutsInflicted,
        MetricKey::AverageRaidPoints,
        MetricKey::AvgPointsScored,
        MetricKey::AverageTacklePoints,
    ];

    pub fn data_key(&self) -> &'static str {
        match self {
            MetricKey::AllOutsConceded => "all-outs-conceded",
            MetricKey::SuccessfulTacklePercent => "successful-tackle-percent",
            MetricKey::SuperRaid => "super-raid",
            MetricKey::SuccessfulRaidPercent => "successful-raid-percent",
            MetricKey::DodRaidPoints => "dod-raid-points",
            MetricKey::SuperTackles => "super-tackles",
            MetricKey::TotalTouchPoints => "total-touch-points",
            MetricKey::TotalBonusPoints => "total-bonus-points",
            MetricKey::RaidPoints => "raid-points",
            MetricKey::SuccessfulRaids => "successful-raids",
            MetricKey::TotalPointsConceded => "total-points-conceded",
            MetricKey::TacklePoints => "tackle-points",
            MetricKey::TotalPoints => "total-points",
            MetricKey::SuccessfulTackles => "successful-tackles",
            MetricKey::SuccessfulTacklesPerMatch => "successful-tackles-per-match",
            MetricKey::AllOutsInflicted => "all-outs-inflicted",
            MetricKey::AverageRaidPoints => "average-raid-points",
            MetricKey::AvgPointsScored => "avg-points-scored",
            MetricKey::AverageTacklePoints => "average-tackle-points",
        }
    }

    pub fn parse(text: &str) -> Option<MetricKey> {
        let wanted = text.trim().to_ascii_lowercase().replace([' ', '_'], "-");
        MetricKey::ALL.iter().copied().find(|k| k.data_key() == wanted)
    }

    /// Conceded metrics rank ascending, everything else descending.
    pub fn rank_direction(&self) -> RankDirection {
        match self {
            MetricKey::AllOutsConceded | MetricKey::TotalPointsConceded => {
                RankDirection::LowerBetter
            }
            _ => RankDirection::HigherBetter,
        }
    }

    /// Percent and average metrics are already rates; only counting metrics
    /// get a per-match column.
    pub fn per_match_able(&self) -> bool {
        !matches!(
            self,
            MetricKey::SuccessfulTacklePercent
                | MetricKey::SuccessfulRaidPercent
                | MetricKey::SuccessfulTacklesPerMatch
                | MetricKey::AverageRaidPoints
                | MetricKey::AvgPointsScored
                | MetricKey::AverageTacklePoints
        )
    }

    pub fn is_percent(&self) -> bool {
        matches!(self, MetricKey::SuccessfulTacklePercent | MetricKey::SuccessfulRaidPercent)
    }
}

impl fmt::Display for MetricKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.data_key())
    }
}

impl Serialize for MetricKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.data_key())
    }
}

impl<'de> Deserialize<'de> for MetricKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        MetricKey::parse(&s).ok_or_else(|| D::Error::custom(format!("unknown metric key {s:?}")))
    }
}

/// Value of one metric for one team-season, with the rank and per-match rate
/// filled in by the statistics layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCell {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_match: Option<f64>,
}

impl MetricCell {
    pub fn value(value: f64) -> MetricCell {
        MetricCell { value, rank: None, per_match: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkillType {
    Raider,
    Defender,
}

impl fmt::Display for SkillType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkillType::Raider => f.write_str("Raider"),
            SkillType::Defender => f.write_str("Defender"),
        }
    }
}

/// Named raiding and defending techniques.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkillName {
    // Defensive moves
    WaistHold,
    AnkleHold,
    ThighHold,
    Block,
    ChainTackle,
    Dash,
    // Offensive moves
    ToeTouch,
    HandTouch,
    FrontSideKick,
    ReverseKick,
    LegThrust,
    Dubki,
    Other(String),
}

impl SkillName {
    pub fn parse(text: &str) -> SkillName {
        let t = text.trim();
        match t.to_ascii_lowercase().replace(['-', '_'], " ").as_str() {
            "waist hold" | "waist/back hold" | "back hold" => SkillName::WaistHold,
            "ankle hold" => SkillName::AnkleHold,
            "thigh hold" => SkillName::ThighHold,
            "block" => SkillName::Block,
            "chain tackle" => SkillName::ChainTackle,
            "dash" => SkillName::Dash,
            "toe touch" => SkillName::ToeTouch,
            "hand touch" => SkillName::HandTouch,
            "front and side kick" | "front kick" | "side kick" => SkillName::FrontSideKick,
            "reverse kick" | "reverse/back kick" | "back kick" => SkillName::ReverseKick,
            "leg thrust" => SkillName::LegThrust,
            "dubki" | "dubki (duck)" | "duck" => SkillName::Dubki,
            _ => SkillName::Other(t.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            SkillName::WaistHold => "Waist Hold",
            SkillName::AnkleHold => "Ankle Hold",
            SkillName::ThighHold => "Thigh Hold",
            SkillName::Block => "Block",
            SkillName::ChainTackle => "Chain Tackle",
            SkillName::Dash => "Dash",
            SkillName::ToeTouch => "Toe Touch",
            SkillName::HandTouch => "Hand Touch",
            SkillName::FrontSideKick => "Front and Side Kick",
            SkillName::ReverseKick => "Reverse Kick",
            SkillName::LegThrust => "Leg Thrust",
            SkillName::Dubki => "Dubki",
            SkillName::Other(s) => s,
        }
    }

    /// Which side of the game a known skill belongs to; `None` for `Other`.
    pub fn family(&self) -> Option<SkillType> {
        match self {
            SkillName::WaistHold
            | SkillName::AnkleHold
            | SkillName::ThighHold
            | SkillName::Block
            | SkillName::ChainTackle
            | SkillName::Dash => Some(SkillType::Defender),
            SkillName::ToeTouch
            | SkillName::HandTouch
            | SkillName::FrontSideKick
            | SkillName::ReverseKick
            | SkillName::LegThrust
            | SkillName::Dubki => Some(SkillType::Raider),
            SkillName::Other(_) => None,
        }
    }
}

impl fmt::Display for SkillName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for SkillName {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SkillName {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(SkillName::parse(&s))
    }
}

/// How often a team used one technique over a season.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillRecord {
    pub season: u32,
    pub skill_type: SkillType,
    pub skill_name: SkillName,
    pub value: f64,
}

/// A team's season: match count, the nineteen metrics and the skill
/// breakdowns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamSeasonStats {
    pub season: u32,
    pub team_id: u32,
    pub team_name: String,
    pub matches_played: u32,
    pub metrics: BTreeMap<MetricKey, MetricCell>,
    #[serde(default)]
    pub raider_skills: Vec<SkillRecord>,
    #[serde(default)]
    pub defender_skills: Vec<SkillRecord>,
}

/// One player's roster row for a team-season.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub player_id: u32,
    pub name: String,
    #[serde(default)]
    pub jersey_number: Option<u32>,
    pub played_count: u32,
    pub total_points: u32,
    pub team_name: String,
    pub team_id: u32,
    pub matches: u32,
    pub captain_count: u32,
    pub green_card_count: u32,
    pub yellow_card_count: u32,
    pub red_card_count: u32,
    pub starter_count: u32,
    pub top_raider_count: u32,
    pub top_defender_count: u32,
    pub total_matches_in_season: u32,
}

/// Raider performance bucketed by the number of defenders on the mat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RvdRow {
    pub season: u32,
    pub player_id: u32,
    pub raider_name: String,
    pub team_id: u32,
    pub team_name: String,
    pub number_of_defenders: u8,
    pub total_raids: u32,
    pub percentage_of_raids: f64,
    pub empty_raids_percentage: f64,
    pub successful_raids_percentage: f64,
}

/// Subject a zone record describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "subject_type", rename_all = "lowercase")]
pub enum Subject {
    Team { team_id: u32 },
    Player { player_id: u32 },
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Team { team_id } => write!(f, "team {team_id}"),
            Subject::Player { player_id } => write!(f, "player {player_id}"),
        }
    }
}

/// The nine-zone court taxonomy: the two lobbies plus three line bands split
/// left/centre/right (midline) or left/right (baulk and bonus).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ZoneId {
    LeftLobby,
    RightLobby,
    MidlineLeft,
    MidlineCentre,
    MidlineRight,
    BaulkLeft,
    BaulkRight,
    BonusLeft,
    BonusRight,
    Other(String),
}

impl ZoneId {
    pub const KNOWN: [ZoneId; 9] = [
        ZoneId::LeftLobby,
        ZoneId::RightLobby,
        ZoneId::MidlineLeft,
        ZoneId::MidlineCentre,
        ZoneId::MidlineRight,
        ZoneId::BaulkLeft,
        ZoneId::BaulkRight,
        ZoneId::BonusLeft,
        ZoneId::BonusRight,
    ];

    pub fn parse(text: &str) -> ZoneId {
        let t = text.trim();
        match t.to_ascii_lowercase().replace(['-', '_'], " ").as_str() {
            "left lobby" => ZoneId::LeftLobby,
            "right lobby" => ZoneId::RightLobby,
            "midline left" => ZoneId::MidlineLeft,
            "midline centre" | "midline center" => ZoneId::MidlineCentre,
            "midline right" => ZoneId::MidlineRight,
            "baulk left" => ZoneId::BaulkLeft,
            "baulk right" => ZoneId::BaulkRight,
            "bonus left" => ZoneId::BonusLeft,
            "bonus right" => ZoneId::BonusRight,
            _ => ZoneId::Other(t.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            ZoneId::LeftLobby => "Left Lobby",
            ZoneId::RightLobby => "Right Lobby",
            ZoneId::MidlineLeft => "Midline Left",
            ZoneId::MidlineCentre => "Midline Centre",
            ZoneId::MidlineRight => "Midline Right",
            ZoneId::BaulkLeft => "Baulk Left",
            ZoneId::BaulkRight => "Baulk Right",
            ZoneId::BonusLeft => "Bonus Left",
            ZoneId::BonusRight => "Bonus Right",
            ZoneId::Other(s) => s,
        }
    }
}

impl fmt::Display for ZoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ZoneId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ZoneId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(ZoneId::parse(&s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZoneType {
    Strong,
    Weak,
}

impl ZoneType {
    pub fn parse(text: &str) -> Option<ZoneType> {
        match text.trim().to_ascii_lowercase().as_str() {
            "strong" => Some(ZoneType::Strong),
            "weak" => Some(ZoneType::Weak),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ZoneType::Strong => "strong",
            ZoneType::Weak => "weak",
        }
    }
}

impl fmt::Display for ZoneType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Points a subject scored from one court zone over a season.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneRecord {
    pub season: u32,
    #[serde(flatten)]
    pub subject: Subject,
    pub zone_id: ZoneId,
    pub zone_type: ZoneType,
    pub points: u32,
}

/// Rounds to two decimals, halves away from zero ("34.81", "40.00").
pub fn round2(value: f64) -> f64 {
    (value * 100.0).round() / 100.0
}
