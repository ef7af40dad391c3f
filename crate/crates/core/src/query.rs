//! The public read API over a built [`DataStore`]: season matches,
//! play-by-play, standings, team info, rosters, raider-vs-defenders tables
//! and zone records, with filtering and stable output ordering.
//!
//! Every query is a pure read; a missing dataset is always a
//! [`QueryError::DataUnavailable`], never an empty table.

use chrono::NaiveDate;
use thiserror::Error;

use crate::ingest::{DataStore, FixtureKind};
use crate::model::{
    LeagueStage, MatchDetail, MatchSummary, MetricKey, RosterEntry, RvdRow, SkillRecord, Standing,
    Subject, TeamSeasonStats, ZoneRecord, ZoneType,
};
use crate::stats;

/// Seasons whose skill and raider-vs-defenders data never made it into the
/// public record.
pub const SKILLS_GAP_SEASONS: std::ops::RangeInclusive<u32> = 1..=4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    /// The requested dataset is absent from the store. Distinguishable from
    /// an empty result by construction.
    #[error("{0}")]
    DataUnavailable(String),
    /// A filter contradicts itself or the store.
    #[error("{0}")]
    InvalidFilter(String),
}

fn unavailable(msg: impl Into<String>) -> QueryError {
    QueryError::DataUnavailable(msg.into())
}

/// Narrowing criteria for season match lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchFilter {
    pub stage: Option<LeagueStage>,
    pub team_id: Option<u32>,
    pub team_name: Option<String>,
    pub date_from: Option<NaiveDate>,
    pub date_to: Option<NaiveDate>,
}

impl MatchFilter {
    fn team_matches(&self, store: &DataStore, m: &MatchSummary) -> bool {
        let id_hit = |id: u32| m.team_1.team_id == id || m.team_2.team_id == id;
        let name_hit = |name: &str| {
            store.team_names_equal(name, &m.team_1.team_name)
                || store.team_names_equal(name, &m.team_2.team_name)
        };
        match (self.team_id, self.team_name.as_deref()) {
            (None, None) => true,
            (Some(id), None) => id_hit(id),
            (None, Some(name)) => name_hit(name),
            (Some(id), Some(name)) => id_hit(id) && name_hit(name),
        }
    }

    fn accepts(&self, store: &DataStore, m: &MatchSummary) -> bool {
        if let Some(stage) = &self.stage {
            if &m.league_stage != stage {
                return false;
            }
        }
        if !self.team_matches(store, m) {
            return false;
        }
        if let Some(from) = self.date_from {
            if m.start_date < from {
                return false;
            }
        }
        if let Some(to) = self.date_to {
            if m.start_date > to {
                return false;
            }
        }
        true
    }

    /// When both a team id and a name are given they must agree on at least
    /// one team of the season.
    fn validate(
        &self,
        store: &DataStore,
        season_matches: &[&MatchSummary],
    ) -> Result<(), QueryError> {
        let (Some(id), Some(name)) = (self.team_id, self.team_name.as_deref()) else {
            return Ok(());
        };
        let consistent = season_matches.iter().any(|m| {
            [&m.team_1, &m.team_2]
                .into_iter()
                .any(|t| t.team_id == id && store.team_names_equal(name, &t.team_name))
        });
        if consistent {
            Ok(())
        } else {
            Err(QueryError::InvalidFilter(format!(
                "team id {id} and team name {name:?} do not resolve to the same team"
            )))
        }
    }
}

/// A season's matches sorted by start date, then match id.
pub fn get_season_matches(
    store: &DataStore,
    season: u32,
    filter: Option<&MatchFilter>,
) -> Result<Vec<MatchSummary>, QueryError> {
    if !store.has(season, FixtureKind::SeasonMatches) {
        return Err(unavailable(format!("match data for season {season} is unavailable")));
    }
    let rows = store.matches_for_season(season);
    if let Some(filter) = filter {
        filter.validate(store, &rows)?;
    }
    let mut out: Vec<MatchSummary> =
        rows.into_iter().filter(|m| filter.is_none_or(|f| f.accepts(store, m))).cloned().collect();
    out.sort_by(|a, b| a.start_date.cmp(&b.start_date).then_with(|| a.match_id.cmp(&b.match_id)));
    Ok(out)
}

/// A match's summary and ordered play-by-play.
pub fn get_match_events(
    store: &DataStore,
    season: u32,
    match_id: u32,
) -> Result<MatchDetail, QueryError> {
    let summary = store
        .match_summary(season, match_id)
        .ok_or_else(|| unavailable(format!("no match {match_id} in season {season}")))?;
    let events = store.events_for(season, match_id).ok_or_else(|| {
        if store.has(season, FixtureKind::MatchEvents) {
            unavailable(format!("no play-by-play data for match {match_id}"))
        } else {
            unavailable(format!("match breakdown data for season {season} is unavailable"))
        }
    })?;
    let mut events = events.to_vec();
    events.sort_by_key(|e| e.event_no);
    Ok(MatchDetail { summary: summary.clone(), events })
}

/// A season table sorted by group, then league position.
pub fn get_standings(store: &DataStore, season: u32) -> Result<Vec<Standing>, QueryError> {
    let rows = store
        .standings_for(season)
        .ok_or_else(|| unavailable(format!("standings for season {season} are unavailable")))?;
    let mut out = rows.to_vec();
    out.sort_by(|a, b| {
        a.group.cmp(&b.group).then_with(|| a.league_position.cmp(&b.league_position))
    });
    Ok(out)
}

/// The five team-info tables: metric ranks, values and per-match rates plus
/// the raider and defender skill breakdowns.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TeamInfo {
    pub season: u32,
    pub team_id: u32,
    pub team_name: String,
    pub matches_played: u32,
    pub values: Vec<(MetricKey, f64)>,
    pub ranks: Vec<(MetricKey, u32)>,
    pub per_match: Vec<(MetricKey, f64)>,
    pub raider_skills: Vec<SkillRecord>,
    pub defender_skills: Vec<SkillRecord>,
}

/// Builds a team's season breakdown. Ranks are recomputed across every team
/// in the season's stats so they always agree with the shipped values.
pub fn get_team_info(store: &DataStore, season: u32, team_id: u32) -> Result<TeamInfo, QueryError> {
    if store.team_stats_for(season, team_id).is_none() {
        return Err(unavailable(format!(
            "team stats for team {team_id} in season {season} are unavailable"
        )));
    }
    if !store.has_skills(season) {
        if SKILLS_GAP_SEASONS.contains(&season) {
            return Err(unavailable(
                "team skill breakdowns are unavailable for seasons 1 through 4".to_string(),
            ));
        }
        return Err(unavailable(format!(
            "team skill breakdowns for season {season} are unavailable"
        )));
    }

    let mut all: Vec<TeamSeasonStats> =
        store.season_team_stats(season).into_iter().cloned().collect();
    for stats in all.iter_mut() {
        stats::fill_per_match(stats);
    }
    stats::rank_metrics(&mut all);
    let team = all.into_iter().find(|t| t.team_id == team_id).expect("presence checked above");

    let mut values = Vec::new();
    let mut ranks = Vec::new();
    let mut per_match = Vec::new();
    for key in MetricKey::ALL {
        if let Some(cell) = team.metrics.get(&key) {
            values.push((key, cell.value));
            if let Some(rank) = cell.rank {
                ranks.push((key, rank));
            }
            if let Some(rate) = cell.per_match {
                per_match.push((key, rate));
            }
        }
    }
    Ok(TeamInfo {
        season,
        team_id,
        team_name: team.team_name,
        matches_played: team.matches_played,
        values,
        ranks,
        per_match,
        raider_skills: team.raider_skills,
        defender_skills: team.defender_skills,
    })
}

/// A team's season roster, player id ascending. Callers sort further.
pub fn get_team_roster(
    store: &DataStore,
    team_id: u32,
    season: u32,
) -> Result<Vec<RosterEntry>, QueryError> {
    let rows = store.roster_for(season, team_id).ok_or_else(|| {
        unavailable(format!("roster for team {team_id} in season {season} is unavailable"))
    })?;
    let mut out = rows.to_vec();
    out.sort_by_key(|r| r.player_id);
    Ok(out)
}

/// A player's raider-vs-defenders rows across seasons, sorted by season then
/// defender count. Player ids resolve through the manifest alias table; an
/// optional season narrows the table and surfaces the seasons 1-4 gap.
pub fn get_player_rvd(
    store: &DataStore,
    player_id: u32,
    season: Option<u32>,
) -> Result<Vec<RvdRow>, QueryError> {
    if let Some(season) = season {
        if SKILLS_GAP_SEASONS.contains(&season) {
            return Err(unavailable(
                "raider-vs-defenders data is unavailable for seasons 1 through 4".to_string(),
            ));
        }
    }
    let canonical = store.resolve_player(player_id);
    let rows = store.rvd_for(canonical).ok_or_else(|| {
        unavailable(format!("no raider-vs-defenders data for player {player_id}"))
    })?;
    let mut out: Vec<RvdRow> =
        rows.iter().filter(|r| season.is_none_or(|s| r.season == s)).cloned().collect();
    if out.is_empty() {
        return Err(unavailable(format!(
            "no raider-vs-defenders data for player {player_id} in season {}",
            season.expect("empty only possible under a season filter")
        )));
    }
    out.sort_by(|a, b| {
        a.season.cmp(&b.season).then_with(|| a.number_of_defenders.cmp(&b.number_of_defenders))
    });
    Ok(out)
}

fn zones_for_subject(
    store: &DataStore,
    season: u32,
    subject: Subject,
    zone_type: ZoneType,
) -> Result<Vec<ZoneRecord>, QueryError> {
    if !store.has(season, FixtureKind::Zones) {
        return Err(unavailable(format!("zonal data for season {season} is unavailable")));
    }
    let rows = store
        .zones_for(season, subject)
        .ok_or_else(|| unavailable(format!("no zonal data for {subject} in season {season}")))?;
    let mut out: Vec<ZoneRecord> =
        rows.iter().filter(|z| z.zone_type == zone_type).cloned().collect();
    if out.is_empty() {
        return Err(unavailable(format!(
            "no {zone_type} zone records for {subject} in season {season}"
        )));
    }
    out.sort_by(|a, b| a.zone_id.cmp(&b.zone_id));
    Ok(out)
}

/// A team's strong or weak zone records for one season.
pub fn get_team_zones(
    store: &DataStore,
    season: u32,
    team_id: u32,
    zone_type: ZoneType,
) -> Result<Vec<ZoneRecord>, QueryError> {
    zones_for_subject(store, season, Subject::Team { team_id }, zone_type)
}

/// A player's strong or weak zone records for one season.
pub fn get_player_zones(
    store: &DataStore,
    season: u32,
    player_id: u32,
    zone_type: ZoneType,
) -> Result<Vec<ZoneRecord>, QueryError> {
    let canonical = store.resolve_player(player_id);
    zones_for_subject(store, season, Subject::Player { player_id: canonical }, zone_type)
}
