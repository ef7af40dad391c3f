//! The Kabaddi law engine: validates event streams against the scoring rules
//! and reconstructs running scores independently of the recorded `score`
//! column.
//!
//! Findings are data, never panics. Every finding carries a `rule_id` from
//! the closed registry below; the codes are a stable public contract emitted
//! verbatim by the CLI.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CardColor, Event, EventKind, MatchDetail, Score};

pub mod codes {
    //! The violation registry. `E-*` codes are errors, `W-*` codes warnings.

    /// Point totals do not equal the sum of their four components.
    pub const E_POINT_SUM: &str = "E-POINT-SUM";
    /// do_or_die flag disagrees with the two-consecutive-empty-raids context.
    pub const E_DOD_FLAG: &str = "E-DOD-FLAG";
    /// A do-or-die raid scoring zero raid points conceded nothing.
    pub const E_DOD_PENALTY: &str = "E-DOD-PENALTY";
    /// An all-out component is present but not worth exactly two points.
    pub const E_ALLOUT_TWO: &str = "E-ALLOUT-TWO";
    /// A card event grants the wrong technical points.
    pub const E_CARD_TECH: &str = "E-CARD-TECH";
    /// Bonus points scored with fewer than six defenders on the mat.
    pub const E_BONUS_SIX: &str = "E-BONUS-SIX";
    /// Super tackle flagged while the defense was not shorthanded.
    pub const E_SUPERTACKLE: &str = "E-SUPERTACKLE";
    /// An empty raid carrying points.
    pub const E_EMPTY_POINTS: &str = "E-EMPTY-POINTS";
    /// A substitution or timeout carrying points or a raider.
    pub const E_NONRAID_POINTS: &str = "E-NONRAID-POINTS";
    /// Recorded running score diverges from the reconstruction.
    pub const E_SCORE_TRACK: &str = "E-SCORE-TRACK";
    /// Final reconstructed score differs from the match summary.
    pub const E_FINAL_SCORE: &str = "E-FINAL-SCORE";
    /// Clock increased within a half.
    pub const E_CLOCK_ORDER: &str = "E-CLOCK-ORDER";
    /// Event numbers not strictly increasing.
    pub const E_EVENTNO_ORDER: &str = "E-EVENTNO-ORDER";
    /// Event references a team id that is not one of the match's two teams.
    pub const E_TEAM_REF: &str = "E-TEAM-REF";
    /// A field value is outside its documented range.
    pub const E_RANGE: &str = "E-RANGE";
    /// A record failed to parse against the fixture schema.
    pub const E_SCHEMA: &str = "E-SCHEMA";
    /// Two records claim the same index key.
    pub const E_KEY_DUP: &str = "E-KEY-DUP";
    /// Match summary margin differs from the score difference.
    pub const E_MARGIN: &str = "E-MARGIN";
    /// Match start date is after its end date.
    pub const E_DATE_ORDER: &str = "E-DATE-ORDER";
    /// Standings tallies do not add up to matches played.
    pub const E_TALLY: &str = "E-TALLY";
    /// League positions in a group are not contiguous from 1.
    pub const E_POSITIONS: &str = "E-POSITIONS";
    /// A skill name's family contradicts its declared skill type.
    pub const E_SKILL_FAMILY: &str = "E-SKILL-FAMILY";
    /// Per-player percentage-of-raids column does not sum near 100.
    pub const E_PCT_SUM: &str = "E-PCT-SUM";
    /// An events file exists for a match absent from the season's match list.
    pub const E_ORPHAN: &str = "E-ORPHAN";

    /// Raid-to-raid clock gap long enough to suggest the 30-second limit was
    /// broken (the per-event clock cannot prove it).
    pub const W_RAID_30S: &str = "W-RAID-30S";
    /// Nonzero defending bonus points (a bonus is a raider concept).
    pub const W_DEF_BONUS: &str = "W-DEF-BONUS";
    /// super_ten flags disagree with summed raid points.
    pub const W_SUPER_TEN: &str = "W-SUPER-TEN";
    /// high_five flags disagree with summed capture points.
    pub const W_HIGH_FIVE: &str = "W-HIGH-FIVE";
    /// A fixture record carries a field outside the schema.
    pub const W_UNKNOWN_FIELD: &str = "W-UNKNOWN-FIELD";
    /// A fixture file's bytes do not match the manifest digest.
    pub const W_DIGEST: &str = "W-DIGEST";
    /// A skill or zone name outside the documented taxonomy.
    pub const W_UNKNOWN_NAME: &str = "W-UNKNOWN-NAME";
    /// A percent metric with no attempts to rate; value reported as 0.
    pub const W_ZERO_DENOM: &str = "W-ZERO-DENOM";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// Where a finding was observed: a fixture file (with an optional record
/// index) or an event of a match.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationSource {
    File { path: String, record: Option<usize> },
    Event { match_id: u32, event_no: u32 },
}

impl fmt::Display for ViolationSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationSource::File { path, record: Some(i) } => write!(f, "{path}#{i}"),
            ViolationSource::File { path, record: None } => f.write_str(path),
            ViolationSource::Event { match_id, event_no } => {
                write!(f, "match {match_id} event {event_no}")
            }
        }
    }
}

/// One rule-engine or schema finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub source: ViolationSource,
    pub rule_id: String,
    pub severity: Severity,
    pub message: String,
}

impl Violation {
    pub fn error(source: ViolationSource, rule_id: &str, message: impl Into<String>) -> Violation {
        Violation {
            source,
            rule_id: rule_id.to_string(),
            severity: Severity::Error,
            message: message.into(),
        }
    }

    pub fn warning(
        source: ViolationSource,
        rule_id: &str,
        message: impl Into<String>,
    ) -> Violation {
        Violation {
            source,
            rule_id: rule_id.to_string(),
            severity: Severity::Warning,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} at {}: {}", self.severity, self.rule_id, self.source, self.message)
    }
}

/// Thresholds the laws depend on. The super-tackle bound is the standard
/// league convention for a seven-player side.
#[derive(Debug, Clone)]
pub struct RuleConfig {
    /// A defense at or below this many players is shorthanded.
    pub super_tackle_max_defenders: u8,
    /// Bonus points require at least this many defenders on the mat.
    pub bonus_min_defenders: u8,
    /// Raid-to-raid clock gap (seconds) above which W-RAID-30S fires.
    pub raid_gap_warning_seconds: u32,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            super_tackle_max_defenders: 3,
            bonus_min_defenders: 6,
            raid_gap_warning_seconds: 60,
        }
    }
}

/// State of a raid as seen by the laws: who raids, how many empty raids the
/// raiding team has strung together, and the defensive mat strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RaidContext {
    pub raiding_team_id: u32,
    pub consecutive_empty_raids_before: u32,
    pub defenders_on_mat: u8,
}

/// Rule-engine findings over one match's event stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub match_id: u32,
    pub violations: Vec<Violation>,
    pub checked_rules: Vec<String>,
    pub events_checked: usize,
}

impl ValidationReport {
    pub fn error_count(&self) -> usize {
        self.violations.iter().filter(|v| v.is_error()).count()
    }

    pub fn warning_count(&self) -> usize {
        self.violations.len() - self.error_count()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("event {event_no} references team {team_id}, not one of {team_1} or {team_2}")]
    UnknownTeam { event_no: u32, team_id: u32, team_1: u32, team_2: u32 },
    #[error("event {event_no} carries points but names no {side} team")]
    MissingTeam { event_no: u32, side: &'static str },
}

fn credit(
    score: &mut Score,
    team_id: u32,
    team_1: u32,
    team_2: u32,
    points: u32,
    event_no: u32,
) -> Result<(), ScoreError> {
    if team_id == team_1 {
        score.team_1_total += points;
        Ok(())
    } else if team_id == team_2 {
        score.team_2_total += points;
        Ok(())
    } else {
        Err(ScoreError::UnknownTeam { event_no, team_id, team_1, team_2 })
    }
}

/// Replays an event stream, adding raid points to the raiding team and
/// defending points to the defending team. Returns one running score per
/// event; non-scoring events pass the score through unchanged.
pub fn reconstruct_score(
    events: &[Event],
    initial: Score,
    team_1: u32,
    team_2: u32,
) -> Result<Vec<Score>, ScoreError> {
    let mut current = initial;
    let mut out = Vec::with_capacity(events.len());
    for event in events {
        if event.raid_points > 0 {
            let raiding = event
                .raiding_team_id
                .ok_or(ScoreError::MissingTeam { event_no: event.event_no, side: "raiding" })?;
            credit(&mut current, raiding, team_1, team_2, event.raid_points, event.event_no)?;
        } else if let Some(raiding) = event.raiding_team_id {
            // Zero points still validates the reference.
            if raiding != team_1 && raiding != team_2 {
                return Err(ScoreError::UnknownTeam {
                    event_no: event.event_no,
                    team_id: raiding,
                    team_1,
                    team_2,
                });
            }
        }
        if event.defending_points > 0 {
            let defending = event
                .defending_team_id
                .ok_or(ScoreError::MissingTeam { event_no: event.event_no, side: "defending" })?;
            credit(
                &mut current,
                defending,
                team_1,
                team_2,
                event.defending_points,
                event.event_no,
            )?;
        } else if let Some(defending) = event.defending_team_id {
            if defending != team_1 && defending != team_2 {
                return Err(ScoreError::UnknownTeam {
                    event_no: event.event_no,
                    team_id: defending,
                    team_1,
                    team_2,
                });
            }
        }
        out.push(current);
    }
    Ok(out)
}

fn at(event: &Event, match_id: u32) -> ViolationSource {
    ViolationSource::Event { match_id, event_no: event.event_no }
}

/// Component-sum checks shared by the loader and the engine.
pub fn point_sum_violations(event: &Event, match_id: u32) -> Vec<Violation> {
    let mut found = Vec::new();
    if event.raid_points != event.raid_component_sum() {
        found.push(Violation::error(
            at(event, match_id),
            codes::E_POINT_SUM,
            format!(
                "raid_points {} != touch {} + bonus {} + technical {} + all-out {}",
                event.raid_points,
                event.raid_touch_points,
                event.raid_bonus_points,
                event.raid_technical_points,
                event.raid_all_out_points
            ),
        ));
    }
    if event.defending_points != event.defending_component_sum() {
        found.push(Violation::error(
            at(event, match_id),
            codes::E_POINT_SUM,
            format!(
                "defending_points {} != capture {} + bonus {} + technical {} + all-out {}",
                event.defending_points,
                event.defending_capture_points,
                event.defending_bonus_points,
                event.defending_technical_points,
                event.defending_all_out_points
            ),
        ));
    }
    found
}

/// Applies the per-event laws. Raid-specific rules need the surrounding
/// `RaidContext`; card and component rules hold for any event kind.
pub fn check_event(
    event: &Event,
    ctx: &RaidContext,
    cfg: &RuleConfig,
    match_id: u32,
) -> Vec<Violation> {
    let mut found = point_sum_violations(event, match_id);

    // All-out components are worth exactly two points when present.
    for (label, component) in
        [("raid", event.raid_all_out_points), ("defending", event.defending_all_out_points)]
    {
        if component != 0 && component != 2 {
            found.push(Violation::error(
                at(event, match_id),
                codes::E_ALLOUT_TWO,
                format!("{label} all-out component is {component}, an all-out concedes two points"),
            ));
        }
    }

    match &event.kind {
        kind if kind.is_raid() => {
            let expect_dod = ctx.consecutive_empty_raids_before == 2;
            if event.do_or_die != expect_dod {
                found.push(Violation::error(
                    at(event, match_id),
                    codes::E_DOD_FLAG,
                    format!(
                        "do_or_die is {} after {} consecutive empty raids",
                        event.do_or_die, ctx.consecutive_empty_raids_before
                    ),
                ));
            }
            if event.do_or_die && event.raid_points == 0 && event.defending_points == 0 {
                found.push(Violation::error(
                    at(event, match_id),
                    codes::E_DOD_PENALTY,
                    "do-or-die raid scored nothing and conceded nothing",
                ));
            }
            if event.raid_bonus_points > 0 && ctx.defenders_on_mat < cfg.bonus_min_defenders {
                found.push(Violation::error(
                    at(event, match_id),
                    codes::E_BONUS_SIX,
                    format!(
                        "bonus point with {} defenders on the mat (minimum {})",
                        ctx.defenders_on_mat, cfg.bonus_min_defenders
                    ),
                ));
            }
            if event.super_tackle && ctx.defenders_on_mat > cfg.super_tackle_max_defenders {
                found.push(Violation::error(
                    at(event, match_id),
                    codes::E_SUPERTACKLE,
                    format!(
                        "super tackle with {} defenders on the mat (shorthanded is at most {})",
                        ctx.defenders_on_mat, cfg.super_tackle_max_defenders
                    ),
                ));
            }
            if *kind == EventKind::EmptyRaid && event.total_points() > 0 {
                found.push(Violation::error(
                    at(event, match_id),
                    codes::E_EMPTY_POINTS,
                    format!("empty raid carries {} points", event.total_points()),
                ));
            }
            if event.defending_bonus_points > 0 {
                found.push(Violation::warning(
                    at(event, match_id),
                    codes::W_DEF_BONUS,
                    format!(
                        "defending side credited {} bonus points; a bonus is a raider concept",
                        event.defending_bonus_points
                    ),
                ));
            }
        }
        EventKind::Card(color) => {
            let technical = event.raid_technical_points + event.defending_technical_points;
            let expected = match color {
                CardColor::Yellow | CardColor::Red => 1,
                CardColor::Green => 0,
            };
            if technical != expected || event.total_points() != expected {
                found.push(Violation::error(
                    at(event, match_id),
                    codes::E_CARD_TECH,
                    format!(
                        "{color} card grants {technical} technical points ({} total), expected {expected}",
                        event.total_points()
                    ),
                ));
            }
        }
        EventKind::Substitution | EventKind::Timeout
            if event.total_points() > 0 || event.raider_id.is_some() =>
        {
            found.push(Violation::error(
                at(event, match_id),
                codes::E_NONRAID_POINTS,
                format!("{} carries points or a raider", event.kind),
            ));
        }
        _ => {}
    }

    found
}

/// Walks a match's events deriving each raid's context: for each team, the
/// run of consecutive empty raids since its last non-empty raid. The count
/// carries across the half-time break.
fn raid_contexts(events: &[Event]) -> Vec<Option<RaidContext>> {
    let mut empties: std::collections::BTreeMap<u32, u32> = std::collections::BTreeMap::new();
    events
        .iter()
        .map(|event| {
            if !event.kind.is_raid() {
                return None;
            }
            let team = event.raiding_team_id?;
            let before = *empties.get(&team).unwrap_or(&0);
            if event.kind == EventKind::EmptyRaid {
                *empties.entry(team).or_insert(0) += 1;
            } else {
                empties.insert(team, 0);
            }
            Some(RaidContext {
                raiding_team_id: team,
                consecutive_empty_raids_before: before,
                defenders_on_mat: event.defenders,
            })
        })
        .collect()
}

/// Runs the full engine over a match: ordering checks, score reconstruction
/// against the recorded column, per-raid law checks and the final-score
/// cross-check. Total; findings come back as data.
pub fn validate_match(detail: &MatchDetail, cfg: &RuleConfig) -> ValidationReport {
    let match_id = detail.summary.match_id;
    let team_1 = detail.summary.team_1.team_id;
    let team_2 = detail.summary.team_2.team_id;
    let mut violations = Vec::new();

    // Ordering invariants.
    for pair in detail.events.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        if cur.event_no <= prev.event_no {
            violations.push(Violation::error(
                at(cur, match_id),
                codes::E_EVENTNO_ORDER,
                format!("event_no {} follows {}", cur.event_no, prev.event_no),
            ));
        }
        if cur.event_half == prev.event_half {
            if let (Some(a), Some(b)) = (prev.clock, cur.clock) {
                if b > a {
                    violations.push(Violation::error(
                        at(cur, match_id),
                        codes::E_CLOCK_ORDER,
                        format!("clock rose from {} to {} within half {}", a, b, cur.event_half),
                    ));
                }
            }
        }
    }

    // Score reconstruction against the recorded column.
    match reconstruct_score(&detail.events, Score::default(), team_1, team_2) {
        Ok(reconstructed) => {
            for (event, computed) in detail.events.iter().zip(&reconstructed) {
                if let Some(recorded) = event.score {
                    if recorded != *computed {
                        violations.push(Violation::error(
                            at(event, match_id),
                            codes::E_SCORE_TRACK,
                            format!(
                                "recorded score {recorded} but reconstruction gives {computed}"
                            ),
                        ));
                    }
                }
            }
            let summary_score =
                Score::new(detail.summary.team_1.score, detail.summary.team_2.score);
            let finished = reconstructed.last().copied().unwrap_or_default();
            if finished != summary_score {
                let last_no = detail.events.last().map(|e| e.event_no).unwrap_or(0);
                violations.push(Violation::error(
                    ViolationSource::Event { match_id, event_no: last_no },
                    codes::E_FINAL_SCORE,
                    format!("reconstruction ends at {finished}, summary says {summary_score}"),
                ));
            }
        }
        Err(err) => {
            let event_no = match err {
                ScoreError::UnknownTeam { event_no, .. }
                | ScoreError::MissingTeam { event_no, .. } => event_no,
            };
            violations.push(Violation::error(
                ViolationSource::Event { match_id, event_no },
                codes::E_TEAM_REF,
                err.to_string(),
            ));
        }
    }

    // Team references outside the summary's two sides.
    for event in &detail.events {
        for team in [event.raiding_team_id, event.defending_team_id].into_iter().flatten() {
            if team != team_1 && team != team_2 {
                violations.push(Violation::error(
                    at(event, match_id),
                    codes::E_TEAM_REF,
                    format!("team {team} is not one of {team_1} or {team_2}"),
                ));
            }
        }
    }

    // Per-event laws with derived raid contexts.
    let contexts = raid_contexts(&detail.events);
    let fallback = |event: &Event| RaidContext {
        raiding_team_id: event.raiding_team_id.unwrap_or(0),
        consecutive_empty_raids_before: 0,
        defenders_on_mat: event.defenders,
    };
    for (event, ctx) in detail.events.iter().zip(&contexts) {
        let ctx = ctx.unwrap_or_else(|| fallback(event));
        violations.extend(check_event(event, &ctx, cfg, match_id));
    }

    // Raid pacing: long raid-to-raid clock gaps within a half.
    let mut last_raid: Option<&Event> = None;
    for event in &detail.events {
        if !event.kind.is_raid() {
            continue;
        }
        if let Some(prev) = last_raid {
            if prev.event_half == event.event_half {
                if let (Some(a), Some(b)) = (prev.clock, event.clock) {
                    let gap = a.saturating_sub(b);
                    if gap > cfg.raid_gap_warning_seconds {
                        violations.push(Violation::warning(
                            at(event, match_id),
                            codes::W_RAID_30S,
                            format!("{gap}s since the previous raid; raids must finish within 30s"),
                        ));
                    }
                }
            }
        }
        last_raid = Some(event);
    }

    violations.sort_by(|a, b| a.source.cmp(&b.source).then_with(|| a.rule_id.cmp(&b.rule_id)));

    ValidationReport {
        match_id,
        violations,
        checked_rules: vec![
            codes::E_POINT_SUM.to_string(),
            codes::E_DOD_FLAG.to_string(),
            codes::E_DOD_PENALTY.to_string(),
            codes::E_ALLOUT_TWO.to_string(),
            codes::E_CARD_TECH.to_string(),
            codes::E_BONUS_SIX.to_string(),
            codes::E_SUPERTACKLE.to_string(),
            codes::E_EMPTY_POINTS.to_string(),
            codes::E_NONRAID_POINTS.to_string(),
            codes::E_SCORE_TRACK.to_string(),
            codes::E_FINAL_SCORE.to_string(),
            codes::E_CLOCK_ORDER.to_string(),
            codes::E_EVENTNO_ORDER.to_string(),
            codes::E_TEAM_REF.to_string(),
            codes::W_RAID_30S.to_string(),
            codes::W_DEF_BONUS.to_string(),
        ],
        events_checked: detail.events.len(),
    }
}
