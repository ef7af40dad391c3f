//! Synthetic data for testing and QA: generated matches that satisfy every
//! law, single-field mutations that break exactly one, and independent
//! brute-force oracles to check the statistics layer against.
//!
//! Generated matches always contain at least one bonus raid, one super
//! tackle, one all-out and one yellow card, so every mutation kind has a
//! target.

use chrono::NaiveDate;
use rand::rngs::StdRng;
use rand::Rng;

use crate::model::{
    CardColor, Event, EventKind, LeagueStage, MatchDetail, MatchSummary, Score, TeamRef,
};
use crate::stats::{GroupEntry, StandingsPolicy};

const TEAM_NAMES: [&str; 8] = [
    "Iron Raiders",
    "Mat Monarchs",
    "Coastal Chasers",
    "Desert Hawks",
    "River Rams",
    "Summit Sharks",
    "Valley Vipers",
    "Northern Nagas",
];

fn blank_event(event_no: u32, kind: EventKind, half: u8) -> Event {
    Event {
        event_no,
        kind,
        event_text: None,
        event_half: half,
        event_id: event_no as i64,
        raiding_team_id: None,
        defending_team_id: None,
        raider_id: None,
        defender_id: None,
        raid_points: 0,
        raid_touch_points: 0,
        raid_bonus_points: 0,
        raid_technical_points: 0,
        raid_all_out_points: 0,
        defending_points: 0,
        defending_capture_points: 0,
        defending_bonus_points: 0,
        defending_technical_points: 0,
        defending_all_out_points: 0,
        super_raid: false,
        super_tackle: false,
        do_or_die: false,
        super_ten: false,
        high_five: false,
        review: false,
        clock: None,
        status_id: 1,
        score: None,
        seq_no: event_no,
        defenders: 7,
        created_date: None,
        player_id: None,
        substituted_by: None,
        team_id: None,
        substitute_time: None,
    }
}

/// Generates one internally consistent match: alternating raids with the
/// do-or-die bookkeeping applied, a card, an all-out, a bonus raid and a
/// super tackle, recorded running scores and chronologically sane clocks.
pub fn generate_match(rng: &mut StdRng, season: u32, match_id: u32) -> MatchDetail {
    let team_1 = 101;
    let team_2 = 102;
    let raid_count: usize = rng.random_range(40..=56);
    let half_split = raid_count / 2;

    // Forced feature positions (raid indexes), pairwise distinct.
    let bonus_at = rng.random_range(2..half_split - 2);
    let super_tackle_at = rng.random_range(half_split..raid_count - 4);
    let allout_at = rng.random_range(super_tackle_at + 1..raid_count - 1);
    let card_after_raid = rng.random_range(3..raid_count - 3);

    let mut events: Vec<Event> = Vec::new();
    let mut score = Score::default();
    let mut empties = [0u32; 2]; // per raiding side
    let mut clock: i64 = 1200;
    let mut half = 1u8;
    let mut event_no = 0u32;
    let raiders = [[1001u32, 1002, 1003], [2001, 2002, 2003]];
    let defenders_pool = [[1501u32, 1502], [2501, 2502]];

    for raid_index in 0..raid_count {
        if raid_index == half_split {
            half = 2;
            clock = 1200;
        }
        clock -= rng.random_range(18..=30);
        if clock < 0 {
            clock = 0;
        }
        event_no += 1;

        let side = raid_index % 2; // 0 raids as team_1
        let raiding = if side == 0 { team_1 } else { team_2 };
        let defending = if side == 0 { team_2 } else { team_1 };
        let must_dod = empties[side] == 2;

        let forced_bonus = raid_index == bonus_at;
        let forced_super_tackle = raid_index == super_tackle_at;
        let forced_allout = raid_index == allout_at;

        let outcome = if forced_bonus || forced_allout {
            EventKind::SuccessfulRaid
        } else if forced_super_tackle {
            EventKind::UnsuccessfulRaid
        } else if must_dod {
            if rng.random_bool(0.5) {
                EventKind::SuccessfulRaid
            } else {
                EventKind::UnsuccessfulRaid
            }
        } else {
            match rng.random_range(0..10) {
                0..=3 => EventKind::EmptyRaid,
                4..=7 => EventKind::SuccessfulRaid,
                _ => EventKind::UnsuccessfulRaid,
            }
        };

        let mut e = blank_event(event_no, outcome.clone(), half);
        e.raiding_team_id = Some(raiding);
        e.defending_team_id = Some(defending);
        e.raider_id = Some(raiders[side][rng.random_range(0..3)]);
        e.clock = Some(clock as u32);
        e.do_or_die = must_dod;
        e.defenders = if forced_super_tackle {
            rng.random_range(1..=3)
        } else if forced_bonus {
            rng.random_range(6..=7)
        } else {
            rng.random_range(4..=7)
        };

        match outcome {
            EventKind::SuccessfulRaid => {
                e.raid_touch_points = rng.random_range(1..=2);
                if forced_bonus {
                    e.raid_bonus_points = 1;
                }
                if forced_allout {
                    e.raid_all_out_points = 2;
                }
                e.raid_points = e.raid_component_sum();
                e.super_raid = e.raid_touch_points + e.raid_bonus_points >= 3;
            }
            EventKind::UnsuccessfulRaid => {
                e.defending_capture_points = if forced_super_tackle { 2 } else { 1 };
                e.super_tackle = forced_super_tackle;
                e.defending_points = e.defending_component_sum();
                let pool = defenders_pool[1 - side];
                e.defender_id = Some(pool[rng.random_range(0..2)]);
            }
            EventKind::EmptyRaid => {}
            _ => unreachable!("raid outcomes only"),
        }

        if outcome == EventKind::EmptyRaid {
            empties[side] += 1;
        } else {
            empties[side] = 0;
        }

        if raiding == team_1 {
            score.team_1_total += e.raid_points;
            score.team_2_total += e.defending_points;
        } else {
            score.team_2_total += e.raid_points;
            score.team_1_total += e.defending_points;
        }
        e.event_text = Some(format!("{} by {}", e.kind, e.raider_id.unwrap()));
        e.score = Some(score);
        events.push(e);

        if raid_index == card_after_raid {
            event_no += 1;
            let offender = if rng.random_bool(0.5) { team_1 } else { team_2 };
            let beneficiary = if offender == team_1 { team_2 } else { team_1 };
            let mut card = blank_event(event_no, EventKind::Card(CardColor::Yellow), half);
            card.team_id = Some(offender);
            card.defending_team_id = Some(beneficiary);
            card.defending_technical_points = 1;
            card.defending_points = 1;
            card.clock = Some(clock as u32);
            if beneficiary == team_1 {
                score.team_1_total += 1;
            } else {
                score.team_2_total += 1;
            }
            card.event_text = Some(format!("Yellow card against team {offender}"));
            card.score = Some(score);
            events.push(card);
        }
        if raid_index == card_after_raid + 2 && rng.random_bool(0.4) {
            event_no += 1;
            let mut card = blank_event(event_no, EventKind::Card(CardColor::Green), half);
            card.team_id = Some(if rng.random_bool(0.5) { team_1 } else { team_2 });
            card.clock = Some(clock as u32);
            card.event_text = Some("Green card warning".into());
            card.score = Some(score);
            events.push(card);
        }
        if raid_index % 13 == 6 {
            event_no += 1;
            let side_team = if rng.random_bool(0.5) { team_1 } else { team_2 };
            let mut sub = blank_event(event_no, EventKind::Substitution, half);
            sub.team_id = Some(side_team);
            sub.player_id = Some(rng.random_range(3000..4000));
            sub.substituted_by = Some(rng.random_range(4000..5000));
            sub.substitute_time = Some(clock as u32);
            sub.clock = Some(clock as u32);
            sub.event_text = Some("Substitution".into());
            events.push(sub);
        }
    }

    // Milestone flags on the events where a player crosses the threshold.
    let mut raid_totals: std::collections::BTreeMap<u32, u32> = Default::default();
    let mut tackle_totals: std::collections::BTreeMap<u32, u32> = Default::default();
    for e in events.iter_mut() {
        if e.kind.is_raid() {
            if let Some(raider) = e.raider_id {
                let total = raid_totals.entry(raider).or_insert(0);
                let before = *total;
                *total += e.raid_points;
                if before < 10 && *total >= 10 {
                    e.super_ten = true;
                }
            }
        }
        if let Some(defender) = e.defender_id {
            let total = tackle_totals.entry(defender).or_insert(0);
            let before = *total;
            *total += e.defending_capture_points;
            if before < 5 && *total >= 5 {
                e.high_five = true;
            }
        }
    }

    let date = NaiveDate::from_ymd_opt(2023, 1, 1 + (match_id % 27)).unwrap();
    let winner =
        if score.team_1_total >= score.team_2_total { TEAM_NAMES[0] } else { TEAM_NAMES[1] };
    let summary = MatchSummary {
        season,
        match_id,
        match_name: format!("Match {match_id}"),
        league_stage: LeagueStage::League,
        year: 2023,
        venue: "Synthetic Arena".into(),
        start_date: date,
        end_date: date,
        team_1: TeamRef {
            team_id: team_1,
            team_name: TEAM_NAMES[0].into(),
            score: score.team_1_total,
        },
        team_2: TeamRef {
            team_id: team_2,
            team_name: TEAM_NAMES[1].into(),
            score: score.team_2_total,
        },
        match_outcome: format!("{winner} won"),
        winning_margin: score.team_1_total.abs_diff(score.team_2_total),
        result: format!(
            "{} {} - {} {}",
            TEAM_NAMES[0], score.team_1_total, score.team_2_total, TEAM_NAMES[1]
        ),
    };
    MatchDetail { summary, events }
}

/// The eight single-field corruptions the rule engine must catch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mutation {
    FlipDoOrDie,
    BreakAllOutComponent,
    CardWithoutTechnical,
    BonusWithFewDefenders,
    SuperTackleWithManyDefenders,
    EmptyRaidWithPoints,
    PerturbScore,
    BreakComponentSum,
}

impl Mutation {
    pub const ALL: [Mutation; 8] = [
        Mutation::FlipDoOrDie,
        Mutation::BreakAllOutComponent,
        Mutation::CardWithoutTechnical,
        Mutation::BonusWithFewDefenders,
        Mutation::SuperTackleWithManyDefenders,
        Mutation::EmptyRaidWithPoints,
        Mutation::PerturbScore,
        Mutation::BreakComponentSum,
    ];
}

impl std::fmt::Display for Mutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Mutation::FlipDoOrDie => "flip do-or-die flag",
            Mutation::BreakAllOutComponent => "all-out component != 2",
            Mutation::CardWithoutTechnical => "card without technical point",
            Mutation::BonusWithFewDefenders => "bonus with < 6 defenders",
            Mutation::SuperTackleWithManyDefenders => "super tackle with > 3 defenders",
            Mutation::EmptyRaidWithPoints => "empty raid with points",
            Mutation::PerturbScore => "score pair perturbation",
            Mutation::BreakComponentSum => "component sum break",
        };
        f.write_str(name)
    }
}

fn pick<'a>(
    rng: &mut StdRng,
    candidates: &[usize],
    events: &'a mut [Event],
) -> Option<&'a mut Event> {
    if candidates.is_empty() {
        return None;
    }
    let index = candidates[rng.random_range(0..candidates.len())];
    Some(&mut events[index])
}

/// Applies one mutation to a copy of the match, choosing an applicable
/// target event at random. `None` when the match offers no target, which
/// the generator's forced features make impossible for its own output.
pub fn apply_mutation(
    detail: &MatchDetail,
    mutation: Mutation,
    rng: &mut StdRng,
) -> Option<MatchDetail> {
    let mut mutated = detail.clone();
    let events = &mut mutated.events;
    let indexes = |pred: &dyn Fn(&Event) -> bool| -> Vec<usize> {
        events.iter().enumerate().filter(|(_, e)| pred(e)).map(|(i, _)| i).collect()
    };
    match mutation {
        Mutation::FlipDoOrDie => {
            let candidates = indexes(&|e| e.kind.is_raid());
            let e = pick(rng, &candidates, events)?;
            e.do_or_die = !e.do_or_die;
        }
        Mutation::BreakAllOutComponent => {
            let candidates = indexes(&|e| e.raid_all_out_points == 2);
            let e = pick(rng, &candidates, events)?;
            e.raid_all_out_points = 1;
        }
        Mutation::CardWithoutTechnical => {
            let candidates =
                indexes(&|e| matches!(e.kind, EventKind::Card(CardColor::Yellow | CardColor::Red)));
            let e = pick(rng, &candidates, events)?;
            e.raid_technical_points = 0;
            e.defending_technical_points = 0;
            e.raid_points = 0;
            e.defending_points = 0;
        }
        Mutation::BonusWithFewDefenders => {
            let candidates = indexes(&|e| e.raid_bonus_points > 0);
            let e = pick(rng, &candidates, events)?;
            e.defenders = 5;
        }
        Mutation::SuperTackleWithManyDefenders => {
            let candidates = indexes(&|e| e.super_tackle);
            let e = pick(rng, &candidates, events)?;
            e.defenders = rng.random_range(4..=7);
        }
        Mutation::EmptyRaidWithPoints => {
            let candidates = indexes(&|e| e.kind == EventKind::EmptyRaid);
            let e = pick(rng, &candidates, events)?;
            e.raid_points = 1;
        }
        Mutation::PerturbScore => {
            let candidates = indexes(&|e| e.score.is_some());
            let e = pick(rng, &candidates, events)?;
            let mut s = e.score.unwrap();
            s.team_1_total += 1;
            e.score = Some(s);
        }
        Mutation::BreakComponentSum => {
            let candidates = indexes(&|e| e.raid_points > 0);
            let e = pick(rng, &candidates, events)?;
            e.raid_touch_points += 1;
        }
    }
    Some(mutated)
}

/// A random season of results for standings trials: up to eight teams in
/// one or two groups, matches only between group-mates.
pub fn generate_season(rng: &mut StdRng, season: u32) -> (Vec<MatchSummary>, Vec<GroupEntry>) {
    let n_teams = rng.random_range(2..=8);
    let two_groups = n_teams >= 4 && rng.random_bool(0.4);
    let teams: Vec<GroupEntry> = (0..n_teams)
        .map(|i| GroupEntry {
            team_id: i as u32 + 1,
            team_name: TEAM_NAMES[i].to_string(),
            group: if two_groups && i >= n_teams / 2 { "B".into() } else { "A".into() },
        })
        .collect();

    let n_matches = rng.random_range(0..=100);
    let mut matches = Vec::new();
    let mut attempts = 0;
    while matches.len() < n_matches && attempts < n_matches * 4 {
        attempts += 1;
        let a = rng.random_range(0..n_teams);
        let b = rng.random_range(0..n_teams);
        if a == b || teams[a].group != teams[b].group {
            continue;
        }
        let match_id = matches.len() as u32 + 1;
        let score_a = rng.random_range(12..=48);
        let score_b = rng.random_range(12..=48);
        let date = NaiveDate::from_ymd_opt(2023, 1 + (match_id % 12), 1 + (match_id % 27)).unwrap();
        matches.push(MatchSummary {
            season,
            match_id,
            match_name: format!("Match {match_id}"),
            league_stage: LeagueStage::League,
            year: 2023,
            venue: "Synthetic Arena".into(),
            start_date: date,
            end_date: date,
            team_1: TeamRef {
                team_id: teams[a].team_id,
                team_name: teams[a].team_name.clone(),
                score: score_a,
            },
            team_2: TeamRef {
                team_id: teams[b].team_id,
                team_name: teams[b].team_name.clone(),
                score: score_b,
            },
            match_outcome: String::new(),
            winning_margin: score_a.abs_diff(score_b),
            result: String::new(),
        });
    }
    (matches, teams)
}

pub mod oracle {
    //! Independent brute-force recounts used only to check the statistics
    //! layer. Deliberately simple: per-team rescans of the full match list
    //! and plain counting, no shared code with `stats`.

    use std::collections::BTreeMap;

    use crate::model::{Event, EventKind, MatchSummary, Standing};
    use crate::stats::{GroupEntry, StandingsPolicy, Tiebreak};

    fn points_for(policy: &StandingsPolicy, scored: u32, conceded: u32) -> u32 {
        if scored > conceded {
            policy.points_win
        } else if scored == conceded {
            policy.points_tie
        } else if conceded - scored <= policy.narrow_loss_margin {
            policy.points_loss + policy.narrow_loss_points
        } else {
            policy.points_loss
        }
    }

    /// Recounts every standings column team by team, then orders each group
    /// with an index-based selection of the best remaining row.
    pub fn brute_force_standings(
        season: u32,
        matches: &[MatchSummary],
        teams: &[GroupEntry],
        policy: &StandingsPolicy,
    ) -> Vec<Standing> {
        let mut rows: Vec<Standing> = Vec::new();
        let mut totals: BTreeMap<u32, u64> = BTreeMap::new();
        for team in teams {
            let mut wins = 0;
            let mut lost = 0;
            let mut tied = 0;
            let mut played = 0;
            let mut points = 0;
            let mut scored: i64 = 0;
            let mut conceded: i64 = 0;
            for m in matches {
                let (s, c) = if m.team_1.team_id == team.team_id {
                    (m.team_1.score, m.team_2.score)
                } else if m.team_2.team_id == team.team_id {
                    (m.team_2.score, m.team_1.score)
                } else {
                    continue;
                };
                played += 1;
                scored += s as i64;
                conceded += c as i64;
                points += points_for(policy, s, c);
                if s > c {
                    wins += 1;
                } else if s == c {
                    tied += 1;
                } else {
                    lost += 1;
                }
            }
            totals.insert(team.team_id, scored as u64);
            rows.push(Standing {
                group: team.group.clone(),
                season,
                team_id: team.team_id,
                team_name: team.team_name.clone(),
                league_position: 0,
                matches_played: played,
                wins,
                lost,
                tied,
                draws: 0,
                no_result: 0,
                league_points: points,
                score_diff: scored - conceded,
                qualified: false,
            });
        }

        let h2h = |a: u32, b: u32| -> u32 {
            matches
                .iter()
                .filter(|m| {
                    (m.team_1.team_id == a && m.team_2.team_id == b)
                        || (m.team_1.team_id == b && m.team_2.team_id == a)
                })
                .map(|m| {
                    let (s, c) = if m.team_1.team_id == a {
                        (m.team_1.score, m.team_2.score)
                    } else {
                        (m.team_2.score, m.team_1.score)
                    };
                    points_for(policy, s, c)
                })
                .sum()
        };

        // Selection sort per group: repeatedly pull the best remaining row.
        let better = |a: &Standing, b: &Standing| -> bool {
            for key in &policy.tiebreak_order {
                let ord = match key {
                    Tiebreak::LeaguePoints => a.league_points.cmp(&b.league_points),
                    Tiebreak::ScoreDiff => a.score_diff.cmp(&b.score_diff),
                    Tiebreak::TotalScore => totals[&a.team_id].cmp(&totals[&b.team_id]),
                    Tiebreak::HeadToHead => {
                        h2h(a.team_id, b.team_id).cmp(&h2h(b.team_id, a.team_id))
                    }
                };
                match ord {
                    std::cmp::Ordering::Greater => return true,
                    std::cmp::Ordering::Less => return false,
                    std::cmp::Ordering::Equal => {}
                }
            }
            a.team_id < b.team_id
        };

        let mut groups: Vec<String> = rows.iter().map(|r| r.group.clone()).collect();
        groups.sort();
        groups.dedup();
        let mut ordered = Vec::new();
        for group in groups {
            let mut members: Vec<Standing> =
                rows.iter().filter(|r| r.group == group).cloned().collect();
            let mut position = 0;
            while !members.is_empty() {
                let mut best = 0;
                for i in 1..members.len() {
                    if better(&members[i], &members[best]) {
                        best = i;
                    }
                }
                let mut row = members.remove(best);
                position += 1;
                row.league_position = position;
                row.qualified = position <= policy.qualifiers_per_group;
                ordered.push(row);
            }
        }
        ordered
    }

    /// Plain per-bucket hand count of a raider's events, the oracle for
    /// `derive_rvd`.
    pub fn hand_count_rvd(events: &[&Event]) -> BTreeMap<u8, (u32, u32, u32)> {
        let mut buckets: BTreeMap<u8, (u32, u32, u32)> = BTreeMap::new();
        for e in events {
            if !e.kind.is_raid() || e.defenders == 0 {
                continue;
            }
            let entry = buckets.entry(e.defenders).or_insert((0, 0, 0));
            entry.0 += 1;
            if e.kind == EventKind::EmptyRaid {
                entry.1 += 1;
            }
            if e.kind == EventKind::SuccessfulRaid {
                entry.2 += 1;
            }
        }
        buckets
    }
}

/// Default policy used by the synthetic-season trials.
pub fn default_policy() -> StandingsPolicy {
    StandingsPolicy::default()
}
