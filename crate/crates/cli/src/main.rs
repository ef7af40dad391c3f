//! `kabaddi`: query, validate and render the local fixture corpus, and keep
//! it in sync with a remote mirror.
//!
//! Exit codes: 0 success, 1 usage or io error, 2 requested data unavailable,
//! 3 validation errors found.

mod output;
mod sync;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use kabaddi_core::ingest::{build_store, count_by_severity, DataStore};
use kabaddi_core::model::{LeagueStage, ZoneType};
use kabaddi_core::query::{self, MatchFilter, QueryError};
use kabaddi_core::rules::RuleConfig;
use kabaddi_core::stats;
use kabaddi_core::viz::{self, RenderOptions, ZonePanel};

use output::{print_table, EventBrief, MetricLine};

#[derive(Parser)]
#[command(name = "kabaddi", version, about = "Pro Kabaddi League data toolkit")]
struct Cli {
    /// Fixture directory holding manifest.json.
    #[arg(long, global = true, env = "KABADDI_DATA_DIR", default_value = "./data")]
    data_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Args)]
struct FormatArg {
    /// Output format for tables.
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// List a season's matches, optionally filtered.
    Matches {
        #[arg(long)]
        season: u32,
        /// League stage, e.g. "League" or "Semi Final".
        #[arg(long)]
        stage: Option<String>,
        /// Team name, matched through the alias table, either side.
        #[arg(long)]
        team: Option<String>,
        #[arg(long)]
        team_id: Option<u32>,
        /// Earliest start date (inclusive, ISO-8601).
        #[arg(long)]
        from: Option<NaiveDate>,
        /// Latest start date (inclusive, ISO-8601).
        #[arg(long)]
        to: Option<NaiveDate>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Print a match's play-by-play.
    Events {
        #[arg(long)]
        season: u32,
        #[arg(long)]
        match_id: u32,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Print a season table.
    Standings {
        #[arg(long)]
        season: u32,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Print a team's metric values, ranks, per-match rates and skills.
    TeamInfo {
        #[arg(long)]
        season: u32,
        #[arg(long)]
        team_id: u32,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Print a team's season roster.
    Roster {
        #[arg(long)]
        season: u32,
        #[arg(long)]
        team_id: u32,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Print a player's raider-vs-defenders table.
    Rvd {
        #[arg(long)]
        player_id: u32,
        #[arg(long)]
        season: Option<u32>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Run the rule engine over one match or a whole season.
    Validate {
        #[arg(long)]
        season: u32,
        #[arg(long)]
        match_id: Option<u32>,
    },
    /// Render SVG figures.
    #[command(subcommand)]
    Plot(PlotCommand),
    /// Refresh the data directory from a remote mirror.
    Sync {
        #[arg(long)]
        base_url: String,
        /// Report drift without writing anything.
        #[arg(long)]
        verify_only: bool,
        #[arg(long, default_value_t = 4)]
        max_parallel: usize,
    },
}

#[derive(Subcommand)]
enum PlotCommand {
    /// Cumulative score lines for one match.
    PointProgression {
        #[arg(long)]
        season: u32,
        #[arg(long)]
        match_id: u32,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 500)]
        height: u32,
    },
    /// A team's strong or weak zones on the court schematic.
    TeamZones {
        #[arg(long)]
        team_id: u32,
        #[arg(long)]
        season: u32,
        #[arg(long, value_parser = parse_zone_type)]
        zone_type: ZoneType,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// A grid of per-player zone heatmaps.
    PlayerZones {
        /// Comma-separated player ids.
        #[arg(long, value_delimiter = ',')]
        player_ids: Vec<u32>,
        #[arg(long)]
        season: u32,
        #[arg(long, value_parser = parse_zone_type)]
        zone_type: ZoneType,
        #[arg(long, default_value_t = 2)]
        max_cols: u32,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn parse_zone_type(text: &str) -> Result<ZoneType, String> {
    ZoneType::parse(text).ok_or_else(|| format!("{text:?} is not 'strong' or 'weak'"))
}

enum CliError {
    Unavailable(String),
    Usage(String),
    Io(String),
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::DataUnavailable(m) => CliError::Unavailable(m),
            QueryError::InvalidFilter(m) => CliError::Usage(m),
        }
    }
}

impl From<viz::VizError> for CliError {
    fn from(e: viz::VizError) -> Self {
        CliError::Unavailable(e.to_string())
    }
}

fn load_store(data_dir: &Path) -> Result<DataStore, CliError> {
    let (store, violations) =
        build_store(data_dir).map_err(|e| CliError::Unavailable(e.to_string()))?;
    let (errors, warnings) = count_by_severity(&violations);
    if errors + warnings > 0 {
        eprintln!("data directory loaded with {errors} errors, {warnings} warnings");
        for v in &violations {
            eprintln!("  {v}");
        }
    }
    Ok(store)
}

fn emit<T: viz::Tabular + serde::Serialize>(rows: &[T], format: Format) -> Result<(), CliError> {
    match format {
        Format::Table => print_table(rows),
        Format::Csv => {
            let bytes = viz::export_csv(rows);
            print!("{}", String::from_utf8(bytes).expect("csv is utf-8"));
        }
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(rows).expect("rows serialize"));
        }
    }
    Ok(())
}

fn write_svg(path: &PathBuf, svg: &str) -> Result<(), CliError> {
    std::fs::write(path, svg).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Matches { season, stage, team, team_id, from, to, format } => {
            let store = load_store(&cli.data_dir)?;
            let filter = MatchFilter {
                stage: stage.map(|s| LeagueStage::parse(&s)),
                team_id,
                team_name: team,
                date_from: from,
                date_to: to,
            };
            let rows = query::get_season_matches(&store, season, Some(&filter))?;
            emit(&rows, format.format)?;
            Ok(0)
        }
        Command::Events { season, match_id, format } => {
            let store = load_store(&cli.data_dir)?;
            let detail = query::get_match_events(&store, season, match_id)?;
            match format.format {
                Format::Table => {
                    let brief: Vec<EventBrief> =
                        detail.events.iter().map(EventBrief::from).collect();
                    print_table(&brief);
                }
                other => emit(&detail.events, other)?,
            }
            Ok(0)
        }
        Command::Standings { season, format } => {
            let store = load_store(&cli.data_dir)?;
            let rows = query::get_standings(&store, season)?;
            emit(&rows, format.format)?;
            Ok(0)
        }
        Command::TeamInfo { season, team_id, format } => {
            let store = load_store(&cli.data_dir)?;
            let info = query::get_team_info(&store, season, team_id)?;
            match format.format {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&info).expect("serializes"));
                }
                other => {
                    println!(
                        "season {}  team {} ({})  matches_played {}",
                        info.season, info.team_name, info.team_id, info.matches_played
                    );
                    let lines = MetricLine::from_info(&info);
                    match other {
                        Format::Csv => {
                            print!("{}", String::from_utf8(viz::export_csv(&lines)).unwrap());
                        }
                        _ => {
                            print_table(&lines);
                            println!();
                            println!("raider skills:");
                            print_table(&info.raider_skills);
                            println!();
                            println!("defender skills:");
                            print_table(&info.defender_skills);
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::Roster { season, team_id, format } => {
            let store = load_store(&cli.data_dir)?;
            let rows = query::get_team_roster(&store, team_id, season)?;
            emit(&rows, format.format)?;
            Ok(0)
        }
        Command::Rvd { player_id, season, format } => {
            let store = load_store(&cli.data_dir)?;
            let rows = query::get_player_rvd(&store, player_id, season)?;
            emit(&rows, format.format)?;
            Ok(0)
        }
        Command::Validate { season, match_id } => {
            let store = load_store(&cli.data_dir)?;
            let matches = match match_id {
                Some(id) => vec![query::get_match_events(&store, season, id)?],
                None => {
                    let summaries = query::get_season_matches(&store, season, None)?;
                    summaries
                        .iter()
                        .filter_map(|m| query::get_match_events(&store, season, m.match_id).ok())
                        .collect()
                }
            };
            if matches.is_empty() {
                return Err(CliError::Unavailable(format!(
                    "no match breakdowns to validate for season {season}"
                )));
            }
            let cfg = RuleConfig::default();
            let mut total_errors = 0;
            for detail in &matches {
                let report = stats::full_validation(detail, &cfg);
                let errors = report.error_count();
                let warnings = report.warning_count();
                total_errors += errors;
                println!(
                    "match {}: {} errors, {} warnings ({} events, {} rules checked)",
                    report.match_id,
                    errors,
                    warnings,
                    report.events_checked,
                    report.checked_rules.len()
                );
                for v in &report.violations {
                    println!("  {v}");
                }
            }
            Ok(if total_errors > 0 { 3 } else { 0 })
        }
        Command::Plot(plot) => run_plot(&cli.data_dir, plot),
        Command::Sync { base_url, verify_only, max_parallel } => {
            let summary = sync::run_sync(&sync::SyncOptions {
                base_url,
                data_dir: cli.data_dir.clone(),
                verify_only,
                max_parallel,
            })
            .map_err(|e| CliError::Io(e.to_string()))?;
            println!(
                "downloaded {} skipped {} verified {} failed {}",
                summary.downloaded, summary.skipped, summary.verified, summary.failed
            );
            Ok(if summary.failed > 0 { 1 } else { 0 })
        }
    }
}

fn run_plot(data_dir: &Path, plot: PlotCommand) -> Result<u8, CliError> {
    let store = load_store(data_dir)?;
    match plot {
        PlotCommand::PointProgression { season, match_id, out, width, height } => {
            let detail = query::get_match_events(&store, season, match_id)?;
            let series = stats::compute_point_progression(&detail)
                .map_err(|e| CliError::Unavailable(e.to_string()))?;
            let opts = RenderOptions { width, height, ..RenderOptions::default() };
            let svg = viz::render_point_progression(
                &series,
                (&detail.summary.team_1.team_name, &detail.summary.team_2.team_name),
                &opts,
            )?;
            write_svg(&out, &svg)?;
            Ok(0)
        }
        PlotCommand::TeamZones { team_id, season, zone_type, out } => {
            let records = query::get_team_zones(&store, season, team_id, zone_type)?;
            let svg = viz::render_zone_heatmap(&records, zone_type, &RenderOptions::default())?;
            write_svg(&out, &svg)?;
            Ok(0)
        }
        PlotCommand::PlayerZones { player_ids, season, zone_type, max_cols, out } => {
            if player_ids.is_empty() {
                return Err(CliError::Usage("--player-ids needs at least one id".into()));
            }
            let panels: Vec<ZonePanel> = player_ids
                .iter()
                .map(|&pid| {
                    let records =
                        query::get_player_zones(&store, season, pid, zone_type).unwrap_or_default();
                    ZonePanel { title: format!("Player {pid}"), records }
                })
                .collect();
            if panels.iter().all(|p| p.records.is_empty()) {
                return Err(CliError::Unavailable(format!(
                    "no {zone_type} zone data for any requested player in season {season}"
                )));
            }
            let opts = RenderOptions { max_cols, ..RenderOptions::default() };
            let svg = viz::render_zone_grid(&panels, zone_type, &opts)?;
            write_svg(&out, &svg)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when the output pipe closes (e.g. `kabaddi events | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit 2 on usage errors; this tool reserves 2 for
            // missing data, so usage problems map to 1.
            let _ = e.print();
            let code = if e.exit_code() == 0 { 0 } else { 1 };
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Unavailable(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Io(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
