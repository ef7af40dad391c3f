//! Command-line contract: output shapes, format switches, exit codes and
//! stdout determinism.

mod common;

use std::process::{Command, Output};

use common::corpus_dir;

fn kabaddi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kabaddi"))
        .arg("--data-dir")
        .arg(corpus_dir())
        .args(args)
        .output()
        .expect("run kabaddi")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn matches_filter_prints_the_semifinal_row() {
    let out =
        kabaddi(&["matches", "--season", "10", "--stage", "Semi Final", "--team", "Puneri Paltan"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let data_lines: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(data_lines.len(), 1);
    for needle in ["3163", "37", "21", "16", "Puneri Paltan", "Patna Pirates"] {
        assert!(data_lines[0].contains(needle), "missing {needle} in {}", data_lines[0]);
    }
}

#[test]
fn unknown_season_exits_two_with_message() {
    let out = kabaddi(&["standings", "--season", "99"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("99"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn validate_reports_zero_errors_for_the_shipped_match() {
    let out = kabaddi(&["validate", "--season", "10", "--match-id", "3163"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 errors"), "{}", stdout(&out));
}

#[test]
fn usage_errors_exit_one() {
    let out = kabaddi(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    let out = kabaddi(&["matches"]); // --season is required
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn stdout_is_deterministic_across_runs() {
    for args in [
        vec!["matches", "--season", "10"],
        vec!["events", "--season", "10", "--match-id", "3163"],
        vec!["standings", "--season", "5"],
        vec!["team-info", "--season", "5", "--team-id", "4"],
        vec!["rvd", "--player-id", "143", "--format", "csv"],
    ] {
        let a = kabaddi(&args);
        let b = kabaddi(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn csv_format_is_rfc4180() {
    let out = kabaddi(&["matches", "--season", "10", "--format", "csv"]);
    let text = stdout(&out);
    assert!(text.contains("\r\n"));
    assert!(text.starts_with("season,match_id,"));
    // The venue field contains a comma and must arrive quoted.
    assert!(text.contains("\"Shree Shiv Chhatrapati Sports Complex, Pune\""));
}

#[test]
fn json_format_parses_and_carries_all_event_columns() {
    let out = kabaddi(&["events", "--season", "10", "--match-id", "3163", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 82);
    let first = rows[0].as_object().unwrap();
    for key in ["event_no", "event", "raid_points", "defenders", "score", "clock"] {
        assert!(first.contains_key(key), "missing {key}");
    }
}

#[test]
fn events_table_shows_the_printed_columns() {
    let out = kabaddi(&["events", "--season", "10", "--match-id", "3163"]);
    let text = stdout(&out);
    let header = text.lines().next().unwrap();
    for column in ["event_no", "event", "event_text", "clock", "raider_id", "defender_id", "score"]
    {
        assert!(header.contains(column));
    }
    assert!(text.contains("Sudhakar M unsuccessful raid"));
    assert!(text.contains("[13, 9]"));
}

#[test]
fn plot_commands_write_svg_files() {
    let tmp = tempfile::tempdir().unwrap();
    let pp = tmp.path().join("pp.svg");
    let out = kabaddi(&[
        "plot",
        "point-progression",
        "--season",
        "10",
        "--match-id",
        "3163",
        "-o",
        pp.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&pp).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 2);

    let tz = tmp.path().join("tz.svg");
    let out = kabaddi(&[
        "plot",
        "team-zones",
        "--team-id",
        "4",
        "--season",
        "5",
        "--zone-type",
        "strong",
        "-o",
        tz.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&tz).unwrap().contains("Midline Centre"));

    let grid = tmp.path().join("grid.svg");
    let out = kabaddi(&[
        "plot",
        "player-zones",
        "--player-ids",
        "143,12,211,160",
        "--season",
        "5",
        "--zone-type",
        "strong",
        "--max-cols",
        "2",
        "-o",
        grid.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&grid).unwrap().matches("<g transform=").count(), 4);
}

#[test]
fn validation_errors_exit_three() {
    // Copy the corpus and perturb one recorded score in the event stream.
    let tmp = tempfile::tempdir().unwrap();
    let dest = tmp.path().join("data");
    copy_dir(&corpus_dir(), &dest);
    let events_path = dest.join("season_10/events/match_3163.json");
    let mut events: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&events_path).unwrap()).unwrap();
    let target = events.as_array_mut().unwrap().iter_mut().find(|e| e["event_no"] == 25).unwrap();
    target["score"][0] = serde_json::json!(11);
    std::fs::write(&events_path, serde_json::to_vec_pretty(&events).unwrap()).unwrap();

    let out = Command::new(env!("CARGO_BIN_EXE_kabaddi"))
        .arg("--data-dir")
        .arg(&dest)
        .args(["validate", "--season", "10", "--match-id", "3163"])
        .output()
        .expect("run kabaddi");
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("E-SCORE-TRACK"), "{text}");
    assert!(text.contains("1 errors"), "{text}");
}

fn copy_dir(src: &std::path::Path, dest: &std::path::Path) {
    std::fs::create_dir_all(dest).unwrap();
    for entry in std::fs::read_dir(src).unwrap() {
        let entry = entry.unwrap();
        let target = dest.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), &target).unwrap();
        }
    }
}

#[test]
fn data_dir_env_var_selects_the_corpus() {
    let out = Command::new(env!("CARGO_BIN_EXE_kabaddi"))
        .env("KABADDI_DATA_DIR", corpus_dir())
        .args(["standings", "--season", "5"])
        .output()
        .expect("run kabaddi");
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Bengal Warriorz"));
}

#[test]
fn roster_and_rvd_print_expected_shapes() {
    let out = kabaddi(&["roster", "--season", "5", "--team-id", "4"]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2 + 17, "{text}");
    assert!(text.contains("Maninder Singh"));

    let out = kabaddi(&["rvd", "--player-id", "143"]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2 + 22);
    assert!(text.contains("40.00"));
}
