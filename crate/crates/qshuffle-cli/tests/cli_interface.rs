//! Exit-code contract and output-schema checks for the `qshuffle` binary.

use std::process::{Command, Output};

use serde::{Deserialize, Serialize};

fn qshuffle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qshuffle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

/// The documented report schema; unknown fields are a contract break.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct ReportRow {
    name: String,
    #[serde(rename = "N")]
    depth: Option<usize>,
    #[serde(rename = "T")]
    order: usize,
    holds: bool,
    first_mismatch: Option<MismatchRow>,
    runtime_ms: u64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct MismatchRow {
    exponent: usize,
    lhs: String,
    rhs: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct SimulationRow {
    p_hat: f64,
    stderr: f64,
    exact: Option<f64>,
    z_score: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableRow {
    shuffle: String,
    probability: qshuffle::TruncatedSeries,
}

#[test]
fn passing_check_exits_zero_with_schema_conformant_json() {
    let output = qshuffle(&["check-pnt", "--T", "100"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let reports: Vec<ReportRow> = serde_json::from_str(&text).expect("documented schema");
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].name, "pentagonal-number-theorem");
    assert_eq!(reports[0].order, 100);
    assert!(reports[0].holds);
    assert_eq!(reports[0].depth, None);
    // round trip: re-serializing loses nothing the tool emitted
    let reparsed: serde_json::Value =
        serde_json::from_str(&serde_json::to_string(&reports).unwrap()).unwrap();
    let original: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(reparsed, original);
}

#[test]
fn induction_checks_cover_every_depth() {
    let output = qshuffle(&["check-induction", "--N-max", "3", "--T", "60"]);
    assert!(output.status.success());
    let reports: Vec<ReportRow> = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(reports.len(), 4);
    assert!(reports.iter().all(|r| r.holds && r.name == "prob-induction"));
    assert_eq!(
        reports.iter().map(|r| r.depth.unwrap()).collect::<Vec<_>>(),
        vec![0, 1, 2, 3]
    );
}

#[test]
fn euler_check_reports_both_comparisons() {
    let output = qshuffle(&["check-euler", "--N-max", "2", "--T", "60"]);
    assert!(output.status.success());
    let reports: Vec<ReportRow> = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(reports.len(), 6);
    assert!(reports.iter().all(|r| r.holds));
    assert!(reports.iter().any(|r| r.name == "euler-induction"));
    assert!(reports.iter().any(|r| r.name == "euler-vs-prob-induction"));
}

#[test]
fn zero_order_is_a_usage_error() {
    let output = qshuffle(&["check-pnt", "--T", "0"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("positive"));
}

#[test]
fn unknown_arguments_exit_two() {
    assert_eq!(qshuffle(&["check-pnt", "--bogus"]).status.code(), Some(2));
    assert_eq!(qshuffle(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    assert!(qshuffle(&["--help"]).status.success());
}

#[test]
fn enumerate_csv_matches_hand_expanded_table() {
    let output = qshuffle(&["enumerate", "--K", "2", "--format", "csv"]);
    assert!(output.status.success());
    let expected = "\
shuffle,probability
\"(0,1,2)\",1 - 2*q + q^2 + O(q^4)
\"(0,2,1)\",q - 2*q^2 + q^3 + O(q^4)
\"(1,0,2)\",q - q^2 + O(q^4)
\"(1,2,0)\",q^2 - q^3 + O(q^4)
\"(2,0,1)\",q^2 - q^3 + O(q^4)
\"(2,1,0)\",q^3 + O(q^4)
";
    assert_eq!(stdout_of(&output), expected);
}

#[test]
fn enumerate_json_round_trips_series_schema() {
    let output = qshuffle(&["enumerate", "--K", "2"]);
    assert!(output.status.success());
    let rows: Vec<TableRow> = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0].shuffle, "(0,1,2)");
    assert_eq!(rows[0].probability.order(), 4);
    assert_eq!(
        rows[0].probability,
        qshuffle::TruncatedSeries::from_i64_coeffs(&[1, -2, 1, 0])
    );
}

#[test]
fn enumerate_restricted_to_a_pattern_lists_the_event_set() {
    let output = qshuffle(&["enumerate", "--K", "3", "--I", "3", "--J", "2"]);
    assert!(output.status.success());
    let rows: Vec<TableRow> = serde_json::from_str(&stdout_of(&output)).unwrap();
    let shuffles: Vec<&str> = rows.iter().map(|r| r.shuffle.as_str()).collect();
    assert_eq!(
        shuffles,
        ["(3,0,1,2)", "(3,0,2,1)", "(3,1,0,2)", "(3,1,2,0)"]
    );
}

#[test]
fn enumeration_cap_is_a_usage_error() {
    let output = qshuffle(&["enumerate", "--K", "9"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("cap"));
    assert_eq!(
        qshuffle(&["enumerate", "--K", "3", "--cap", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn undersized_order_is_a_usage_error() {
    assert_eq!(
        qshuffle(&["enumerate", "--K", "3", "--T", "6"]).status.code(),
        Some(2)
    );
}

#[test]
fn invalid_q_and_degenerate_configs_exit_two() {
    for args in [
        &["simulate", "--q", "1.5"][..],
        &["simulate", "--q", "0"][..],
        &["simulate", "--trials", "0"][..],
        &["simulate", "--K", "50", "--I", "60"][..],
    ] {
        assert_eq!(qshuffle(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn simulate_emits_the_documented_schema() {
    let output = qshuffle(&[
        "simulate", "--q", "0.5", "--K", "8", "--trials", "2000", "--seed", "5", "--I", "2",
        "--J", "1",
    ]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let row: SimulationRow = serde_json::from_str(&text).expect("documented schema");
    assert!(row.stderr > 0.0);
    assert!((row.exact.unwrap() - 0.125).abs() < 1e-12);
    assert!(row.z_score.is_some());
    let reparsed: serde_json::Value =
        serde_json::from_str(&serde_json::to_string(&row).unwrap()).unwrap();
    let original: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(reparsed, original);
}

#[test]
fn free_pattern_simulation_is_exact_with_no_z_score() {
    let output = qshuffle(&["simulate", "--K", "4", "--trials", "100", "--seed", "1"]);
    assert!(output.status.success());
    let row: SimulationRow = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(row.p_hat, 1.0);
    assert_eq!(row.stderr, 0.0);
    assert_eq!(row.exact, Some(1.0));
    assert_eq!(row.z_score, None);
}

#[test]
fn statistical_rejection_exits_one() {
    // seed chosen so this correct-hypothesis run lands outside the 4-sigma
    // band (expected for ~0.006% of seeds); it exercises the exit contract
    let output = qshuffle(&[
        "simulate", "--q", "0.5", "--K", "1", "--trials", "50", "--seed", "4631", "--I", "1",
    ]);
    assert_eq!(output.status.code(), Some(1));
    let row: SimulationRow = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert!(row.z_score.unwrap().abs() > 4.0);
}

#[test]
fn oracle_sweep_reports_every_horizon() {
    let output = qshuffle(&["oracle-sweep", "--K", "3"]);
    assert!(output.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(rows.len(), 3);
    for (index, row) in rows.iter().enumerate() {
        assert_eq!(row["K"], index as u64 + 1);
        assert_eq!(row["patterns"], 3u64.pow(index as u32 + 1));
        assert_eq!(row["mismatches"], 0);
        assert_eq!(row["holds"], true);
    }
}

#[test]
fn easter_egg_prints_86() {
    let output = qshuffle(&["easter-egg"]);
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(value["floor"], 86);
    assert!(value["log_tail_bound"].as_f64().unwrap() <= 1e-12);

    let text = qshuffle(&["easter-egg", "--format", "text"]);
    assert!(stdout_of(&text).starts_with("86 "));
}

#[test]
fn text_format_is_human_readable() {
    let output = qshuffle(&["check-pnt", "--T", "50", "--format", "text"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    assert!(text.contains("pentagonal-number-theorem"));
    assert!(text.contains("holds"));
}

#[test]
fn csv_format_covers_reports() {
    let output = qshuffle(&["check-induction", "--N-max", "1", "--T", "40", "--format", "csv"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,N,T,holds,runtime_ms"));
    assert!(lines.next().unwrap().starts_with("prob-induction,0,40,true"));
}
