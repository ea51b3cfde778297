use std::path::{Path, PathBuf};

use survmrl::cli::run_cli_with;
use survmrl::render::parse_curve_csv;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("survmrl").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path_in(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn km_writes_svg_and_grouped_csv() {
    let dir = tempfile::tempdir().unwrap();
    let svg = path_in(&dir, "km.svg");
    let csv = path_in(&dir, "km.csv");
    let (code, out, err) = run(&[
        "km",
        "--input",
        &data("two_groups.csv"),
        "--out",
        svg.to_str().unwrap(),
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("km "), "{out}");
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg "));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("group,"), "{text}");
    assert!(text.contains("\nA,") && text.contains("\nB,"));
}

#[test]
fn single_group_csv_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path_in(&dir, "mrl.csv");
    let (code, _, err) = run(&["mrl", "--input", &data("single_group.csv"), "--out-csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let table = parse_curve_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert!(table.len() > 10);
    for i in 0..table.len() {
        let km = table.component_km.as_ref().unwrap()[i];
        let tail = table.component_tail.as_ref().unwrap()[i];
        assert_eq!(table.value[i], km + tail);
    }
}

#[test]
fn envelope_commands_require_a_seed() {
    let (code, _, err) = run(&["diff", "--input", &data("two_groups.csv"), "--groups", "A,B"]);
    assert_eq!(code, 2, "{err}");
    let (code, _, err) = run(&["diff", "--input", &data("two_groups.csv"), "--groups", "A,B", "--permutations", "0"]);
    assert_eq!(code, 0, "{err}");
}

#[test]
fn invalid_arguments_exit_with_usage_error() {
    assert_eq!(run(&["mrl", "--input", &data("two_groups.csv"), "--threshold-quantile", "1.5"]).0, 2);
    assert_eq!(run(&["mrl", "--input", &data("two_groups.csv"), "--threshold", "1", "--threshold-quantile", "0.5"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn data_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path_in(&dir, "bad.csv");
    std::fs::write(&bad, "time,status\n1.0,1\n2.0,7\n").unwrap();
    let (code, _, err) = run(&["km", "--input", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: ") && err.contains("row 2"), "{err}");

    let (code, _, err) = run(&["km", "--input", path_in(&dir, "missing.csv").to_str().unwrap()]);
    assert_eq!(code, 1, "{err}");

    let (code, _, err) = run(&["diff", "--input", &data("two_groups.csv"), "--groups", "A,Q", "--seed", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("Q"), "{err}");

    let (code, _, err) = run(&["mrl", "--input", &data("two_groups.csv"), "--min-exceedances", "1000"]);
    assert_eq!(code, 1);
    assert!(err.contains("threshold too high"), "{err}");
}

#[test]
fn stats_reports_the_reference_p_value() {
    let (code, out, err) = run(&["stats", "--input", &data("survey.csv"), "--seed", "1"]);
    assert_eq!(code, 0, "{err}");
    let km_row = out.lines().find(|l| l.starts_with("KM")).unwrap();
    assert!(km_row.trim_end().ends_with("0.0269"), "{km_row}");
    let (code, out, _) = run(&["stats", "--input", &data("survey.csv"), "--seed", "1", "--exact"]);
    assert_eq!(code, 0);
    assert!(out.contains("0.0215"), "{out}");
}

#[test]
fn ratio_and_mrl_diff_produce_curves() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("two_groups.csv");
    for (cmd, extra) in [("ratio", vec!["--seed", "3", "--permutations", "100"]), ("mrl-diff", vec![])] {
        let csv = path_in(&dir, &format!("{cmd}.csv"));
        let mut args = vec![cmd, "--input", &input, "--groups", "A,B", "--out-csv"];
        let csv_s = csv.to_str().unwrap().to_string();
        args.push(&csv_s);
        args.extend(extra);
        let (code, _, err) = run(&args);
        assert_eq!(code, 0, "{cmd}: {err}");
        let table = parse_curve_csv(std::fs::File::open(&csv).unwrap()).unwrap();
        assert!(table.len() > 2);
    }
}
