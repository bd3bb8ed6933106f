use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ddverify::models::{fixtures_dir, FIXTURES_ENV};
use ddverify::report::{VerificationReport, CSV_HEADER};

fn ddverify(args: &[&str]) -> Output {
    ddverify_with(args, None)
}

fn ddverify_with(args: &[&str], fixtures: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ddverify"));
    cmd.arg("run").args(args);
    if let Some(dir) = fixtures {
        cmd.env(FIXTURES_ENV, dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn corrupted_fixtures(edit: impl FnOnce(&Path)) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(fixtures_dir()).unwrap() {
        let path = entry.unwrap().path();
        fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
    }
    edit(dir.path());
    dir
}

#[test]
fn passing_check_exits_zero_with_parseable_json() {
    let out = ddverify(&["--check", "prop21", "--model", "heisenberg", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let reports: Vec<VerificationReport> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(reports.len(), 1);
    let r = &reports[0];
    assert_eq!((r.check.as_str(), r.model.as_str(), r.samples, r.seed), ("prop21", "heisenberg", 50, Some(42)));
    assert!(r.pass && r.max_residual < 1e-6);
}

#[test]
fn tolerance_below_the_numeric_floor_exits_one_and_still_reports() {
    let out = ddverify(&["--check", "prop21", "--model", "heisenberg", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(1));
    let reports: Vec<VerificationReport> = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!reports[0].pass);
}

#[test]
fn unknown_or_incompatible_names_exit_two() {
    for args in [
        &["--check", "prop21", "--model", "sl2"][..],
        &["--check", "prop9", "--model", "heisenberg"],
        &["--check", "thm31", "--model", "q8_over_v4"],
        &["--check", "prop21", "--model", "heisenberg", "--samples", "0"],
        &["--format", "yaml"],
    ] {
        let out = ddverify(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn discrete_cocycle_is_exact_and_identically_zero() {
    let out = ddverify(&["--check", "cocycle", "--model", "q8_over_v4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"tol\": \"exact\""), "{text}");
    assert!(text.contains("\"seed\": null"));
    let reports: Vec<VerificationReport> = serde_json::from_str(&text).unwrap();
    assert_eq!(reports[0].max_residual, 0.0);
}

#[test]
fn inconsistent_extension_data_exits_three() {
    let dir = corrupted_fixtures(|d| {
        let path = d.join("q8_over_v4.ext");
        let text = fs::read_to_string(&path).unwrap().replace("rho 0 0 1 1 2 2 3 3", "rho 0 0 1 1 2 2 3");
        fs::write(path, text).unwrap();
    });
    let out = ddverify_with(&["--check", "coboundary", "--model", "q8_over_v4"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q8_over_v4"));
}

#[test]
fn swapped_table_entry_fails_with_the_offending_index() {
    let dir = corrupted_fixtures(|d| {
        let path = d.join("q8.table");
        let text = fs::read_to_string(&path).unwrap().replace("2 3 1 0 6 7 5 4", "2 3 1 0 7 6 5 4");
        fs::write(path, text).unwrap();
    });
    let tables = ddverify_with(&["--check", "tables", "--model", "q8_over_v4", "--format", "text"], Some(dir.path()));
    assert_eq!(tables.status.code(), Some(1));
    let text = stdout(&tables);
    assert!(text.lines().any(|l| l.starts_with("FAIL") && l.contains("≠")), "{text}");
    let other = ddverify_with(&["--check", "coboundary", "--model", "q8_over_v4"], Some(dir.path()));
    assert_eq!(other.status.code(), Some(3));
}

#[test]
fn csv_header_is_fixed_and_out_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = ddverify(&[
        "--check",
        "tables",
        "--model",
        "all",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let body = fs::read_to_string(path).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), 3);
}

#[test]
fn text_mode_prints_one_line_per_identity() {
    let out = ddverify(&["--check", "prop22", "--model", "heisenberg", "--format", "text", "--samples", "30"]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("ok   prop22/heisenberg: "));
}

#[test]
fn unwritable_output_is_a_reported_io_error() {
    let out = ddverify(&["--check", "tables", "--model", "split_v4", "--out", "/nonexistent/dir/r.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/r.json"));
}

#[test]
fn json_is_byte_identical_across_thread_counts() {
    let args = ["--check", "thm41", "--model", "u2_so3", "--samples", "60"];
    let one = ddverify(&[&args[..], &["--threads", "1"]].concat());
    let four = ddverify(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one.stdout, four.stdout);
    assert!(!one.stdout.is_empty());
}
