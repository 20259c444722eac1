use std::io::Write;
use std::path::Path;
use std::process::Command;

use scientoscope::cli::{self, CONFIG_ENV, SKIPPED_NOTE};
use scientoscope::demo::{DEMO_AGGREGATES, DEMO_SMALL_RECORDS};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["scientoscope"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_temp(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::File::create(&path)
        .unwrap()
        .write_all(contents.as_bytes())
        .unwrap();
    path.to_str().unwrap().to_owned()
}

fn demo_file(dir: &Path) -> String {
    write_temp(dir, "demo_aggregates.csv", DEMO_AGGREGATES)
}

#[test]
fn validate_demo_warns_but_accepts() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&["validate", "--input", &demo_file(dir.path())]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("authorship bin sum 50 ≠ papers 51"), "{out}");
    assert!(out.contains("0 error(s)"), "{out}");
    assert!(out.ends_with("accepted\n"), "{out}");
}

#[test]
fn validate_strict_rejects_demo() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&["validate", "--strict", "--input", &demo_file(dir.path())]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("error: year 2017 [authorship-sum]"), "{out}");
}

#[test]
fn validate_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&["validate", "--format", "json", "--input", &demo_file(dir.path())]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["accepted"], true);
    assert_eq!(doc["year_count"], 5);
    assert_eq!(doc["warnings"][0]["location"], "year 2017");
}

#[test]
fn garbage_and_missing_input_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write_temp(dir.path(), "garbage.csv", "\u{1}\u{2},zz\nnot a table\n");
    assert_eq!(run(&["validate", "--input", &garbage]).0, 2);
    let missing = dir.path().join("nope.csv");
    let (code, _, err) = run(&["validate", "--input", missing.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"), "{err}");
}

#[test]
fn validate_records_reports_record_count() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_temp(dir.path(), "records.csv", DEMO_SMALL_RECORDS);
    let (code, out, _) = run(&["validate", "--input", &input]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("checked 12 records in 2013-2017"), "{out}");
}

#[test]
fn bad_record_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_temp(
        dir.path(),
        "records.csv",
        "year,volume,issue,title,authors,start_page,end_page,subject\n\
         2013,33,1,A,A. Kumar,412,411,ICT\n",
    );
    let (code, out, _) = run(&["validate", "--input", &input]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("page-order"), "{out}");
}

#[test]
fn analyze_table_6_paper_mode() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&[
        "analyze", "--input", &demo_file(dir.path()), "--mode", "paper", "--table", "6", "--format", "text",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# scientoscope "), "{out}");
    assert!(out.contains("mode=paper"));
    let footer = out.lines().find(|l| l.starts_with("Total / Mean")).unwrap();
    assert!(footer.contains("0.61") && footer.contains("1.78"), "{footer}");
    assert!(!out.contains("Table 5"));
}

#[test]
fn analyze_all_tables_json() {
    let (code, out, _) = run(&["analyze", "--table", "all", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let tables = doc["tables"].as_array().unwrap();
    assert_eq!(tables.len(), 8);
    assert_eq!(doc["metadata"]["mode"], "standard");
    for (i, table) in tables.iter().enumerate() {
        let title = table["title"].as_str().unwrap();
        assert!(title.starts_with(&format!("Table {}:", i + 1)), "{title}");
    }
}

#[test]
fn analyze_records_aggregates_implicitly() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_temp(dir.path(), "records.csv", DEMO_SMALL_RECORDS);
    let (code, out, err) = run(&["analyze", "--input", &input, "--table", "2"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("Table 2:"), "{out}");
    let total = out.lines().find(|l| l.contains("TOTAL")).unwrap();
    assert!(total.contains("12"), "{total}");
}

#[test]
fn table_3_without_author_totals_fails() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_temp(
        dir.path(),
        "no_authors.csv",
        "year,papers,a1,a2,a3,a4,a5plus,total_authors,p1to5,p6to10,pabove10\n\
         2013,3,1,2,0,0,0,,1,2,0\n\
         2014,4,2,2,0,0,0,,2,2,0\n",
    );
    let (code, _, err) = run(&["analyze", "--input", &input, "--table", "3"]);
    assert_eq!(code, 1);
    assert!(err.contains("author totals unavailable"), "{err}");
    assert_eq!(run(&["analyze", "--input", &input, "--table", "2"]).0, 0);
}

#[test]
fn output_is_deterministic_without_timestamp() {
    let a = run(&["analyze", "--mode", "paper"]).1;
    let b = run(&["analyze", "--mode", "paper"]).1;
    assert_eq!(a, b);
    assert!(!a.lines().next().unwrap().contains("timestamp="));
    let stamped = run(&["analyze", "--mode", "paper", "--timestamp"]).1;
    assert!(stamped.lines().next().unwrap().contains(" timestamp="));
}

#[test]
fn every_format_renders() {
    for format in ["text", "csv", "json", "markdown"] {
        let (code, out, err) = run(&["analyze", "--mode", "paper", "--format", format]);
        assert_eq!(code, 0, "{format}: {err}");
        assert!(out.contains("Degree of Collaboration"), "{format}");
    }
    assert_eq!(run(&["analyze", "--format", "yaml"]).0, 2);
    assert_eq!(run(&["analyze", "--table", "9"]).0, 2);
}

#[test]
fn overrides_are_echoed() {
    let (code, out, _) = run(&["analyze", "--mode", "paper", "--ci-variant", "stated", "--table", "4"]);
    assert_eq!(code, 0);
    assert!(out.lines().next().unwrap().contains("overrides=ci_variant=stated"), "{out}");
    assert!(out.contains("CI - Collaborative Index, stated"), "{out}");
}

#[test]
fn flag_beats_file_beats_default() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_temp(dir.path(), "cfg.toml", "mode = \"paper\"\ntable = \"6\"\n");
    let (_, out, _) = run(&["analyze", "--config", &config]);
    assert!(out.contains("mode=paper") && out.contains("Table 6:") && !out.contains("Table 5:"));
    let (_, out, _) = run(&["analyze", "--config", &config, "--mode", "standard", "--table", "5"]);
    assert!(out.contains("mode=standard") && out.contains("Table 5:"));

    let (code, shown, _) = run(&["analyze", "--config", &config, "--show-config"]);
    assert_eq!(code, 0);
    assert!(shown.contains("mode = \"paper\""), "{shown}");
    assert!(shown.contains("table = \"6\""), "{shown}");
    assert!(shown.contains("rgr_mode = \"paper\""), "{shown}");
}

#[test]
fn bad_config_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_temp(dir.path(), "cfg.toml", "colour = \"blue\"\n");
    let (code, _, err) = run(&["analyze", "--config", &config]);
    assert_eq!(code, 2);
    assert!(err.contains("config"), "{err}");
}

#[test]
fn indicators_summary() {
    let (code, out, _) = run(&["indicators", "--mode", "paper"]);
    assert_eq!(code, 0);
    assert!(out.contains("Indicator summary"));
    let cagr = out.lines().find(|l| l.starts_with("CAGR")).unwrap();
    assert!(cagr.contains("9.10"), "{cagr}");
}

#[test]
fn schema_lists_both_layouts() {
    let (code, out, _) = run(&["schema"]);
    assert_eq!(code, 0);
    assert!(out.contains("year,volume,issue,title,authors,start_page,end_page,subject"));
    assert!(out.contains("year,papers,a1,a2,a3,a4,a5plus,total_authors,p1to5,p6to10,pabove10"));
    let (_, json, _) = run(&["schema", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(doc["aggregates"]["taxonomy"].as_array().unwrap().len(), 14);
}

#[test]
fn reproduce_paper_passes() {
    let (code, out, _) = run(&["reproduce-paper"]);
    assert_eq!(code, 0);
    assert!(out.contains("EXEMPT Table 6, row 2013, column W1"));
    let last = out.lines().last().unwrap();
    assert!(last.starts_with("golden checks: ") && last.ends_with(" passed, 0 failed"), "{last}");
}

#[test]
fn reproduce_paper_standard_mode_skips_comparison() {
    let (code, out, _) = run(&["reproduce-paper", "--mode", "standard"]);
    assert_eq!(code, 0);
    assert!(out.contains("Table 8:"));
    assert_eq!(out.lines().last().unwrap(), SKIPPED_NOTE);
    assert!(!out.contains("golden checks"));
}

#[test]
fn reproduce_paper_json_has_conformance() {
    let (code, out, _) = run(&["reproduce-paper", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["conformance"]["failed"], 0);
    assert_eq!(doc["tables"].as_array().unwrap().len(), 8);
}

#[test]
fn reproduce_paper_names_perturbed_cell() {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/perturbed_aggregates.csv");
    let (code, out, err) = run(&["reproduce-paper", "--input", fixture]);
    assert_eq!(code, 1);
    assert!(err.contains("FAIL Table 8, row ICT, column 2014: printed 5, computed 7"), "{err}");
    assert!(out.contains("golden checks: "));
    assert!(!out.ends_with(" 0 failed\n"));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["analyze", "--mode", "fancy"]).0, 2);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("reproduce-paper"));
}

#[test]
fn binary_uses_config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_temp(dir.path(), "env.toml", "mode = \"paper\"\n");
    let output = Command::new(env!("CARGO_BIN_EXE_scientoscope"))
        .args(["analyze", "--table", "1"])
        .env(CONFIG_ENV, &config)
        .output()
        .unwrap();
    assert!(output.status.success());
    let out = String::from_utf8(output.stdout).unwrap();
    assert!(out.starts_with("# scientoscope 0.1.0 mode=paper"), "{out}");

    let output = Command::new(env!("CARGO_BIN_EXE_scientoscope"))
        .args(["validate", "--strict"])
        .env_remove(CONFIG_ENV)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}
