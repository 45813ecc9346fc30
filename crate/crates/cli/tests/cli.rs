use std::path::Path;

use mnpi::io::{parse_counts_csv, parse_intervals_csv_str};
use mnpi_cli::{run_with, EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_PARSE, EXIT_USAGE, EXIT_VALIDATION};

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["mnpi"];
    argv.extend_from_slice(args);
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn error_json(stderr: &str) -> serde_json::Value {
    let line = stderr.lines().last().expect("empty stderr");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {stderr}"))
}

const FIXTURE: &str = "\
study,None,Minimal,Slight,Moderate,Massive
s1,10,22,12,2,0
s2,8,25,11,1,1
s3,12,20,13,1,0
s4,9,24,12,1,0
s5,11,21,12,2,0
";

fn fixture(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("hist.csv");
    std::fs::write(&path, FIXTURE).unwrap();
    path
}

fn quick(args: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    v.extend(["--B", "400", "--tolerance", "0.005", "--iters", "300", "--warmup", "300", "--mvn-draws", "20000"].map(String::from));
    v
}

#[test]
fn predict_writes_csv_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let data = fixture(dir.path());
    let out = dir.path().join("pi.csv");
    let table = dir.path().join("table.csv");
    let args = quick(&["predict", "--data", p(&data), "--m", "46", "--methods", "pointwise,marginal,bayes-scs",
        "--out", p(&out), "--table-out", p(&table)]);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let (code, stdout, stderr) = cli(&args);
    assert_eq!(code, EXIT_OK, "{stderr}");
    assert!(stdout.contains("Minimal"));
    assert!(!stdout.contains("contained"), "no verdicts without a future study");
    let rows = parse_intervals_csv_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 3 * 5);
    assert!(rows.iter().all(|r| 0.0 <= r.lower && r.lower <= r.upper && r.upper <= 46.0));
    assert!(rows.iter().any(|r| r.method == "bayes-scs-cauchy"));
    let table = std::fs::read_to_string(&table).unwrap();
    assert_eq!(table.lines().next().unwrap(), "category,pointwise,marginal,bayes-scs-cauchy");
    assert_eq!(table.lines().count(), 6);
}

#[test]
fn predict_json_reports_containment() {
    let dir = tempfile::tempdir().unwrap();
    let data = fixture(dir.path());
    let future = dir.path().join("future.csv");
    std::fs::write(&future, "study,None,Minimal,Slight,Moderate,Massive\ncurrent,10,23,11,1,1\n").unwrap();
    let out = dir.path().join("pi.json");
    let args = quick(&["predict", "--data", p(&data), "--m", "46", "--future", p(&future),
        "--methods", "bonferroni,rank-scs", "--out", p(&out)]);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let (code, stdout, stderr) = cli(&args);
    assert_eq!(code, EXIT_OK, "{stderr}");
    assert!(stdout.contains("contained"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
    let keys: Vec<&str> = v["rows"][0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["method", "category", "L", "U", "y_hat", "sep", "multiplier_L", "multiplier_U"]);
    assert_eq!(v["containment"].as_array().unwrap().len(), 2);
}

#[test]
fn same_seed_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let data = fixture(dir.path());
    let run = |name: &str| {
        let out = dir.path().join(name);
        let args = quick(&["predict", "--data", p(&data), "--m", "46", "--methods", "all", "--seed", "9", "--out", p(&out)]);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(cli(&args).0, EXIT_OK);
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn empty_method_list_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let data = fixture(dir.path());
    let out = dir.path().join("pi.csv");
    let (code, _, stderr) = cli(&["predict", "--data", p(&data), "--m", "46", "--methods", "", "--out", p(&out)]);
    assert_eq!(code, EXIT_OK, "{stderr}");
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("method,category,L,U"));
}

#[test]
fn unknown_method_lists_valid_ids() {
    let dir = tempfile::tempdir().unwrap();
    let data = fixture(dir.path());
    let (code, _, stderr) = cli(&["predict", "--data", p(&data), "--m", "46", "--methods", "pointwise,magic"]);
    assert_eq!(code, EXIT_USAGE);
    let e = error_json(&stderr);
    assert_eq!(e["exit_code"], EXIT_USAGE);
    let msg = e["message"].as_str().unwrap();
    assert!(msg.contains("magic") && msg.contains("rank-scs") && msg.contains("bayes-scs"), "{msg}");
}

#[test]
fn negative_cell_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    std::fs::write(&data, "study,a,b\ns1,3,4\ns2,-1,5\n").unwrap();
    let (code, _, stderr) = cli(&["predict", "--data", p(&data), "--m", "10"]);
    assert_eq!(code, EXIT_VALIDATION);
    let msg = error_json(&stderr)["message"].as_str().unwrap().to_string();
    assert!(msg.contains("s2") && msg.contains("'a'"), "{msg}");
}

#[test]
fn single_study_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("one.csv");
    std::fs::write(&data, "study,a,b\ns1,3,4\n").unwrap();
    let (code, _, stderr) = cli(&["predict", "--data", p(&data), "--m", "10"]);
    assert_eq!(code, EXIT_VALIDATION, "{stderr}");
    let e = error_json(&stderr);
    assert_eq!(e["error"], "Validation");
    assert!(e["message"].as_str().unwrap().contains("K >= 2"));
}

#[test]
fn empty_category_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("zero.csv");
    std::fs::write(&data, "study,a,b,c\ns1,3,4,0\ns2,5,2,0\n").unwrap();
    let (code, _, stderr) = cli(&["predict", "--data", p(&data), "--m", "10", "--methods", "pointwise"]);
    assert_eq!(code, EXIT_VALIDATION, "{stderr}");
    assert_eq!(error_json(&stderr)["error"], "ZeroCategory");
}

#[test]
fn tolerance_below_resolution_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = fixture(dir.path());
    let (code, _, stderr) =
        cli(&["predict", "--data", p(&data), "--m", "46", "--methods", "sym-calib", "--B", "100", "--tolerance", "0.001"]);
    assert_eq!(code, EXIT_VALIDATION, "{stderr}");
}

#[test]
fn non_integer_cell_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    std::fs::write(&data, "study,a,b\ns1,3,4\ns2,1.5,5\n").unwrap();
    let (code, _, stderr) = cli(&["predict", "--data", p(&data), "--m", "10"]);
    assert_eq!(code, EXIT_PARSE, "{stderr}");
}

#[test]
fn missing_file_is_an_io_error() {
    let (code, _, stderr) = cli(&["predict", "--data", "/nonexistent/hist.csv", "--m", "10"]);
    assert_eq!(code, EXIT_IO, "{stderr}");
    assert_eq!(error_json(&stderr)["exit_code"], EXIT_IO);
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(cli(&["predict", "--m", "10"]).0, EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(cli(&["--help"]).0, EXIT_OK);
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "vector = \"C3-05\"\nK = 5\nn = 10\nphi = 5.0\nflavour = 3\n").unwrap();
    let (code, _, stderr) = cli(&["simulate", "--config", p(&config), "--out", p(&dir.path().join("o.csv"))]);
    assert_eq!(code, EXIT_CONFIG, "{stderr}");
    assert!(error_json(&stderr)["message"].as_str().unwrap().contains("flavour"));
}

#[test]
fn generate_round_trips_through_the_parser() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gen.csv");
    let future = dir.path().join("future.csv");
    let (code, _, stderr) = cli(&["generate", "--K", "6", "--n", "30", "--phi", "2.5", "--vector", "C5-03",
        "--seed", "4", "--out", p(&out), "--future-out", p(&future)]);
    assert_eq!(code, EXIT_OK, "{stderr}");
    let data = parse_counts_csv(&out).unwrap();
    assert_eq!((data.clusters(), data.categories()), (6, 5));
    assert!(data.cluster_sizes().iter().all(|&n| n >= 30));
    let f = std::fs::read_to_string(&future).unwrap();
    assert_eq!(f.lines().count(), 2);
    assert!(f.lines().nth(1).unwrap().starts_with("current,"));
}

#[test]
fn simulate_writes_report_and_tail_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sim.toml");
    std::fs::write(
        &config,
        "vector = \"C3-05\"\nK = 10\nn = 50\nphi = [1.01, 5.0]\nmethods = \"pointwise,masr\"\n\
         n_iter = 20\nB = 400\ntolerance = 0.005\nseed = 3\n",
    )
    .unwrap();
    let out = dir.path().join("sim.json");
    let tail = dir.path().join("tail.csv");
    let (code, _, stderr) = cli(&["simulate", "--config", p(&config), "--out", p(&out), "--tail-out", p(&tail)]);
    assert_eq!(code, EXIT_OK, "{stderr}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // 2 scenarios x 2 methods x 3 categories
    assert_eq!(v["rows"].as_array().unwrap().len(), 12);
    assert_eq!(std::fs::read_to_string(&tail).unwrap().lines().count(), 1 + 12);
}
