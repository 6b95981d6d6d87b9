use std::path::Path;
use std::process::{Command, Output};

fn nmland(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmland")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in:\n{text}"))
        .to_string()
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", &path]);
    let out = nmland(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn type3_extremes_are_opposite() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "t3.json", &["--type", "3", "--n", "32", "--m-order", "5", "--sigma", "32", "--seed", "7"]);
    let out = nmland(&["analyze", &file, "--extremes"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let max: f64 = value(&text, "f_max").parse().unwrap();
    let min: f64 = value(&text, "f_min").parse().unwrap();
    assert!(max > 0.0);
    assert_eq!(max, -min);
}

#[test]
fn first_order_landscape_has_one_peak() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "m1.json", &["--type", "1", "--n", "8", "--m-order", "1", "--seed", "3"]);
    let text = stdout(&nmland(&["analyze", &file]));
    assert_eq!(value(&text, "peak_count"), "1");
    assert_eq!(value(&text, "basin_fraction"), "1");
}

#[test]
fn walsh_roundtrip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, seed) in [("1", "1"), ("2", "2"), ("3", "3")] {
        let file = gen(dir.path(), "w.json", &["--type", kind, "--n", "10", "--m-order", "3", "--seed", seed]);
        let out = nmland(&["walsh", "--roundtrip", &file]);
        assert!(out.status.success());
        let text = stdout(&out);
        assert_eq!(value(&text, "max_pointwise_deviation"), "0");
        assert_eq!(value(&text, "terms_identical"), "true");
        let walsh: f64 = value(&text, "max_walsh_evaluation_deviation").parse().unwrap();
        assert!(walsh < 1e-12);
    }
}

#[test]
fn walsh_conversion_files_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "m.json", &["--type", "2", "--n", "6", "--m-order", "3", "--seed", "5"]);
    let w = dir.path().join("w.json").to_string_lossy().into_owned();
    let back = dir.path().join("back.json").to_string_lossy().into_owned();
    assert!(nmland(&["walsh", &file, "-o", &w]).status.success());
    assert!(nmland(&["walsh", "--from-walsh", &w, "-o", &back]).status.success());
    let a = stdout(&nmland(&["analyze", &file, "--peaks", "--extremes"]));
    let b = stdout(&nmland(&["analyze", &back, "--peaks", "--extremes"]));
    assert_eq!(value(&a, "peak_count"), value(&b, "peak_count"));
    assert_eq!(value(&a, "f_max"), value(&b, "f_max"));
}

#[test]
fn budget_refusal_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "big.json", &["--type", "1", "--n", "20", "--m-order", "1"]);
    let out = nmland(&["analyze", &file, "--peaks", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1048576"));
}

#[test]
fn user_errors_exit_1() {
    assert_eq!(nmland(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(nmland(&["gen", "--type", "4", "--n", "3"]).status.code(), Some(1));
    assert_eq!(nmland(&["gen", "--type", "2", "--n", "3", "--alphabet", "1,2,2"]).status.code(), Some(1));
    assert_eq!(nmland(&["analyze", "/nonexistent/landscape.json"]).status.code(), Some(1));
    assert_eq!(nmland(&["experiment", "fig99", "--out", "x"]).status.code(), Some(1));
    assert_eq!(nmland(&["--help"]).status.code(), Some(0));
}

#[test]
fn nk_generate_and_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("nk.json").to_string_lossy().into_owned();
    assert!(nmland(&["nk", "generate", "--n", "8", "--k", "0", "--seed", "2", "-o", &file]).status.success());
    let text = stdout(&nmland(&["nk", "analyze", &file]));
    assert_eq!(value(&text, "k"), "0");
    assert_eq!(value(&text, "peak_count"), "1");
}

#[test]
fn ga_with_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "g.json", &["--type", "3", "--n", "16", "--m-order", "1", "--sigma", "2", "--seed", "1"]);
    let cfg = dir.path().join("ga.toml");
    std::fs::write(&cfg, "population_size = 64\ngenerations = 20\nruns = 4\nselection = \"tournament:2\"\n").unwrap();
    let csv = dir.path().join("runs.csv");
    let out = nmland(&[
        "ga",
        &file,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(value(&stdout(&out), "success_proportion"), "1");
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 1 + 4 * 21);

    std::fs::write(&cfg, "population_size = 64\nmutation = 0.1\n").unwrap();
    let out = nmland(&["ga", &file, "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn experiment_writes_data_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("fig2");
    let out = nmland(&["experiment", "fig2_histograms", "--out", out_dir.to_str().unwrap(), "--sigma", "1,10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["summary.csv", "histograms.csv", "fitnesses.csv", "spec.json", "run.json"] {
        assert!(out_dir.join(f).exists(), "{f} missing");
    }
    let fit = std::fs::read_to_string(out_dir.join("fitnesses.csv")).unwrap();
    assert_eq!(fit.lines().count(), 1 + 2 * 1024);

    let out = nmland(&["experiment", "fig4_ruggedness_schedule", "--out", out_dir.to_str().unwrap(), "--n", "30"]);
    assert_eq!(out.status.code(), Some(2));
}
