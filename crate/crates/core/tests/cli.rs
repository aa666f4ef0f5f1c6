use econet::cli::{GenerateMeta, PipelineConfig};
use econet::timeseries::{parse_csv, synthesize_economy, PREDICTOR_LEADS, TARGET_NAME};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn econet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_econet"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "status {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    files
}

fn write_config(dir: &Path, json: serde_json::Value) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, serde_json::to_string_pretty(&json).unwrap()).unwrap();
    p
}

fn csv_config(out: &str) -> serde_json::Value {
    serde_json::json!({
        "schema": 1,
        "data": {"csv": {"path": "gen/bundle.csv"}},
        "train_range": ["1992-01", "1999-12"],
        "test_range": ["2000-01", "2003-12"],
        "out_dir": out,
    })
}

#[test]
fn generate_matches_synthesizer_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    ok(&econet(dir.path(), &["--out", "a", "generate", "--seed", "1", "--months", "156"]));
    ok(&econet(dir.path(), &["--out", "b", "generate", "--seed", "1", "--months", "156"]));
    let a = snapshot(&dir.path().join("a"));
    assert_eq!(a, snapshot(&dir.path().join("b")));

    let csv = std::fs::read_to_string(dir.path().join("a/bundle.csv")).unwrap();
    assert_eq!(csv.lines().count(), 157);
    let parsed = parse_csv(csv.as_bytes()).unwrap();
    let direct = synthesize_economy(1, 156, 12, 0.1).unwrap();
    assert_eq!(parsed, direct.series);

    let meta: GenerateMeta =
        serde_json::from_slice(&std::fs::read(dir.path().join("a/planted_lags.json")).unwrap()).unwrap();
    assert_eq!(meta.months, 156);
    assert_eq!(meta.target, TARGET_NAME);
    assert_eq!(meta.start.to_string(), "1991-01");
    let planted: Vec<(&str, usize)> = meta.planted.iter().map(|p| (p.name.as_str(), p.lead)).collect();
    assert_eq!(planted, PREDICTOR_LEADS.to_vec());
}

#[test]
fn generate_rejects_short_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = econet(dir.path(), &["generate", "--months", "12"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn scan_recovers_planted_lags_and_writes_curves() {
    let dir = tempfile::tempdir().unwrap();
    ok(&econet(dir.path(), &["--out", "gen", "generate", "--noise", "0"]));
    let bundle_before = std::fs::read(dir.path().join("gen/bundle.csv")).unwrap();
    let cfg = write_config(dir.path(), csv_config("o"));
    ok(&econet(dir.path(), &["--config", cfg.to_str().unwrap(), "scan"]));
    assert_eq!(std::fs::read(dir.path().join("gen/bundle.csv")).unwrap(), bundle_before);

    let chosen = std::fs::read_to_string(dir.path().join("o/scan/chosen_lags.csv")).unwrap();
    let found: Vec<(String, usize)> = chosen
        .lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(',');
            (f.next().unwrap().to_string(), f.next().unwrap().parse().unwrap())
        })
        .collect();
    let expected: Vec<(String, usize)> =
        PREDICTOR_LEADS.iter().map(|(n, k)| (n.to_string(), *k)).collect();
    assert_eq!(found, expected);

    for (name, _) in PREDICTOR_LEADS {
        let curves = std::fs::read_to_string(dir.path().join(format!("o/scan/{name}_curves.csv"))).unwrap();
        let mut names: Vec<&str> = curves.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
        names.dedup();
        assert_eq!(names.len(), 12 + 2, "{name}");
        let lags = std::fs::read_to_string(dir.path().join(format!("o/scan/{name}_lags.csv"))).unwrap();
        assert_eq!(lags.lines().count(), 13);
    }
}

#[test]
fn scan_names_missing_input() {
    let dir = tempfile::tempdir().unwrap();
    ok(&econet(dir.path(), &["--out", "gen", "generate"]));
    let mut c = csv_config("o");
    c["scan"] = serde_json::json!({"inputs": ["gold", "silver"]});
    let cfg = write_config(dir.path(), c);
    let out = econet(dir.path(), &["--config", cfg.to_str().unwrap(), "scan"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("silver"));
}

#[test]
fn invalid_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut typo = csv_config("o");
    typo["ensemble"] = serde_json::json!({"networks": ["network1", "netwrok2"]});
    let cfg = write_config(dir.path(), typo);
    let out = econet(dir.path(), &["--config", cfg.to_str().unwrap(), "ensemble"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("netwrok2"));

    let out = econet(dir.path(), &["--config", "missing.json", "ensemble"]);
    assert_eq!(out.status.code(), Some(1));
    let out = econet(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_without_model_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = econet(dir.path(), &["report"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ensemble_pipeline_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let t0 = std::time::Instant::now();
    ok(&econet(dir.path(), &["--out", "e", "ensemble"]));
    assert!(t0.elapsed().as_secs() < 300);
    let files = snapshot(&dir.path().join("e"));
    let names: Vec<String> = files.keys().map(|p| p.display().to_string()).collect();
    for f in [
        "report.txt",
        "report.csv",
        "predictions.csv",
        "equity.csv",
        "model/manifest.json",
        "model/master.json",
        "model/network1.json",
        "model/network8.json",
    ] {
        assert!(names.contains(&f.to_string()), "{f} missing from {names:?}");
    }
    assert_eq!(files.len(), 14);
    assert!(!names.iter().any(|n| n.ends_with(".tmp")));

    let report = String::from_utf8(files[Path::new("report.txt")].clone()).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 10);
    assert!(lines[0].starts_with("Networks "));
    assert!(lines[9].starts_with("Master Network"));

    let preds = String::from_utf8(files[Path::new("predictions.csv")].clone()).unwrap();
    assert_eq!(preds.lines().count(), 1 + 96 + 48);
    let equity = String::from_utf8(files[Path::new("equity.csv")].clone()).unwrap();
    assert_eq!(equity.lines().count(), 1 + 3 * 47);

    // `report` re-derives the same artifacts from the saved model.
    std::fs::remove_file(dir.path().join("e/report.txt")).unwrap();
    std::fs::remove_file(dir.path().join("e/equity.csv")).unwrap();
    ok(&econet(dir.path(), &["--out", "e", "report"]));
    assert_eq!(snapshot(&dir.path().join("e")), files);

    ok(&econet(dir.path(), &["--out", "e", "--locale-comma", "report"]));
    let comma = std::fs::read_to_string(dir.path().join("e/report.txt")).unwrap();
    assert_eq!(comma, report.replace('.', ","));
    assert_eq!(
        std::fs::read(dir.path().join("e/report.csv")).unwrap(),
        files[Path::new("report.csv")]
    );
}

#[test]
fn seed_flag_changes_models() {
    let dir = tempfile::tempdir().unwrap();
    ok(&econet(dir.path(), &["--out", "a", "ensemble"]));
    ok(&econet(dir.path(), &["--out", "b", "--seed", "2", "ensemble"]));
    let a = std::fs::read(dir.path().join("a/model/master.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/model/master.json")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn leaky_selection_runs_with_restarts() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = serde_json::to_value(PipelineConfig::default()).unwrap();
    c["ensemble"]["restarts"] = 3.into();
    c["ensemble"]["networks"] = serde_json::json!(["network2", "network5"]);
    let cfg = write_config(dir.path(), c);
    let cfg = cfg.to_str().unwrap();
    ok(&econet(dir.path(), &["--config", cfg, "--out", "carve", "ensemble"]));
    ok(&econet(dir.path(), &["--config", cfg, "--out", "leaky", "--leaky-selection", "ensemble"]));
    let report = std::fs::read_to_string(dir.path().join("leaky/report.txt")).unwrap();
    assert_eq!(report.lines().count(), 4);
    assert!(report.contains("Network 2") && report.contains("Network 5"));
}

#[test]
fn train_with_grid_writes_search_logs() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = serde_json::to_value(PipelineConfig::default()).unwrap();
    c["train"] = serde_json::json!({
        "networks": ["network4"],
        "grid": {"nodes_per_layer": [2, 4], "train_config": {"max_epochs": 200}},
    });
    let cfg = write_config(dir.path(), c);
    let cfg = cfg.to_str().unwrap();
    ok(&econet(dir.path(), &["--config", cfg, "--out", "a", "--timings", "train"]));
    ok(&econet(dir.path(), &["--config", cfg, "--out", "b", "train"]));
    let log = std::fs::read_to_string(dir.path().join("a/train/network4_search.csv")).unwrap();
    assert!(log.starts_with("candidate,shape,seed,train_err,val_err,srm,wallclock\n"));
    assert_eq!(log.lines().count(), 1 + 4);
    let plain = std::fs::read_to_string(dir.path().join("b/train/network4_search.csv")).unwrap();
    assert!(plain.starts_with("candidate,shape,seed,train_err,val_err,srm\n"));
    assert_eq!(
        std::fs::read(dir.path().join("a/train/network4.json")).unwrap(),
        std::fs::read(dir.path().join("b/train/network4.json")).unwrap()
    );
    let report = std::fs::read_to_string(dir.path().join("b/train/report.txt")).unwrap();
    assert_eq!(report.lines().count(), 2);
}
