use std::path::PathBuf;

use covset::experiment::{prepare, run, ExperimentConfig, ExperimentKind, Overrides};
use covset::Error;
use serde_json::Value;
use tempfile::TempDir;

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&configs_dir().join(name)).unwrap()
}

fn read_summary(dir: &std::path::Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn shipped_configs_validate() {
    let mut seen = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::load(&path).unwrap();
            prepare(cfg).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 7);
}

#[test]
fn nesting_check_reports_pass() {
    let dir = TempDir::new().unwrap();
    let mut cfg = load("nesting-cantor.toml");
    cfg.apply(&Overrides { out: Some(dir.path().to_path_buf()), ..Default::default() });
    let report = run(cfg).unwrap();
    assert!(report.outcome.passed);
    let s = read_summary(dir.path());
    assert_eq!(s["results"]["pass"], true);
    assert_eq!(s["results"]["report"]["levels"].as_array().unwrap().len(), 9);
}

#[test]
fn bt_index_summary_contains_estimate() {
    let dir = TempDir::new().unwrap();
    let mut cfg = load("bt-index.toml");
    cfg.apply(&Overrides { out: Some(dir.path().to_path_buf()), ..Default::default() });
    run(cfg).unwrap();
    let s = read_summary(dir.path());
    let est = s["results"]["bt_index"]["estimate"].as_f64().unwrap();
    assert!((0.38..=0.42).contains(&est), "{est}");
    assert_eq!(s["prediction"]["analytic_index"], 0.4);
    let csv = std::fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    assert!(csv.starts_with("# schema: covset-blocks v1\nk,n_k,m_k,log_ratio\n"));
}

#[test]
fn empty_regime_hit_probability() {
    let dir = TempDir::new().unwrap();
    let mut cfg = load("hit-empty.toml");
    cfg.apply(&Overrides { out: Some(dir.path().to_path_buf()), trials: Some(40), ..Default::default() });
    let report = run(cfg).unwrap();
    assert!(report.outcome.headline.1 <= 0.05);
    let s = read_summary(dir.path());
    assert_eq!(s["prediction"]["regime"], "Empty");
    assert_eq!(s["check"]["passed"], true);
    assert_eq!(s["inputs"]["trials"], 40);
    assert!(s["version"].as_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));
}

#[test]
fn percolation_rows_cover_every_level() {
    let mut cfg = load("percolate-union.toml");
    cfg.apply(&Overrides { trials: Some(5), depth: Some(6), ..Default::default() });
    let out = prepare(cfg).unwrap().execute().unwrap();
    let text = String::from_utf8(out.csv[0].body.clone()).unwrap();
    assert_eq!(text.lines().count(), 2 + 5 * 7);
    assert!(text.lines().nth(2).unwrap().starts_with("0,0,32,"));
    assert_eq!(out.prediction["regime"], "hit");
}

#[test]
fn subcritical_percolation_predicts_miss() {
    let mut cfg = load("percolate-subcritical.toml");
    cfg.apply(&Overrides { trials: Some(20), ..Default::default() });
    let out = prepare(cfg).unwrap().execute().unwrap();
    assert_eq!(out.prediction["regime"], "miss");
    assert!(out.prediction["intersection"]["error"].as_str().unwrap().contains("positive"));
}

#[test]
fn limsup_dimension_source() {
    let mut cfg = load("limsup-dim.toml");
    cfg.apply(&Overrides { trials: Some(4), ..Default::default() });
    assert_eq!(cfg.kind, ExperimentKind::DimEst);
    let out = prepare(cfg).unwrap().execute().unwrap();
    assert!((out.headline.1 - 0.7).abs() < 0.08, "{}", out.headline.1);
    assert_eq!(out.csv.len(), 2);
    assert_eq!(out.results["fitted_trials"], 4);
}

#[test]
fn cover_sim_rows_per_block() {
    let text = r#"
kind = "cover-sim"
seed = 3
trials = 3
depth = 8
[space]
preset = { base-m-full = 3 }
[sequence]
kind = "power-law"
alpha0 = 0.5
[target]
kind = "cantor"
"#;
    let out = prepare(ExperimentConfig::from_toml(text).unwrap()).unwrap().execute().unwrap();
    let body = String::from_utf8(out.csv[0].body.clone()).unwrap();
    assert_eq!(body.lines().nth(1).unwrap(), "trial,seed,k,n_k,m_k,contained_g,meeting_g,s_k");
    assert_eq!(body.lines().count(), 2 + 3 * 8);
    for line in body.lines().skip(2) {
        let f: Vec<u64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        // contained ⊆ meeting, and the sparse count never exceeds the full one
        assert!(f[5] <= f[6] && f[7] <= f[6] && f[4] <= f[3]);
    }
}

#[test]
fn explicit_and_profile_sequences_run() {
    let text = r#"
kind = "hit-prob"
trials = 5
depth = 5
[space]
base = 2
[sequence]
kind = "explicit-list"
radii = ["1/2", "1/4", "1/4", "1/8", "1/8", "1/8", "1/16", "1/16", "1/16", "1/16"]
[options]
k_min = 3
"#;
    let out = prepare(ExperimentConfig::from_toml(text).unwrap()).unwrap().execute().unwrap();
    assert_eq!(out.results["k_max"], 5);
    let text = text.replace(
        "kind = \"explicit-list\"\nradii = [\"1/2\", \"1/4\", \"1/4\", \"1/8\", \"1/8\", \"1/8\", \"1/16\", \"1/16\", \"1/16\", \"1/16\"]",
        "kind = \"block-profile\"\ncounts = [1, 2, 3, 4, 5]",
    );
    prepare(ExperimentConfig::from_toml(&text).unwrap()).unwrap().execute().unwrap();
}

#[test]
fn invalid_specs_rejected_before_trials() {
    let base = "kind = \"hit-prob\"\ndepth = 8\n[sequence]\nkind = \"power-law\"\nalpha0 = 0.5\n";
    let bad_space = format!("{base}[space]\nbase = 3\nalphabet = [0]\n");
    assert!(matches!(prepare(ExperimentConfig::from_toml(&bad_space).unwrap()), Err(Error::Config { ref path, .. }) if path == "space"));
    let bad_target = format!("{base}[space]\nbase = 2\n[target]\nkind = \"cantor\"\n");
    assert!(matches!(prepare(ExperimentConfig::from_toml(&bad_target).unwrap()), Err(Error::Config { ref path, .. }) if path == "target"));
    let bad_alpha = "kind = \"hit-prob\"\ndepth = 8\n[space]\nbase = 2\n[sequence]\nkind = \"power-law\"\nalpha0 = -1.0\n";
    assert!(matches!(prepare(ExperimentConfig::from_toml(bad_alpha).unwrap()), Err(Error::Config { ref path, .. }) if path == "sequence"));
}
