use std::fs;
use std::path::Path;
use std::process::Command as Process;

use clap::Parser;
use ntn_peb::scenarios::{ScenarioConfig, Variant};
use ntn_peb_cli::manifest::RunManifest;
use ntn_peb_cli::output::SampleRow;
use ntn_peb_cli::{execute, parse_config, Cli};

fn run_cli(args: &[&str]) -> i32 {
    let mut full = vec!["ntn-peb"];
    full.extend_from_slice(args);
    execute(&Cli::parse_from(full))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn manifest(dir: &Path) -> RunManifest {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn minimal_config_is_fully_defaulted() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = parse_config(Path::new(&write(tmp.path(), "c.json", r#"{"variant": "single-leo"}"#))).unwrap();
    assert_eq!(cfg, ScenarioConfig::default_for(Variant::SingleLeo));
    assert_eq!((cfg.leo_altitude_m, cfg.n_virtual_anchors, cfg.n_ue_drops, cfg.seed), (600e3, 10, 1000, 0));
}

#[test]
fn config_errors_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"n_active_satellites": 5, "variant": "multi-leo"}"#, "3 or 4"),
        (r#"{"variant": "single-leo", "altittude": 1}"#, "altittude"),
        (r#"{"variant": "four-leo"}"#, "variant"),
        (r#"{"variant": "single-leo", "links": {"leo_bandwidth_hz": -1}}"#, "links.leo_bandwidth_hz"),
        (r#"{"variant": "single-leo", "#, "line 1"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let path = write(tmp.path(), &format!("c{i}.json"), text);
        let err = format!("{:#}", parse_config(Path::new(&path)).unwrap_err());
        assert!(err.contains(needle), "{err}");
    }
    let missing = format!("{:#}", parse_config(&tmp.path().join("nope.json")).unwrap_err());
    assert!(missing.contains("nope.json"), "{missing}");
}

#[test]
fn reproduce_figures_emits_every_case() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"variant": "single-leo", "n_ue_drops": 20}"#);
    let out = tmp.path().join("out");
    assert_eq!(run_cli(&["reproduce-figures", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let text = fs::read_to_string(out.join("boxplot.csv")).unwrap();
    let ids: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    let expected: Vec<String> = (2..=10)
        .map(|t| format!("single_leo_t{t}"))
        .chain(["multi_leo_3tdoa", "multi_leo_3tdoa_rtt", "multi_leo_4tdoa", "multi_leo_4tdoa_rtt"].map(String::from))
        .chain([2, 5, 7, 10].map(|t| format!("gnss_leo_t{t}")))
        .chain(["gnss_only_3".to_string()])
        .collect();
    assert_eq!(ids, expected);
    assert_eq!(
        text.lines().next().unwrap(),
        "case_id,mean,median,q1,q3,whisker_lo,whisker_hi,n_outliers"
    );
    let samples = fs::read_to_string(out.join("samples.csv")).unwrap();
    assert_eq!(samples.lines().next().unwrap(), "ue_lat_deg,ue_lon_deg,case_id,peb_m,gdop,degenerate");
    assert_eq!(samples.lines().count(), 1 + 20 * expected.len());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"variant": "gnss-leo", "n_ue_drops": 50, "seed": 9}"#);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(run_cli(&["gnss-leo", "--config", &cfg, "--out", a.to_str().unwrap()]), 0);
    assert_eq!(run_cli(&["gnss-leo", "--config", &cfg, "--out", b.to_str().unwrap(), "--workers", "3"]), 0);
    for f in ["samples.csv", "boxplot.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn json_samples_match_csv_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"variant": "multi-leo", "n_ue_drops": 30}"#);
    let c = tmp.path().join("c");
    let j = tmp.path().join("j");
    assert_eq!(run_cli(&["multi-leo", "--config", &cfg, "--out", c.to_str().unwrap()]), 0);
    assert_eq!(run_cli(&["multi-leo", "--config", &cfg, "--out", j.to_str().unwrap(), "--format", "json"]), 0);
    let from_csv: Vec<SampleRow> = csv::Reader::from_path(c.join("samples.csv"))
        .unwrap()
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    let from_json: Vec<SampleRow> = serde_json::from_str(&fs::read_to_string(j.join("samples.json")).unwrap()).unwrap();
    assert_eq!(from_csv, from_json);
    assert!(j.join("boxplot.json").exists() && !j.join("samples.csv").exists());
}

#[test]
fn manifest_is_complete() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write(tmp.path(), "a.json", r#"{"variant": "single-leo", "seed": 4, "n_ue_drops": 10}"#);
    let b = write(tmp.path(), "b.json", r#"{"n_ue_drops": 10, "seed": 4, "variant": "single-leo"}"#);
    let (oa, ob) = (tmp.path().join("oa"), tmp.path().join("ob"));
    assert_eq!(run_cli(&["single-leo", "--config", &a, "--out", oa.to_str().unwrap()]), 0);
    assert_eq!(run_cli(&["single-leo", "--config", &b, "--out", ob.to_str().unwrap()]), 0);
    let (ma, mb) = (manifest(&oa), manifest(&ob));
    assert_eq!(ma.config_hash, mb.config_hash);
    assert_eq!(ma.seed, Some(4));
    assert!(ma.errors.is_empty() && ma.channel_tables.warnings.is_empty());
    assert_eq!(ma.channel_tables.checksums.len(), 12);
    assert!(ma.calibration.processing_gain_db.is_some());
    let mut listed = ma.outputs.clone();
    listed.sort();
    let mut on_disk: Vec<String> = fs::read_dir(&oa)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    on_disk.sort();
    assert_eq!(listed, on_disk);
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"variant": "single-leo", "seed": 4, "n_ue_drops": 5}"#);
    let out = tmp.path().join("o");
    assert_eq!(run_cli(&["single-leo", "--config", &cfg, "--seed", "77", "--out", out.to_str().unwrap()]), 0);
    let m = manifest(&out);
    assert_eq!(m.seed, Some(77));
    assert_eq!(m.config.unwrap().seed, 77);
}

#[test]
fn tampered_table_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let tables = tmp.path().join("tables");
    fs::create_dir(&tables).unwrap();
    let assets = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/assets/channel/v1");
    for e in fs::read_dir(&assets).unwrap() {
        let e = e.unwrap();
        fs::copy(e.path(), tables.join(e.file_name())).unwrap();
    }
    let target = tables.join("urban_clutter_loss.csv");
    let text = fs::read_to_string(&target).unwrap();
    fs::write(&target, text.replacen("\n90,", "\n90,0", 1)).unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        &format!(
            r#"{{"variant": "single-leo", "n_ue_drops": 5, "channel_table_dir": {}}}"#,
            serde_json::to_string(&tables).unwrap()
        ),
    );
    let out = tmp.path().join("o");
    assert_eq!(run_cli(&["single-leo", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let m = manifest(&out);
    assert_eq!(m.channel_tables.warnings.len(), 1, "{:?}", m.channel_tables.warnings);
    assert!(m.channel_tables.warnings[0].contains("urban_clutter_loss.csv"));
}

#[test]
fn binary_exit_status_follows_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_ntn-peb");
    let bad = write(tmp.path(), "bad.json", r#"{"variant": "multi-leo", "n_active_satellites": 7}"#);
    let out = tmp.path().join("bad");
    let status = Process::new(bin)
        .args(["multi-leo", "--config", &bad, "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("n_active_satellites"));
    assert!(!manifest(&out).errors.is_empty());

    let wrong = write(tmp.path(), "wrong.json", r#"{"variant": "single-leo", "n_ue_drops": 3}"#);
    let status = Process::new(bin)
        .args(["multi-leo", "--config", &wrong, "--out"])
        .arg(tmp.path().join("wrong"))
        .status()
        .unwrap();
    assert!(!status.success());

    let good = tmp.path().join("good");
    let status = Process::new(bin)
        .args(["validate", "--trials", "20", "--out"])
        .arg(&good)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(good.join("validation.json")).unwrap()).unwrap();
    assert!(report["ratio"].as_f64().unwrap() > 0.0);
    assert!(manifest(&good).errors.is_empty());
}

#[test]
fn calibrate_rejects_a_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"variant": "single-leo"}"#);
    let out = tmp.path().join("o");
    assert_eq!(run_cli(&["calibrate", "--config", &cfg, "--out", out.to_str().unwrap()]), 1);
}
