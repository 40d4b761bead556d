use std::path::PathBuf;
use std::process::{Command, Output};

fn ingham(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ingham"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn workspace(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ingham-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn without_timestamps(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with("# timestamp:")).collect::<Vec<_>>().join("\n")
}

#[test]
fn riesz_from_curve_file_reports_bounds_as_json() {
    let out = ingham(&[
        "riesz",
        "--curve-file",
        &workspace("experiments/mono2.json"),
        "--s",
        "2",
        "--N",
        "20",
        "--T",
        "3",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let row = &v["rows"][0];
    let (lo, hi) = (row[1].as_f64().unwrap(), row[2].as_f64().unwrap());
    assert!(0.0 < lo && lo <= hi);
    assert_eq!(row[5], row[6], "every random vector inside the sandwich");
}

#[test]
fn classify_writes_region_table_and_svg() {
    let dir = scratch("classify");
    let out =
        ingham(&["classify", "--s", "1.5", "--tau", "4", "--N", "50", "--out-dir", dir.to_str().unwrap(), "--plot"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("region.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 101 * 101);
    let svg = std::fs::read_to_string(dir.join("region.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    // white background plus one colour per region kind
    let fills: std::collections::BTreeSet<&str> =
        svg.split("fill=\"").skip(1).filter_map(|r| r.split('"').next()).collect();
    assert!(fills.len() >= 4, "{fills:?}");
}

#[test]
fn repeated_runs_are_identical_up_to_timestamps() {
    let a = ingham(&["lemma21", "--gamma", "1", "--s", "1.5", "--N", "300"]);
    let b = ingham(&["lemma21", "--gamma", "1", "--s", "1.5", "--N", "300"]);
    assert!(a.status.success());
    assert_eq!(
        without_timestamps(&String::from_utf8_lossy(&a.stdout)),
        without_timestamps(&String::from_utf8_lossy(&b.stdout))
    );
}

#[test]
fn exit_codes_separate_errors_from_failed_checks() {
    let bad_input = ingham(&["threepoint", "--points", "0,0,0,3.141592653589793,1,1"]);
    assert_eq!(bad_input.status.code(), Some(1));
    let failed_check =
        ingham(&["validate-curve", "--curve", r#"{"kind":"affine","params":{"intercept":0,"slope":1}}"#]);
    assert_eq!(failed_check.status.code(), Some(2));
    let unknown = ingham(&["no-such-command"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert_eq!(ingham(&["--help"]).status.code(), Some(0));
}

#[test]
fn dry_run_validates_without_computing() {
    let ok = ingham(&["highfreq", "--dry-run"]);
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("inputs valid"));
    let bad = ingham(&["integral", "--n", "1", "--m", "0", "--T", "-1", "--dry-run"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn config_entries_supply_defaults_and_flags_override() {
    let dir = scratch("config");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"subcommand": "sharpness", "parameters": {"delta": 0.5, "s": 1.5, "N-grid": [32, 64]}, "seed": 3}"#,
    )
    .unwrap();
    let from_file = ingham(&["sharpness", "--config", cfg.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&from_file.stdout);
    assert!(text.contains("# seed: 3"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
    let overridden = ingham(&["sharpness", "--config", cfg.to_str().unwrap(), "--N-grid", "32,64,128"]);
    assert_eq!(String::from_utf8_lossy(&overridden.stdout).lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn config_errors_name_the_problem() {
    let dir = scratch("badcfg");
    std::fs::create_dir_all(&dir).unwrap();
    let broken = dir.join("broken.json");
    std::fs::write(&broken, "{\n  \"subcommand\": \"tails\",\n  \"parameters\": {\"gamma\": }\n}").unwrap();
    let out = ingham(&["run", "--config", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let unknown = dir.join("unknown.json");
    std::fs::write(&unknown, r#"{"subcommand": "tails", "parameters": {"gama": 1}}"#).unwrap();
    let out = ingham(&["run", "--config", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--gama"));
}

#[test]
fn run_acceptance_config_exits_zero() {
    let dir = scratch("acceptance");
    let out =
        ingham(&["run", "--config", &workspace("experiments/acceptance.json"), "--out-dir", dir.to_str().unwrap()]);
    let log = String::from_utf8_lossy(&out.stderr);
    print!("{log}");
    assert_eq!(out.status.code(), Some(0), "{log}");
    assert_eq!(log.lines().filter(|l| l.starts_with("PASS criterion")).count(), 12);
    assert!(dir.join("acceptance.csv").exists());
}
