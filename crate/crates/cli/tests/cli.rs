use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qhlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhlab")).args(args).output().expect("binary runs")
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn strip_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with("\"generated_at\"")).collect::<Vec<_>>().join("\n")
}

const SMALL_BALL: &str = r#"
seed = 5
mesh = 0.1
[[scenario]]
name = "run_invariant_suites"
domain = { kind = "ball", center = [0.0, 0.0], radius = 1.0 }
invariants = { probes = 20, partners = 20, quadruples = 2000, delta_budget = 20000 }
"#;

#[test]
fn list_is_sorted_and_complete() {
    let o = qhlab(&["list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert!(names.contains(&"run_diam_lemma") && names.contains(&"run_three_point_necessity"));
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn ball_config_runs_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = config_path("ball_invariants.cfg");
    let o = qhlab(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--mesh", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(out.join("run_invariant_suites.json").is_file());
    let csv = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(csv.starts_with("scenario,check,computed,bound,pass\n"));
    assert!(csv.lines().count() > 1);
}

#[test]
fn negative_mesh_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "seed = 1\nmesh = -1\n[[scenario]]\nname = \"run_diam_lemma\"\n");
    let o = qhlab(&["run", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mesh"));
    let o = qhlab(&["run", &config_path("ball_invariants.cfg").to_string_lossy(), "--mesh", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_keys_and_missing_seed_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "seed = 1\nspeed = 2\n[[scenario]]\nname = \"run_diam_lemma\"\n");
    let o = qhlab(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("speed"));
    let cfg = write_config(dir.path(), "[[scenario]]\nname = \"run_diam_lemma\"\n");
    let o = qhlab(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
}

#[test]
fn counterexamples_write_three_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = qhlab(&["run", &config_path("counterexamples.cfg").to_string_lossy(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let reports = std::fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "json")).count();
    assert_eq!(reports, 3);
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL_BALL}[scenario.tolerances]\nk_ge_j = -1.0\n"));
    let o = qhlab(&["run", &cfg, "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn reruns_are_identical_apart_from_the_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_BALL);
    let mut docs = Vec::new();
    for (k, jobs) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("out{k}"));
        let o = qhlab(&["run", &cfg, "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert_eq!(o.status.code(), Some(0));
        docs.push(std::fs::read_to_string(out.join("run_invariant_suites.json")).unwrap());
    }
    assert_eq!(strip_timestamp(&docs[0]), strip_timestamp(&docs[1]));
    let v: serde_json::Value = serde_json::from_str(&docs[0]).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!(v["generated_at"].is_u64());
    assert_eq!(v["scenario"]["name"], "run_invariant_suites");
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_BALL);
    let out = dir.path().join("out");
    let o = qhlab(&["run", &cfg, "--out", out.to_str().unwrap(), "--seed", "99"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("run_invariant_suites.json")).unwrap()).unwrap();
    assert_eq!(v["scenario"]["bindings"]["seed"], "99");
}
