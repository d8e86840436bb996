use std::path::Path;
use std::process::{Command, Output};

const IDENTITY: &str = r#"{
  "version": 1,
  "seed": 5,
  "symbols": {"phi": {"components": [{"kind": "coord", "index": 1}]}},
  "params": {"n": 1, "p": "2", "q": "0", "s": "1", "alpha": "1"},
  "sampler": {"per_shell": 64}
}"#;

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_holoblock"));
    cmd.args(args).env_remove("HOLOBLOCK_WORKERS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_identity_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", IDENTITY);
    let out = dir.path().join("out");
    let res = run(&["analyze", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["verdict"]["bounded"], "yes");
    assert!((report["sup"]["q"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(report["evidence"]["boundedness"]["verdict"], "yes");
    let csv = std::fs::read_to_string(out.join("samples.csv")).unwrap();
    assert!(csv.starts_with("w1_re,w1_im,abs_phi,Q,D,shell_index\n"));
}

#[test]
fn csv_is_reproducible_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", IDENTITY);
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}"));
        let res = run(&["analyze", "--config", &cfg, "--out", out.to_str().unwrap()], &[("HOLOBLOCK_WORKERS", workers)]);
        assert_eq!(res.status.code(), Some(0));
        assert_eq!(read_json(&out.join("report.json"))["runtime"]["workers"], workers.parse::<u64>().unwrap());
        outputs.push(std::fs::read(out.join("samples.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", IDENTITY);
    let out = dir.path().join("out");
    let res = run(&["analyze", "--config", &cfg, "--seed", "99", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(0));
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["seed"], 99);
    assert_eq!(report["config"]["seed"], 99);
}

#[test]
fn malformed_exponent_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", &IDENTITY.replace(r#""p": "2""#, r#""p": "2.x""#));
    let res = run(&["analyze", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("$.params.p"));
}

#[test]
fn syntax_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", "{\n  \"version\": 1,\n  \"seed\": \n}");
    let res = run(&["analyze", "--config", &cfg], &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 4"));
}

#[test]
fn rejected_self_map_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let text = IDENTITY.replace(
        r#"{"kind": "coord", "index": 1}"#,
        r#"{"kind": "prod", "factors": [{"kind": "const", "value": [2, 0]}, {"kind": "coord", "index": 1}]}"#,
    );
    let cfg = write(dir.path(), "cfg.json", &text);
    let res = run(&["analyze", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("witness point"));
}

#[test]
fn empty_sweep_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let text = IDENTITY.replace(
        r#""sampler""#,
        r#""sweep": {"p": [], "q": ["0"], "s": ["1"], "alpha": ["1"]}, "sampler""#,
    );
    let cfg = write(dir.path(), "cfg.json", &text);
    let out = dir.path().join("sweep");
    let res = run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let summary = read_json(&out.join("summary.json"));
    assert_eq!(summary["rows"].as_array().unwrap().len(), 0);
}

#[test]
fn sweep_marks_the_alpha_flip() {
    let dir = tempfile::tempdir().unwrap();
    let text = IDENTITY.replace(
        r#""sampler""#,
        r#""sweep": {"p": ["2"], "q": ["0"], "s": ["1"], "alpha": ["0.5", "1", "1.5"]}, "sampler""#,
    );
    let cfg = write(dir.path(), "cfg.json", &text);
    let out = dir.path().join("sweep");
    let res = run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(0));
    let summary = read_json(&out.join("summary.json"));
    let rows = summary["rows"].as_array().unwrap();
    let bounded: Vec<&str> = rows.iter().map(|r| r["bounded"].as_str().unwrap()).collect();
    assert_eq!(bounded, ["no", "yes", "yes"]);
    assert_eq!(rows[1]["verdict_flip"], true);
    assert!(String::from_utf8_lossy(&res.stdout).contains("verdict flip"));
}

#[test]
fn bloch_requires_its_block() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", IDENTITY);
    let res = run(&["bloch", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("$.bloch"));
}

#[test]
fn bloch_contraction_is_compact() {
    let dir = tempfile::tempdir().unwrap();
    let text = IDENTITY
        .replace(
            r#"{"kind": "coord", "index": 1}"#,
            r#"{"kind": "prod", "factors": [{"kind": "const", "value": [0.5, 0]}, {"kind": "coord", "index": 1}]}"#,
        )
        .replace(r#""sampler""#, r#""bloch": {"p_prime": "1", "q_prime": "1"}, "sampler""#);
    let cfg = write(dir.path(), "cfg.json", &text);
    let res = run(&["bloch", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(0));
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["verdict"]["compact"], "yes");
    let tags = report["evidence"]["compactness"]["tags"].as_array().unwrap();
    assert!(tags.iter().any(|t| t == "vacuous-boundary"));
}

#[test]
fn verify_geometry_passes() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&["verify", "--suite", "geometry", "--budget", "smoke", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stdout));
    let report = read_json(&dir.path().join("verify.json"));
    assert_eq!(report["passed"], true);
    assert!(report["checks"].as_array().unwrap().len() >= 12);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let res = run(&["verify", "--suite", "nope"], &[]);
    assert_eq!(res.status.code(), Some(2));
}
