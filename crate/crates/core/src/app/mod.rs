//! Batch commands behind the `holoblock` binary: analyze, bloch, sweep and
//! verify. Each writes JSON reports (and CSV sample dumps) into an output
//! directory.

pub mod config;
pub mod verify;

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::criteria::{analyze, bloch_to_bloch_verdict, Analysis, CriterionSample};
use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::spaces::SpaceParams;
use crate::symbols::{SelfMapValidation, SymbolPair};

pub use config::RunConfig;
pub use verify::{Budget, CheckOutcome, Suite};

pub const REPORT_VERSION: u64 = 1;
pub const TOOL_NAME: &str = "holoblock";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs `f` on a pool of `workers` threads (the global pool if `None`).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Process exit status for an error: 2 for bad input, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::Json(_) | Error::Symbol { .. } | Error::InvalidParams(_) => 2,
        _ => 1,
    }
}

/// Fixed CSV layout: `w` as `2n` floats, then `abs_phi, Q, D, shell_index`.
pub fn csv_header(n: usize) -> Vec<String> {
    let mut h = Vec::with_capacity(2 * n + 4);
    for i in 1..=n {
        h.push(format!("w{i}_re"));
        h.push(format!("w{i}_im"));
    }
    h.extend(["abs_phi", "Q", "D", "shell_index"].map(String::from));
    h
}

/// Writes samples with shortest round-trip float formatting.
pub fn write_samples_csv(path: &Path, n: usize, samples: &[CriterionSample]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(csv_header(n))?;
    for s in samples {
        let mut row: Vec<String> = Vec::with_capacity(2 * n + 4);
        for z in s.w.iter() {
            row.push(format!("{:?}", z.re));
            row.push(format!("{:?}", z.im));
        }
        row.push(format!("{:?}", s.phi_norm));
        row.push(format!("{:?}", s.q));
        row.push(format!("{:?}", s.d));
        row.push(s.shell_index.to_string());
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub workers: usize,
    pub elapsed_ms: u128,
}

fn runtime(workers: Option<usize>, started: Instant) -> Runtime {
    Runtime {
        workers: workers.unwrap_or_else(rayon::current_num_threads),
        elapsed_ms: started.elapsed().as_millis(),
    }
}

fn space_echo(params: &SpaceParams) -> Value {
    let [p, q, s, alpha] = params.decimal_strings();
    json!({
        "n": params.n, "p": p, "q": q, "s": s, "alpha": alpha,
        "k": params.k(), "regime": params.regime().label(), "exact": params.is_exact(),
    })
}

fn analysis_report(command: &str, cfg: &RunConfig, space: Value, validation: &SelfMapValidation, a: &Analysis, csv: &str) -> Value {
    json!({
        "report_version": REPORT_VERSION,
        "tool": {"name": TOOL_NAME, "version": TOOL_VERSION},
        "command": command,
        "seed": cfg.seed,
        "config": cfg.raw,
        "space": space,
        "exponents": a.profile.exponents,
        "sampler": cfg.sampler,
        "policy": a.policy,
        "self_map": validation,
        "verdict": {
            "regime": a.verdict.regime.label(),
            "bounded": a.verdict.bounded.verdict,
            "compact": a.verdict.compact.verdict,
        },
        "evidence": {
            "boundedness": a.verdict.bounded,
            "compactness": a.verdict.compact,
        },
        "sup": {
            "q": a.profile.sup_q,
            "d": a.profile.sup_d,
            "phi_norm": a.profile.sup_phi_norm,
            "argmax_q": a.profile.argmax_q,
        },
        "shells": a.profile.shells,
        "bins": a.profile.bins,
        "csv": csv,
    })
}

/// Checks that a report carries every verdict together with its evidence.
pub fn validate_report(report: &Value) -> Result<()> {
    let need = |path: &str| -> Result<&Value> {
        report
            .pointer(path)
            .filter(|v| !v.is_null())
            .ok_or_else(|| Error::InvalidArgument(format!("report is missing {path}")))
    };
    for path in [
        "/report_version",
        "/tool/version",
        "/seed",
        "/config",
        "/policy",
        "/sampler",
        "/exponents",
        "/self_map",
        "/sup/q",
        "/shells",
        "/runtime/elapsed_ms",
    ] {
        need(path)?;
    }
    for (verdict, evidence) in [("bounded", "boundedness"), ("compact", "compactness")] {
        let v = need(&format!("/verdict/{verdict}"))?;
        let e = need(&format!("/evidence/{evidence}/verdict"))?;
        if v != e {
            return Err(Error::InvalidArgument(format!("{verdict} verdict disagrees with its evidence block")));
        }
    }
    Ok(())
}

fn validated_pair(cfg: &RunConfig) -> Result<(SymbolPair, SelfMapValidation)> {
    let mut pair = cfg.pair.clone();
    let validation = pair.phi.validate(cfg.sampler.validation_samples, cfg.seed)?;
    Ok((pair, validation))
}

fn finish_analysis(command: &str, cfg: &RunConfig, space: Value, out_dir: &Path, run: impl FnOnce(&SymbolPair) -> Result<Analysis> + Send) -> Result<Value> {
    let started = Instant::now();
    std::fs::create_dir_all(out_dir)?;
    let (pair, validation) = validated_pair(cfg)?;
    let analysis = with_workers(cfg.workers, || run(&pair))??;
    write_samples_csv(&out_dir.join(&cfg.outputs.csv), cfg.n, &analysis.profile.samples)?;
    let mut report = analysis_report(command, cfg, space, &validation, &analysis, &cfg.outputs.csv);
    report["runtime"] = serde_json::to_value(runtime(cfg.workers, started))?;
    validate_report(&report)?;
    write_json(&out_dir.join(&cfg.outputs.report), &report)?;
    Ok(report)
}

/// `F(p, q, s) → β^α` verdicts for the configured symbols.
pub fn cmd_analyze(cfg: &RunConfig, out_dir: &Path) -> Result<Value> {
    let params = cfg.require_params()?;
    let profile = cfg.sampler.profile(cfg.seed);
    finish_analysis("analyze", cfg, space_echo(&params), out_dir, |pair| analyze(pair, &params, &profile, &cfg.policy))
}

/// `β^{p'} → β^{q'}` verdicts.
pub fn cmd_bloch(cfg: &RunConfig, out_dir: &Path) -> Result<Value> {
    let bloch = cfg
        .bloch
        .as_ref()
        .ok_or_else(|| Error::config("$.bloch", "missing field"))?;
    let (pp, qp) = (bloch.p_prime.to_f64(), bloch.q_prime.to_f64());
    let space = json!({"n": cfg.n, "p_prime": bloch.p_prime, "q_prime": bloch.q_prime});
    let profile = cfg.sampler.profile(cfg.seed);
    finish_analysis("bloch", cfg, space, out_dir, |pair| bloch_to_bloch_verdict(pair, pp, qp, &profile, &cfg.policy))
        .map_err(|e| match e {
            Error::InvalidParams(m) => Error::config("$.bloch", m),
            other => other,
        })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub p: String,
    pub q: String,
    pub s: String,
    pub alpha: String,
    pub k: f64,
    pub regime: String,
    pub bounded: String,
    pub compact: String,
    pub sup_q: f64,
    /// Regime differs from the previous valid point.
    pub regime_transition: bool,
    /// Boundedness differs from the previous valid point.
    pub verdict_flip: bool,
    pub report: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub report_version: u64,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<Value>,
    /// Verdict counts per regime label.
    pub by_regime: Value,
    pub runtime: Runtime,
}

fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

/// One analysis per grid point plus `summary.json` and `summary.csv`.
pub fn cmd_sweep(cfg: &RunConfig, out_dir: &Path) -> Result<SweepSummary> {
    let started = Instant::now();
    std::fs::create_dir_all(out_dir)?;
    let grid = cfg.sweep.clone().unwrap_or_default();
    let (pair, validation) = validated_pair(cfg)?;
    let profile = cfg.sampler.profile(cfg.seed);
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut skipped = Vec::new();
    let mut tallies = serde_json::Map::new();
    for (index, [p, q, s, alpha]) in grid.points().into_iter().enumerate() {
        let point = json!({"index": index, "p": p, "q": q, "s": s, "alpha": alpha});
        let params = match SpaceParams::from_decimals(cfg.n, p.clone(), q.clone(), s.clone(), alpha.clone()) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("warning: skipping grid point {index}: {e}");
                skipped.push(json!({"point": point, "reason": e.to_string()}));
                continue;
            }
        };
        let analysis = with_workers(cfg.workers, || analyze(&pair, &params, &profile, &cfg.policy))??;
        let name = format!("point_{index:03}");
        let csv = format!("{name}.csv");
        write_samples_csv(&out_dir.join(&csv), cfg.n, &analysis.profile.samples)?;
        let mut report = analysis_report("sweep", cfg, space_echo(&params), &validation, &analysis, &csv);
        report["runtime"] = serde_json::to_value(runtime(cfg.workers, started))?;
        write_json(&out_dir.join(format!("{name}.json")), &report)?;

        let regime = params.regime().label().to_string();
        let bounded = label(&analysis.verdict.bounded.verdict);
        let compact = label(&analysis.verdict.compact.verdict);
        let prev = rows.last();
        let regime_transition = prev.is_some_and(|r| r.regime != regime);
        let verdict_flip = prev.is_some_and(|r| r.bounded != bounded);
        let tally = tallies
            .entry(regime.clone())
            .or_insert_with(|| json!({"points": 0, "bounded": {}, "compact": {}}));
        tally["points"] = json!(tally["points"].as_u64().unwrap_or(0) + 1);
        for (key, val) in [("bounded", &bounded), ("compact", &compact)] {
            let count = tally[key][val.as_str()].as_u64().unwrap_or(0) + 1;
            tally[key][val.as_str()] = json!(count);
        }
        let [ps, qs, ss, als] = params.decimal_strings();
        rows.push(SweepRow {
            index,
            p: ps,
            q: qs,
            s: ss,
            alpha: als,
            k: params.k(),
            regime,
            bounded,
            compact,
            sup_q: analysis.profile.sup_q,
            regime_transition,
            verdict_flip,
            report: format!("{name}.json"),
        });
    }
    let summary = SweepSummary {
        report_version: REPORT_VERSION,
        seed: cfg.seed,
        rows,
        skipped,
        by_regime: Value::Object(tallies),
        runtime: runtime(cfg.workers, started),
    };
    let mut wtr = csv::Writer::from_path(out_dir.join("summary.csv"))?;
    wtr.write_record([
        "index", "p", "q", "s", "alpha", "k", "regime", "bounded", "compact", "sup_q", "regime_transition", "verdict_flip",
    ])?;
    for r in &summary.rows {
        wtr.write_record([
            r.index.to_string(),
            r.p.clone(),
            r.q.clone(),
            r.s.clone(),
            r.alpha.clone(),
            format!("{:?}", r.k),
            r.regime.clone(),
            r.bounded.clone(),
            r.compact.clone(),
            format!("{:?}", r.sup_q),
            r.regime_transition.to_string(),
            r.verdict_flip.to_string(),
        ])?;
    }
    wtr.flush()?;
    write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub report_version: u64,
    pub tool: Value,
    pub suite: Suite,
    pub budget: Budget,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
    pub runtime: Runtime,
}

/// Runs a property suite; `passed` is true iff every check passed.
pub fn cmd_verify(suite: Suite, budget: Budget, seed: u64, workers: Option<usize>, out_dir: Option<&Path>) -> Result<VerifyReport> {
    let started = Instant::now();
    let checks = with_workers(workers, || verify::run_suite(suite, budget, seed))??;
    let report = VerifyReport {
        report_version: REPORT_VERSION,
        tool: json!({"name": TOOL_NAME, "version": TOOL_VERSION}),
        suite,
        budget,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
        runtime: runtime(workers, started),
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        write_json(&dir.join("verify.json"), &report)?;
    }
    Ok(report)
}

/// Parses a decimal command-line value into the config error space.
pub fn parse_decimal_arg(text: &str, name: &str) -> Result<Decimal> {
    Decimal::parse(text).map_err(|e| Error::config(name, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(extra: &str) -> RunConfig {
        let text = format!(
            r#"{{
            "version": 1, "seed": 11,
            "symbols": {{"phi": {{"components": [{{"kind": "coord", "index": 1}}]}}}},
            "params": {{"n": 1, "p": "2", "q": "0", "s": "1", "alpha": "1"}},
            "sampler": {{"per_shell": 64}}{extra}
        }}"#
        );
        RunConfig::parse(&text).unwrap()
    }

    #[test]
    fn analyze_identity_report() {
        let dir = tempfile::tempdir().unwrap();
        let report = cmd_analyze(&config(""), dir.path()).unwrap();
        assert_eq!(report["verdict"]["bounded"], "yes");
        assert!((report["sup"]["q"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        validate_report(&report).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("samples.csv")).unwrap();
        assert!(csv.starts_with("w1_re,w1_im,abs_phi,Q,D,shell_index\n"));
        let mut broken = report.clone();
        broken["evidence"]["compactness"]["verdict"] = json!("bogus");
        assert!(validate_report(&broken).is_err());
    }

    #[test]
    fn rejected_self_map_aborts() {
        let text = r#"{"version": 1, "seed": 1,
            "symbols": {"phi": {"components": [{"kind": "prod", "factors": [{"kind": "const", "value": [1.5, 0]}, {"kind": "coord", "index": 1}]}]}},
            "params": {"n": 1, "p": "2", "q": "0", "s": "1", "alpha": "1"}}"#;
        let cfg = RunConfig::parse(text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let err = cmd_analyze(&cfg, dir.path()).unwrap_err();
        assert!(matches!(err, Error::SelfMapRejected { .. }), "{err}");
        assert_eq!(exit_code(&err), 1);
    }

    #[test]
    fn sweep_flags_flip_and_skips_invalid() {
        let cfg = config(r#", "sweep": {"p": ["2", "-1"], "q": ["0"], "s": ["1"], "alpha": ["0.5", "1", "1.25"]}"#);
        let dir = tempfile::tempdir().unwrap();
        let summary = cmd_sweep(&cfg, dir.path()).unwrap();
        assert_eq!(summary.rows.len(), 3);
        assert_eq!(summary.skipped.len(), 3);
        let bounded: Vec<&str> = summary.rows.iter().map(|r| r.bounded.as_str()).collect();
        assert_eq!(bounded, ["no", "yes", "yes"]);
        assert!(summary.rows[1].verdict_flip);
        assert!(dir.path().join("point_002.json").exists());
        assert!(dir.path().join("summary.csv").exists());
    }

    #[test]
    fn empty_sweep_is_fine() {
        let cfg = config(r#", "sweep": {"p": [], "q": ["0"], "s": ["1"], "alpha": ["1"]}"#);
        let dir = tempfile::tempdir().unwrap();
        let summary = cmd_sweep(&cfg, dir.path()).unwrap();
        assert!(summary.rows.is_empty());
    }

    #[test]
    fn bloch_identity_equal_exponents_not_compact() {
        let cfg = config(r#", "bloch": {"p_prime": "0.5", "q_prime": "0.5"}"#);
        let dir = tempfile::tempdir().unwrap();
        let report = cmd_bloch(&cfg, dir.path()).unwrap();
        assert_eq!(report["verdict"]["bounded"], "yes");
        assert_eq!(report["verdict"]["compact"], "no");
    }
}
