use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use holoblock::app::{self, Budget, RunConfig, Suite};
use holoblock::{Error, Result};

#[derive(Parser)]
#[command(name = "holoblock", version, about = "Boundedness and compactness checks for weighted composition operators on the unit ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, env = "HOLOBLOCK_WORKERS")]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BudgetArg {
    Smoke,
    Standard,
    Deep,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Geometry,
    Moments,
    Norms,
    Witnesses,
    Criteria,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// F(p,q,s) to Bloch-type verdicts for the configured symbols.
    Analyze(Common),
    /// Bloch-type to Bloch-type verdicts (needs a `bloch` block).
    Bloch(Common),
    /// One analysis per point of the configured parameter grid.
    Sweep(Common),
    /// Run the built-in property suites.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, value_enum, default_value = "smoke")]
        budget: BudgetArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "HOLOBLOCK_WORKERS")]
        workers: Option<usize>,
    },
}

fn load(common: &Common) -> Result<RunConfig> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Error::Config { path: common.config.display().to_string(), message: e.to_string() })?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(seed) = common.seed {
        cfg.set_seed(seed);
    }
    if let Some(w) = common.workers {
        if w == 0 {
            return Err(Error::Config { path: "--workers".into(), message: "must be >= 1".into() });
        }
        cfg.workers = Some(w);
    }
    Ok(cfg)
}

fn print_verdict(report: &serde_json::Value, path: &Path) {
    println!(
        "regime={} bounded={} compact={} sup_Q={} report={}",
        report["verdict"]["regime"].as_str().unwrap_or("?"),
        report["verdict"]["bounded"].as_str().unwrap_or("?"),
        report["verdict"]["compact"].as_str().unwrap_or("?"),
        report["sup"]["q"],
        path.display(),
    );
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Analyze(common) => {
            let cfg = load(&common)?;
            let report = app::cmd_analyze(&cfg, &common.out)?;
            print_verdict(&report, &common.out.join(&cfg.outputs.report));
            Ok(true)
        }
        Command::Bloch(common) => {
            let cfg = load(&common)?;
            let report = app::cmd_bloch(&cfg, &common.out)?;
            print_verdict(&report, &common.out.join(&cfg.outputs.report));
            Ok(true)
        }
        Command::Sweep(common) => {
            let cfg = load(&common)?;
            let summary = app::cmd_sweep(&cfg, &common.out)?;
            for r in &summary.rows {
                let mark = match (r.regime_transition, r.verdict_flip) {
                    (true, true) => " <- regime change, verdict flip",
                    (true, false) => " <- regime change",
                    (false, true) => " <- verdict flip",
                    _ => "",
                };
                println!(
                    "{:03} p={} q={} s={} alpha={} k={:.4} {} bounded={} compact={}{mark}",
                    r.index, r.p, r.q, r.s, r.alpha, r.k, r.regime, r.bounded, r.compact
                );
            }
            println!("{} points, {} skipped", summary.rows.len(), summary.skipped.len());
            Ok(true)
        }
        Command::Verify { suite, budget, seed, out, workers } => {
            let suite = match suite {
                SuiteArg::Geometry => Suite::Geometry,
                SuiteArg::Moments => Suite::Moments,
                SuiteArg::Norms => Suite::Norms,
                SuiteArg::Witnesses => Suite::Witnesses,
                SuiteArg::Criteria => Suite::Criteria,
                SuiteArg::All => Suite::All,
            };
            let budget = match budget {
                BudgetArg::Smoke => Budget::Smoke,
                BudgetArg::Standard => Budget::Standard,
                BudgetArg::Deep => Budget::Deep,
            };
            if workers == Some(0) {
                return Err(Error::Config { path: "--workers".into(), message: "must be >= 1".into() });
            }
            let report = app::cmd_verify(suite, budget, seed, workers, out.as_deref())?;
            for c in &report.checks {
                println!(
                    "{} {}/{} measured={:e} threshold={:e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.suite,
                    c.name,
                    c.measured,
                    c.threshold
                );
                if !c.passed {
                    eprintln!("  failing case: {}", c.details);
                }
            }
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {failed} failed, {} ms", report.checks.len(), report.runtime.elapsed_ms);
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::SelfMapRejected { point, .. } = &e {
                eprintln!("witness point: {point:?}");
            }
            ExitCode::from(app::exit_code(&e) as u8)
        }
    }
}
