//! `dynreg`: run seeded online-optimization experiments, sweep horizons,
//! verify stored reports, and exercise the property suite.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 assertion violation or
//! stored-report mismatch.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dynreg_core::harness::{self, ReportCheck};
use dynreg_core::selftest::run_selftest;
use dynreg_core::ExperimentConfig;

#[derive(Parser)]
#[command(name = "dynreg", version, about = "Dynamic-regret benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one config: writes trace.csv, report.json, config.json.
    Run {
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Also write the true minimizer sequence as minimizers.csv.
        #[arg(long)]
        dump_minimizers: bool,
    },
    /// Re-run a config across horizons and write sweep.csv.
    Sweep {
        config: PathBuf,
        /// Comma-separated horizons, e.g. 100,1000,10000.
        #[arg(long, value_delimiter = ',', required = true)]
        horizons: Vec<usize>,
        /// Rescale a constant-step drift to delta / sqrt(T) per horizon.
        #[arg(long)]
        scale_delta_inv_sqrt_t: bool,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run the named property suite.
    Selftest,
    /// Recompute the report for a stored trace and compare it byte-exactly.
    Report { trace: PathBuf },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            output_dir,
            dump_minimizers,
        } => {
            let cfg = load_config(&config)?;
            let out = output_dir
                .or_else(|| cfg.output_dir.clone().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("runs").join(&cfg.scenario.name));
            let summary = harness::run_to_dir(&cfg, &out, dump_minimizers)?;
            for dir in &summary.run_dirs {
                println!("wrote {}", dir.join("trace.csv").display());
            }
            if summary.total_violations > 0 {
                eprintln!(
                    "{} assertion violation(s); see report.json",
                    summary.total_violations
                );
                return Ok(ExitCode::from(2));
            }
            println!("all enabled assertions hold");
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            config,
            horizons,
            scale_delta_inv_sqrt_t,
            output_dir,
        } => {
            let cfg = load_config(&config)?;
            let rows = harness::sweep(&cfg, &horizons, scale_delta_inv_sqrt_t)?;
            let out = output_dir
                .or_else(|| cfg.output_dir.clone().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("runs").join(&cfg.scenario.name));
            let csv = harness::sweep_csv(&rows);
            dynreg_core::trace_io::atomic_write(&out.join("sweep.csv"), csv.as_bytes())?;
            print!("{csv}");
            println!("wrote {}", out.join("sweep.csv").display());
            let violations: usize = rows.iter().map(|r| r.violations).sum();
            if violations > 0 {
                eprintln!("{violations} assertion violation(s) across horizons");
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest => {
            let results = run_selftest();
            let mut all_passed = true;
            for r in &results {
                println!(
                    "{} {:<40} worst_slack={:>12.3e}  {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.worst_slack,
                    r.detail
                );
                all_passed &= r.passed;
            }
            println!(
                "{} properties, {} passed",
                results.len(),
                results.iter().filter(|r| r.passed).count()
            );
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Report { trace } => match harness::check_report(&trace)? {
            ReportCheck::Match => {
                println!("report.json matches the trace byte-for-byte");
                Ok(ExitCode::SUCCESS)
            }
            ReportCheck::Mismatch { metric } => {
                eprintln!("mismatch in {metric}");
                Ok(ExitCode::from(2))
            }
        },
    }
}

fn load_config(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
    ExperimentConfig::from_json(&text)
        .map_err(|e| anyhow::anyhow!("in {}: {e}", path.display()))
}
