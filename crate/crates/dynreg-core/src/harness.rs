//! Run orchestration: executing configs, writing artifacts, horizon sweeps,
//! and the stored-report consistency check.
//!
//! Artifacts per run: `trace.csv` (per-round data), `report.json` (metrics,
//! bounds, violations), and `config.json` (the resolved single-run config the
//! trace can be recomputed from). All writes are atomic.

use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::costs::{Drift, Scenario};
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::metrics::{bound_report, BoundReport, ExperimentTrace};
use crate::trace_io;

/// Environment variable adding a global seed offset (CI sharding).
pub const SEED_OFFSET_ENV: &str = "DYNREG_SEED_OFFSET";

pub fn env_seed_offset() -> Result<u64> {
    match std::env::var(SEED_OFFSET_ENV) {
        Err(_) => Ok(0),
        Ok(raw) => raw.parse::<u64>().map_err(|_| {
            Error::config(format!(
                "{SEED_OFFSET_ENV}: expected an unsigned integer, found {raw:?}"
            ))
        }),
    }
}

/// Everything one run produces, in memory.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub scenario: Scenario,
    pub trace: ExperimentTrace,
    pub report: BoundReport,
    /// The single-run config (effective seed baked in) that regenerates the
    /// trace exactly.
    pub resolved_config: ExperimentConfig,
}

/// Executes one seeded run of a config entirely in memory.
pub fn execute(cfg: &ExperimentConfig, seed_offset: u64) -> Result<RunArtifacts> {
    let resolved = cfg.resolve(seed_offset)?;
    let set = &resolved.scenario.spec.set;
    let mut learner = Learner::new(resolved.learner_kind.clone(), resolved.x1.clone(), set)?;

    let mut rounds = Vec::with_capacity(resolved.scenario.costs.len());
    for (i, cost) in resolved.scenario.costs.iter().enumerate() {
        rounds.push(learner.run_round(i + 1, cost, set)?);
    }

    let trace = ExperimentTrace {
        rounds,
        scenario_digest: resolved.scenario_digest.clone(),
        learner_digest: resolved.learner_digest.clone(),
        k_f: resolved.scenario.k_f,
        l_f: resolved.scenario.l_f,
    };
    let report = bound_report(
        &resolved.scenario,
        &resolved.learner_kind,
        &trace,
        resolved.checks,
    );

    let mut resolved_config = cfg.clone();
    resolved_config.scenario.seed = resolved.scenario.spec.seed;
    resolved_config.repetitions = 1;
    resolved_config.output_dir = None;

    Ok(RunArtifacts {
        scenario: resolved.scenario,
        trace,
        report,
        resolved_config,
    })
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub run_dirs: Vec<PathBuf>,
    pub total_violations: usize,
}

/// Runs every repetition of a config and writes artifacts under `out_dir`.
/// Repetition k runs with seed offset (env offset + k); a single repetition
/// writes at the top level, multiple repetitions write under rep_k/.
pub fn run_to_dir(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    dump_minimizers: bool,
) -> Result<RunSummary> {
    let base_offset = env_seed_offset()?;
    let reps = cfg.repetitions.max(1);
    let mut run_dirs = Vec::new();
    let mut total_violations = 0;

    for rep in 0..reps {
        let artifacts = execute(cfg, base_offset.wrapping_add(rep as u64))?;
        let dir = if reps > 1 {
            out_dir.join(format!("rep_{rep}"))
        } else {
            out_dir.to_path_buf()
        };
        write_artifacts(&dir, &artifacts, dump_minimizers)?;
        total_violations += artifacts.report.violations.len();
        run_dirs.push(dir);
    }

    Ok(RunSummary {
        run_dirs,
        total_violations,
    })
}

fn write_artifacts(dir: &Path, artifacts: &RunArtifacts, dump_minimizers: bool) -> Result<()> {
    trace_io::write_trace_csv(&dir.join("trace.csv"), &artifacts.trace)?;
    trace_io::write_report_json(&dir.join("report.json"), &artifacts.report)?;
    let mut config_json =
        serde_json::to_string_pretty(&artifacts.resolved_config).expect("config serializes");
    config_json.push('\n');
    trace_io::atomic_write(&dir.join("config.json"), config_json.as_bytes())?;

    if dump_minimizers {
        let dim = artifacts.scenario.spec.set.dim();
        let mut csv = String::from("round");
        for i in 0..dim {
            csv.push_str(&format!(",x_star_{i}"));
        }
        csv.push('\n');
        for (t, m) in artifacts.scenario.minimizers.iter().enumerate() {
            csv.push_str(&(t + 1).to_string());
            for c in m.coords() {
                csv.push(',');
                csv.push_str(&trace_io::format_f64(*c));
            }
            csv.push('\n');
        }
        trace_io::atomic_write(&dir.join("minimizers.csv"), csv.as_bytes())?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub horizon: usize,
    pub p_star: f64,
    pub s_star: f64,
    pub dynamic_regret: f64,
    pub theorem1_rhs: Option<f64>,
    pub theorem2_rhs: Option<f64>,
    pub ratio_regret_over_p: Option<f64>,
    pub violations: usize,
}

/// Re-runs the base config once per horizon. With `scale_delta_inv_sqrt`,
/// a constant-step drift's delta is rescaled to delta / sqrt(T) per horizon,
/// which keeps the squared path length bounded while the path length grows.
pub fn sweep(
    cfg: &ExperimentConfig,
    horizons: &[usize],
    scale_delta_inv_sqrt: bool,
) -> Result<Vec<SweepRow>> {
    if horizons.is_empty() {
        return Err(Error::config("sweep: at least one horizon is required"));
    }
    let base_offset = env_seed_offset()?;
    let mut rows = Vec::new();
    for &t_len in horizons {
        let mut run_cfg = cfg.clone();
        run_cfg.scenario.horizon = t_len;
        if scale_delta_inv_sqrt {
            match run_cfg.scenario.drift {
                Drift::ConstantStep { delta } => {
                    run_cfg.scenario.drift = Drift::ConstantStep {
                        delta: delta / (t_len as f64).sqrt(),
                    };
                }
                _ => {
                    return Err(Error::config(
                        "sweep: delta scaling requires a constant_step drift",
                    ));
                }
            }
        }
        let artifacts = execute(&run_cfg, base_offset)?;
        let report = &artifacts.report;
        rows.push(SweepRow {
            horizon: t_len,
            p_star: report.p_star,
            s_star: report.s_star,
            dynamic_regret: report.dynamic_regret,
            theorem1_rhs: report.theorem1_rhs,
            theorem2_rhs: report.theorem2_rhs,
            ratio_regret_over_p: (report.p_star > 0.0)
                .then(|| report.dynamic_regret / report.p_star),
            violations: report.violations.len(),
        });
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "T,p_star,s_star,dynamic_regret,theorem1_rhs,theorem2_rhs,ratio_regret_over_p\n",
    );
    let fmt_opt = |v: Option<f64>| v.map(trace_io::format_f64).unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.horizon,
            trace_io::format_f64(r.p_star),
            trace_io::format_f64(r.s_star),
            trace_io::format_f64(r.dynamic_regret),
            fmt_opt(r.theorem1_rhs),
            fmt_opt(r.theorem2_rhs),
            fmt_opt(r.ratio_regret_over_p),
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Stored-report verification
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum ReportCheck {
    Match,
    Mismatch { metric: String },
}

/// Recomputes the report for a stored trace and compares it byte-for-byte
/// with the stored report.json.
///
/// The sibling config.json regenerates the scenario; every stored per-round
/// quantity is first recomputed from the played actions and checked
/// bit-exactly, so any edited cell is caught and named.
pub fn check_report(trace_path: &Path) -> Result<ReportCheck> {
    let dir = trace_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."))
        .to_path_buf();
    let trace_text = std::fs::read_to_string(trace_path)?;
    let config_text = std::fs::read_to_string(dir.join("config.json"))?;
    let stored_report = std::fs::read(dir.join("report.json"))?;

    let cfg = ExperimentConfig::from_json(&config_text)?;
    let resolved = cfg.resolve(0)?;
    let rounds = trace_io::parse_trace_csv(&trace_text)?;

    if rounds.len() != resolved.scenario.costs.len() {
        return Ok(ReportCheck::Mismatch {
            metric: "horizon".into(),
        });
    }

    // Per-round consistency against the regenerated environment.
    for (i, r) in rounds.iter().enumerate() {
        let cost = &resolved.scenario.costs[i];
        let set = &resolved.scenario.spec.set;
        let mismatch = |metric: &str| {
            Ok(ReportCheck::Mismatch {
                metric: format!("{metric} (round {})", r.t),
            })
        };
        if r.degraded {
            return mismatch("degraded");
        }
        let target = cost.minimizer_projection(set, &r.action)?;
        if target != r.target {
            return mismatch("x_star");
        }
        if cost.eval(&r.action).to_bits() != r.cost_value.to_bits() {
            return mismatch("f_value");
        }
        if cost.eval(&target).to_bits() != r.min_value.to_bits() {
            return mismatch("f_min");
        }
        if r.action.dist(&target).to_bits() != r.dist_before.to_bits() {
            return mismatch("dist_before");
        }
        if cost.gradient(&target).norm().to_bits() != r.grad_at_min_norm.to_bits() {
            return mismatch("grad_at_min_norm");
        }
        if i + 1 < rounds.len() {
            let next_action = &rounds[i + 1].action;
            if next_action.dist(&target).to_bits() != r.dist_after.to_bits() {
                return mismatch("dist_after");
            }
        }
    }

    let trace = ExperimentTrace {
        rounds,
        scenario_digest: resolved.scenario_digest.clone(),
        learner_digest: resolved.learner_digest.clone(),
        k_f: resolved.scenario.k_f,
        l_f: resolved.scenario.l_f,
    };
    let recomputed = bound_report(
        &resolved.scenario,
        &resolved.learner_kind,
        &trace,
        resolved.checks,
    );
    let recomputed_bytes = trace_io::report_to_json(&recomputed).into_bytes();
    if recomputed_bytes == stored_report {
        return Ok(ReportCheck::Match);
    }

    // Name the first differing metric.
    let metric = match (
        serde_json::from_slice::<serde_json::Value>(&stored_report),
        serde_json::from_slice::<serde_json::Value>(&recomputed_bytes),
    ) {
        (Ok(serde_json::Value::Object(stored)), Ok(serde_json::Value::Object(fresh))) => fresh
            .iter()
            .find(|(k, v)| stored.get(*k) != Some(v))
            .map(|(k, _)| k.clone())
            .unwrap_or_else(|| "report.json".into()),
        _ => "report.json".into(),
    };
    Ok(ReportCheck::Mismatch { metric })
}
