//! Browser bindings for interactive runs: a JSON-in / JSON-out surface over
//! the core library, thin enough that the page needs no framework.
//!
//! Build with `wasm-pack build --target web crates/dynreg-wasm` and open
//! `crates/dynreg-wasm/www/index.html` from a static file server.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use dynreg_core::error::Result;
use dynreg_core::harness;
use dynreg_core::learners::{auto_inner_iterations, rho};
use dynreg_core::ExperimentConfig;

#[derive(Serialize)]
struct RoundPayload {
    t: usize,
    x_hat: Vec<f64>,
    x_star: Vec<f64>,
    f_value: f64,
    f_min: f64,
    dist_before: f64,
    dist_after: f64,
    cumulative_regret: f64,
}

#[derive(Serialize)]
struct RunPayload {
    rounds: Vec<RoundPayload>,
    report: dynreg_core::BoundReport,
    /// Effective per-round contraction factor of the configured learner.
    rho_effective: Option<f64>,
    diameter: f64,
}

fn run_payload(config_json: &str) -> Result<String> {
    let cfg = ExperimentConfig::from_json(config_json)?;
    let artifacts = harness::execute(&cfg, 0)?;
    let mut cumulative = 0.0;
    let rounds = artifacts
        .trace
        .rounds
        .iter()
        .map(|r| {
            cumulative += r.cost_value - r.min_value;
            RoundPayload {
                t: r.t,
                x_hat: r.action.coords().to_vec(),
                x_star: r.target.coords().to_vec(),
                f_value: r.cost_value,
                f_min: r.min_value,
                dist_before: r.dist_before,
                dist_after: r.dist_after,
                cumulative_regret: cumulative,
            }
        })
        .collect();
    let payload = RunPayload {
        rounds,
        rho_effective: artifacts.report.rho_used,
        diameter: artifacts.scenario.spec.set.diameter(),
        report: artifacts.report,
    };
    Ok(serde_json::to_string(&payload)?)
}

#[derive(Serialize)]
struct SweepPayload {
    horizons: Vec<usize>,
    p_star: Vec<f64>,
    s_star: Vec<f64>,
    dynamic_regret: Vec<f64>,
    theorem1_rhs: Vec<Option<f64>>,
    theorem2_rhs: Vec<Option<f64>>,
}

fn sweep_payload(config_json: &str, horizons: &[usize], scale_inv_sqrt: bool) -> Result<String> {
    let cfg = ExperimentConfig::from_json(config_json)?;
    let rows = harness::sweep(&cfg, horizons, scale_inv_sqrt)?;
    let payload = SweepPayload {
        horizons: rows.iter().map(|r| r.horizon).collect(),
        p_star: rows.iter().map(|r| r.p_star).collect(),
        s_star: rows.iter().map(|r| r.s_star).collect(),
        dynamic_regret: rows.iter().map(|r| r.dynamic_regret).collect(),
        theorem1_rhs: rows.iter().map(|r| r.theorem1_rhs).collect(),
        theorem2_rhs: rows.iter().map(|r| r.theorem2_rhs).collect(),
    };
    Ok(serde_json::to_string(&payload)?)
}

#[derive(Serialize)]
struct ContractionPayload {
    rho: f64,
    m_auto: usize,
    multi_step_factor: f64,
}

fn contraction_payload(lambda: f64, eta: f64) -> Result<String> {
    let r = rho(lambda, eta)?;
    let m = auto_inner_iterations(lambda, eta)?;
    let payload = ContractionPayload {
        rho: r,
        m_auto: m,
        multi_step_factor: r.powi(m as i32),
    };
    Ok(serde_json::to_string(&payload)?)
}

fn to_js<T>(res: Result<T>) -> std::result::Result<T, JsValue> {
    res.map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Runs one experiment config and returns per-round series plus the report.
#[wasm_bindgen]
pub fn run_experiment(config_json: &str) -> std::result::Result<String, JsValue> {
    to_js(run_payload(config_json))
}

/// Re-runs a config across comma-separated horizons; optionally rescales a
/// constant-step drift to delta / sqrt(T).
#[wasm_bindgen]
pub fn sweep_experiment(
    config_json: &str,
    horizons_csv: &str,
    scale_inv_sqrt: bool,
) -> std::result::Result<String, JsValue> {
    let horizons: std::result::Result<Vec<usize>, _> = horizons_csv
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect();
    let horizons = horizons.map_err(|_| JsValue::from_str("horizons must be integers"))?;
    to_js(sweep_payload(config_json, &horizons, scale_inv_sqrt))
}

/// Contraction factor, auto inner-iteration count, and the resulting
/// multi-step factor for a (lambda, eta) pair.
#[wasm_bindgen]
pub fn contraction_info(lambda: f64, eta: f64) -> std::result::Result<String, JsValue> {
    to_js(contraction_payload(lambda, eta))
}
