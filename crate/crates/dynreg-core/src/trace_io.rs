//! Trace and report serialization.
//!
//! trace.csv carries one row per round with coordinates expanded per
//! dimension. Floats are written in scientific notation with 17 significant
//! digits, which round-trips every f64 exactly, so identical runs produce
//! byte-identical files and every derived metric is recomputable offline.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::learners::RoundOutcome;
use crate::metrics::{BoundReport, ExperimentTrace};

/// 17 significant digits: exact round-trip for f64.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes bytes through a temp file in the same directory, then renames.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into())
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn trace_header(dim: usize) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend((0..dim).map(|i| format!("x_hat_{i}")));
    cols.extend((0..dim).map(|i| format!("x_star_{i}")));
    cols.extend(
        [
            "f_value",
            "f_min",
            "dist_before",
            "dist_after",
            "grad_at_min_norm",
            "degraded",
        ]
        .map(str::to_string),
    );
    cols.join(",")
}

pub fn trace_to_csv(trace: &ExperimentTrace) -> String {
    let dim = trace.dim();
    let mut out = String::new();
    out.push_str(&trace_header(dim));
    out.push('\n');
    for r in &trace.rounds {
        let mut cols = vec![r.t.to_string()];
        cols.extend(r.action.coords().iter().map(|c| format_f64(*c)));
        cols.extend(r.target.coords().iter().map(|c| format_f64(*c)));
        cols.push(format_f64(r.cost_value));
        cols.push(format_f64(r.min_value));
        cols.push(format_f64(r.dist_before));
        cols.push(format_f64(r.dist_after));
        cols.push(format_f64(r.grad_at_min_norm));
        cols.push(if r.degraded { "1" } else { "0" }.to_string());
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

pub fn write_trace_csv(path: &Path, trace: &ExperimentTrace) -> Result<()> {
    atomic_write(path, trace_to_csv(trace).as_bytes())
}

/// Parses rounds back from a trace.csv. The scenario-level constants are not
/// stored in the CSV; the caller reattaches them.
pub fn parse_trace_csv(text: &str) -> Result<Vec<RoundOutcome>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::TraceFormat("empty trace file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let fixed = 6; // f_value .. degraded
    if cols.len() < 1 + 2 + fixed || !(cols.len() - 1 - fixed).is_multiple_of(2) {
        return Err(Error::TraceFormat(format!(
            "unexpected column count {}",
            cols.len()
        )));
    }
    let dim = (cols.len() - 1 - fixed) / 2;
    let expected_header = trace_header(dim);
    if header != expected_header {
        return Err(Error::TraceFormat(format!(
            "unexpected header {header:?}"
        )));
    }

    let parse_field = |s: &str, what: &str, line_no: usize| -> Result<f64> {
        s.parse::<f64>().map_err(|_| {
            Error::TraceFormat(format!("line {line_no}: bad {what} value {s:?}"))
        })
    };

    let mut rounds = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let line_no = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::TraceFormat(format!(
                "line {line_no}: expected {} fields, found {}",
                cols.len(),
                fields.len()
            )));
        }
        let t: usize = fields[0].parse().map_err(|_| {
            Error::TraceFormat(format!("line {line_no}: bad round index {:?}", fields[0]))
        })?;
        if t != rounds.len() + 1 {
            return Err(Error::TraceFormat(format!(
                "line {line_no}: rounds must be contiguous from 1, found {t}"
            )));
        }
        let mut vals = Vec::with_capacity(2 * dim);
        for f in &fields[1..1 + 2 * dim] {
            vals.push(parse_field(f, "coordinate", line_no)?);
        }
        let action = Point::new(vals[..dim].to_vec())
            .map_err(|e| Error::TraceFormat(format!("line {line_no}: {e}")))?;
        let target = Point::new(vals[dim..].to_vec())
            .map_err(|e| Error::TraceFormat(format!("line {line_no}: {e}")))?;
        let base = 1 + 2 * dim;
        let degraded = match fields[base + 5] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::TraceFormat(format!(
                    "line {line_no}: bad degraded flag {other:?}"
                )))
            }
        };
        rounds.push(RoundOutcome {
            t,
            action,
            target,
            cost_value: parse_field(fields[base], "f_value", line_no)?,
            min_value: parse_field(fields[base + 1], "f_min", line_no)?,
            dist_before: parse_field(fields[base + 2], "dist_before", line_no)?,
            dist_after: parse_field(fields[base + 3], "dist_after", line_no)?,
            grad_at_min_norm: parse_field(fields[base + 4], "grad_at_min_norm", line_no)?,
            degraded,
        });
    }
    if rounds.is_empty() {
        return Err(Error::TraceFormat("trace has no rounds".into()));
    }
    Ok(rounds)
}

pub fn report_to_json(report: &BoundReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_report_json(path: &Path, report: &BoundReport) -> Result<()> {
    atomic_write(path, report_to_json(report).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_formatting_round_trips() {
        for v in [
            0.0,
            1.0,
            -1.0,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02e23,
            -7.2e-31,
            f64::MIN_POSITIVE,
        ] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn trace_round_trips_through_csv() {
        let rounds = vec![
            RoundOutcome {
                t: 1,
                action: Point::new(vec![0.1, -0.2]).unwrap(),
                target: Point::new(vec![1.0 / 3.0, 0.0]).unwrap(),
                cost_value: 0.5,
                min_value: 0.125,
                dist_before: 0.3,
                dist_after: 0.2121320343559643,
                grad_at_min_norm: 0.0,
                degraded: false,
            },
            RoundOutcome {
                t: 2,
                action: Point::new(vec![0.3, 0.4]).unwrap(),
                target: Point::new(vec![0.25, 0.5]).unwrap(),
                cost_value: 0.25,
                min_value: 0.0,
                dist_before: 0.1,
                dist_after: 0.05,
                grad_at_min_norm: 1e-17,
                degraded: true,
            },
        ];
        let trace = ExperimentTrace {
            rounds: rounds.clone(),
            scenario_digest: "s".into(),
            learner_digest: "l".into(),
            k_f: 1.0,
            l_f: None,
        };
        let csv = trace_to_csv(&trace);
        let parsed = parse_trace_csv(&csv).unwrap();
        assert_eq!(parsed, rounds);
    }

    #[test]
    fn rejects_gapped_round_indices() {
        let trace = "t,x_hat_0,x_star_0,f_value,f_min,dist_before,dist_after,grad_at_min_norm,degraded\n\
                     2,0e0,0e0,0e0,0e0,0e0,0e0,0e0,0\n";
        assert!(parse_trace_csv(trace).is_err());
    }
}
