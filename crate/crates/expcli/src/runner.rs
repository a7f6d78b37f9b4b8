//! Experiment execution and CSV assembly.
//!
//! One run walks `scheme × sweep value`, evaluates the requested metric
//! families on the requested paths, and emits a flat, schema-stable CSV.
//! Row order is deterministic (scheme, then path, then metric, then sweep
//! value), Monte Carlo results are deterministic in the master seed
//! regardless of the worker count, and the output file is written to a
//! temporary sibling and renamed, so a failed run never leaves a partial
//! file behind.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use uavnet::analytic::AnalyticModel;
use uavnet::assoc::AuCase;
use uavnet::mcharness::{estimate_assoc_freq, estimate_coverage, estimate_rate};
use uavnet::netmodel::{db_to_linear, NetworkConfig};
use uavnet::Scheme;

use crate::config::{apply_axis, ExperimentSpec, Metric, SweepAxis};

/// One output record; optional fields stay empty in the CSV.
#[derive(Debug, Clone)]
pub struct Row {
    pub scheme: &'static str,
    pub path: &'static str,
    pub sweep_axis: &'static str,
    /// Empty for rows that do not depend on the sweep value (assoc/rate rows
    /// under a threshold sweep).
    pub sweep_value: Option<f64>,
    pub metric: &'static str,
    pub case: String,
    pub threshold_db: Option<f64>,
    pub value: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub quad_error: Option<f64>,
}

pub const CSV_HEADER: [&str; 11] = [
    "scheme",
    "path",
    "sweep_axis",
    "sweep_value",
    "metric",
    "case",
    "threshold_db",
    "value",
    "ci_low",
    "ci_high",
    "quad_error",
];

/// The configuration actually evaluated at one sweep point for one scheme:
/// the non-cooperative baselines run with the threshold forced to 1.
fn scheme_cfg(spec: &ExperimentSpec, scheme: Scheme, value: f64) -> NetworkConfig {
    let mut cfg = apply_axis(&spec.base, spec.sweep, value);
    cfg.theta = scheme.effective_theta(&cfg);
    cfg
}

/// Runs the whole experiment, returning rows in deterministic order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    let threshold_sweep = spec.sweep == SweepAxis::ThresholdDb;
    // Under a threshold sweep the network is the same at every point.
    let cfg_points: Vec<f64> = if threshold_sweep {
        vec![f64::NAN] // single placeholder point; thresholds carry the sweep
    } else {
        spec.values.clone()
    };
    let thresholds_db: Vec<f64> = if threshold_sweep {
        let mut v = spec.values.clone();
        v.sort_by(f64::total_cmp);
        v
    } else {
        let mut v = spec.thresholds_db.clone();
        v.sort_by(f64::total_cmp);
        v
    };
    let thresholds_lin: Vec<f64> = thresholds_db.iter().map(|&d| db_to_linear(d)).collect();

    for &scheme in &spec.schemes {
        for &point in &cfg_points {
            let sweep_value = if threshold_sweep { None } else { Some(point) };
            let cfg = scheme_cfg(spec, scheme, if threshold_sweep { 0.0 } else { point });

            if spec.path.wants_mc() {
                mc_rows(spec, scheme, &cfg, sweep_value, &thresholds_db, &thresholds_lin, &mut rows)?;
            }
            if spec.path.wants_analytic() {
                if scheme.is_noma() {
                    analytic_rows(spec, scheme, &cfg, sweep_value, &thresholds_db, &thresholds_lin, &mut rows)?;
                } else {
                    eprintln!(
                        "note: no analytic expressions for scheme {}; emitting Monte Carlo rows only",
                        scheme.label()
                    );
                }
            }
        }
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn mc_rows(
    spec: &ExperimentSpec,
    scheme: Scheme,
    cfg: &NetworkConfig,
    sweep_value: Option<f64>,
    thresholds_db: &[f64],
    thresholds_lin: &[f64],
    rows: &mut Vec<Row>,
) -> Result<()> {
    let axis = spec.sweep.label();
    let mk = |metric: &'static str, case: String| Row {
        scheme: scheme.label(),
        path: "mc",
        sweep_axis: axis,
        sweep_value,
        metric,
        case,
        threshold_db: None,
        value: f64::NAN,
        ci_low: None,
        ci_high: None,
        quad_error: None,
    };

    for &metric in &spec.metrics {
        match metric {
            Metric::Assoc => {
                let f = estimate_assoc_freq(cfg, spec.iterations, spec.master_seed)
                    .with_context(|| format!("mc assoc for {}", scheme.label()))?;
                for case in AuCase::ALL {
                    let i = case.index();
                    rows.push(Row {
                        value: f.freq[i],
                        ci_low: Some((f.freq[i] - f.ci[i]).max(0.0)),
                        ci_high: Some((f.freq[i] + f.ci[i]).min(1.0)),
                        ..mk("assoc", case.label().to_string())
                    });
                }
            }
            Metric::Coverage => {
                let cov = estimate_coverage(cfg, scheme, thresholds_lin, spec.iterations, spec.master_seed)
                    .with_context(|| format!("mc coverage for {}", scheme.label()))?;
                for (ti, &tdb) in thresholds_db.iter().enumerate() {
                    let sv = if spec.sweep == SweepAxis::ThresholdDb {
                        Some(tdb)
                    } else {
                        sweep_value
                    };
                    let mut push = |case: String, v: f64, hw: f64| {
                        rows.push(Row {
                            sweep_value: sv,
                            threshold_db: Some(tdb),
                            value: v,
                            ci_low: Some((v - hw).max(0.0)),
                            ci_high: Some((v + hw).min(1.0)),
                            ..mk("coverage", case)
                        })
                    };
                    push("overall_au".into(), cov.overall[ti], cov.overall_ci[ti]);
                    push("tu".into(), cov.tu[ti], cov.tu_ci[ti]);
                    for case in AuCase::ALL {
                        let i = case.index();
                        push(case.label().into(), cov.cond_coverage[i][ti], cov.cond_ci[i][ti]);
                    }
                }
            }
            Metric::Rate => {
                let r = estimate_rate(cfg, scheme, spec.iterations, spec.master_seed)
                    .with_context(|| format!("mc rate for {}", scheme.label()))?;
                for (case, v, hw) in [
                    ("au_noncomp", r.r_u_noncomp, r.ci_u_noncomp),
                    ("au_comp", r.r_u_comp, r.ci_u_comp),
                    ("au_total", r.r_u_total, r.ci_u_total),
                    ("tu", r.r_t, r.ci_t),
                    ("total", r.r_total, r.ci_total),
                ] {
                    rows.push(Row {
                        value: v,
                        ci_low: Some((v - hw).max(0.0)),
                        ci_high: Some(v + hw),
                        ..mk("rate", case.to_string())
                    });
                }
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn analytic_rows(
    spec: &ExperimentSpec,
    scheme: Scheme,
    cfg: &NetworkConfig,
    sweep_value: Option<f64>,
    thresholds_db: &[f64],
    thresholds_lin: &[f64],
    rows: &mut Vec<Row>,
) -> Result<()> {
    let model = AnalyticModel::new(cfg.clone())
        .with_context(|| format!("analytic model for {}", scheme.label()))?;
    let axis = spec.sweep.label();
    let mk = |metric: &'static str, case: String| Row {
        scheme: scheme.label(),
        path: "analytic",
        sweep_axis: axis,
        sweep_value,
        metric,
        case,
        threshold_db: None,
        value: f64::NAN,
        ci_low: None,
        ci_high: None,
        quad_error: None,
    };

    for &metric in &spec.metrics {
        match metric {
            Metric::Assoc => {
                let probs = model.assoc_probs().map_err(anyhow::Error::from)?;
                for case in AuCase::ALL {
                    let q = probs[case.index()];
                    rows.push(Row {
                        value: q.value,
                        quad_error: Some(q.error),
                        ..mk("assoc", case.label().to_string())
                    });
                }
            }
            Metric::Coverage => {
                let assoc = model.assoc_probs().map_err(anyhow::Error::from)?;
                for (ti, &tdb) in thresholds_db.iter().enumerate() {
                    let t = thresholds_lin[ti];
                    let sv = if spec.sweep == SweepAxis::ThresholdDb {
                        Some(tdb)
                    } else {
                        sweep_value
                    };
                    let total = model
                        .coverage_total_au(t)
                        .with_context(|| format!("analytic AU coverage at {tdb} dB"))?;
                    let tu = model
                        .coverage_tu(t)
                        .with_context(|| format!("analytic TU coverage at {tdb} dB"))?;
                    let mut push = |case: String, v: f64, err: f64| {
                        rows.push(Row {
                            sweep_value: sv,
                            threshold_db: Some(tdb),
                            value: v,
                            quad_error: Some(err),
                            ..mk("coverage", case)
                        })
                    };
                    push("overall_au".into(), total.value, total.error);
                    push("tu".into(), tu.value, tu.error);
                    for case in AuCase::ALL {
                        // Vanished cases (e.g. cooperative cases at θ = 1)
                        // have no conditional coverage.
                        if assoc[case.index()].value < 1e-9 {
                            continue;
                        }
                        let q = model
                            .coverage_case(case, t)
                            .with_context(|| format!("analytic {} coverage at {tdb} dB", case.label()))?;
                        push(case.label().into(), q.value, q.error);
                    }
                }
            }
            Metric::Rate => {
                let totals = model.rate_totals().map_err(anyhow::Error::from)?;
                for (case, v) in [
                    ("au_noncomp", totals.r_u_noncomp),
                    ("au_comp", totals.r_u_comp),
                    ("au_total", totals.r_u_total),
                    ("tu", totals.r_t),
                    ("total", totals.r_total),
                ] {
                    rows.push(Row {
                        value: v,
                        quad_error: Some(totals.error),
                        ..mk("rate", case.to_string())
                    });
                }
            }
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => x.to_string(),
        _ => String::new(),
    }
}

/// Serializes rows (RFC-4180, '.' decimal separator, header row).
pub fn to_csv(rows: &[Row]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheme.to_string(),
            r.path.to_string(),
            r.sweep_axis.to_string(),
            fmt_opt(r.sweep_value),
            r.metric.to_string(),
            r.case.clone(),
            fmt_opt(r.threshold_db),
            if r.value.is_finite() { r.value.to_string() } else { String::new() },
            fmt_opt(r.ci_low),
            fmt_opt(r.ci_high),
            fmt_opt(r.quad_error),
        ])?;
    }
    Ok(w.into_inner()?)
}

/// Writes the CSV atomically: everything goes to a temporary sibling which
/// is renamed over the target only after a complete, successful run.
pub fn write_csv(rows: &[Row], out: &Path) -> Result<()> {
    let bytes = to_csv(rows)?;
    let tmp = out.with_extension("csv.tmp");
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() && !parent.exists() {
            bail!("output directory {} does not exist", parent.display());
        }
    }
    fs::write(&tmp, &bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, out).with_context(|| format!("renaming into {}", out.display()))?;
    Ok(())
}
