//! Flat key-value experiment configuration.
//!
//! The file format is `key = value` per line with `#` comments. An empty
//! file yields the full default parameter set. Keys carrying a `_db` suffix
//! are converted to linear scale once, at parse time; everything downstream
//! is linear. Unknown keys, malformed values, and constraint violations are
//! reported by name.

use std::fmt;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use uavnet::netmodel::{db_to_linear, linear_to_db, NetworkConfig};
use uavnet::Scheme;

/// Sweep axis of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    ThresholdDb,
    LambdaB,
    HeightU,
    ThetaDb,
    RhoU,
}

impl SweepAxis {
    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::ThresholdDb => "threshold_db",
            SweepAxis::LambdaB => "lambda_b",
            SweepAxis::HeightU => "h_u",
            SweepAxis::ThetaDb => "theta_db",
            SweepAxis::RhoU => "rho_u",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "threshold_db" => SweepAxis::ThresholdDb,
            "lambda_b" => SweepAxis::LambdaB,
            "h_u" => SweepAxis::HeightU,
            "theta_db" => SweepAxis::ThetaDb,
            "rho_u" => SweepAxis::RhoU,
            other => bail!("unknown sweep axis `{other}` (expected threshold_db, lambda_b, h_u, theta_db, or rho_u)"),
        })
    }
}

/// Which computation paths to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathSel {
    Mc,
    Analytic,
    Both,
}

impl PathSel {
    pub fn wants_mc(self) -> bool {
        matches!(self, PathSel::Mc | PathSel::Both)
    }
    pub fn wants_analytic(self) -> bool {
        matches!(self, PathSel::Analytic | PathSel::Both)
    }
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "mc" => PathSel::Mc,
            "analytic" => PathSel::Analytic,
            "both" => PathSel::Both,
            other => bail!("unknown path `{other}` (expected mc, analytic, or both)"),
        })
    }
}

/// Metric families to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Assoc,
    Coverage,
    Rate,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::Assoc => "assoc",
            Metric::Coverage => "coverage",
            Metric::Rate => "rate",
        }
    }
}

/// A fully parsed and validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub base: NetworkConfig,
    pub sweep: SweepAxis,
    /// Sweep values in the axis' native unit (dB for the dB axes).
    pub values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub path: PathSel,
    pub metrics: Vec<Metric>,
    /// Coverage thresholds (dB) used when the sweep axis is not the threshold.
    pub thresholds_db: Vec<f64>,
    pub master_seed: u64,
    pub iterations: u64,
    pub out: PathBuf,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            base: NetworkConfig::default(),
            sweep: SweepAxis::ThresholdDb,
            values: vec![-10.0, -5.0, 0.0, 5.0, 10.0],
            schemes: vec![Scheme::CompNoma],
            path: PathSel::Both,
            metrics: vec![Metric::Assoc, Metric::Coverage],
            thresholds_db: vec![0.0],
            master_seed: 1,
            iterations: NetworkConfig::default().iterations,
            out: PathBuf::from("results.csv"),
        }
    }
}

fn parse_scheme(s: &str) -> Result<Scheme> {
    Ok(match s {
        "comp_noma" => Scheme::CompNoma,
        "comp_oma" => Scheme::CompOma,
        "noma_only" => Scheme::NomaOnly,
        "oma_only" => Scheme::OmaOnly,
        other => bail!("unknown scheme `{other}` (expected comp_noma, comp_oma, noma_only, oma_only, or all)"),
    })
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().with_context(|| format!("key `{key}`: `{v}` is not a number"))
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse::<u64>().with_context(|| format!("key `{key}`: `{v}` is not a nonnegative integer"))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

/// Parses the documented flat key-value schema into a validated spec.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::default();
    // Antenna gains are folded into the link gain constants at the end.
    let mut a_l_db = -35.0;
    let mut a_n_db = -40.0;
    let mut a_t_db = -28.4;
    let mut gain_side_db = 0.0;
    let mut gain_main_db = 0.0;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{line}`", lineno + 1))?;
        let key = key.trim();
        let value = value.trim();
        let cfg = &mut spec.base;
        match key {
            "lambda_b" => cfg.lambda_b = parse_f64(key, value)?,
            "lambda_t" => cfg.lambda_t = parse_f64(key, value)?,
            "lambda_u" => cfg.lambda_u = parse_f64(key, value)?,
            "h_b" => cfg.h_b = parse_f64(key, value)?,
            "h_t" => cfg.h_t = parse_f64(key, value)?,
            "h_u" => cfg.h_u = parse_f64(key, value)?,
            "b_slope" => cfg.b_slope = parse_f64(key, value)?,
            "c_offset" => cfg.c_offset = parse_f64(key, value)?,
            "alpha_l" => cfg.alpha_l = parse_f64(key, value)?,
            "alpha_n" => cfg.alpha_n = parse_f64(key, value)?,
            "alpha_t" => cfg.alpha_t = parse_f64(key, value)?,
            "a_l_db" => a_l_db = parse_f64(key, value)?,
            "a_n_db" => a_n_db = parse_f64(key, value)?,
            "a_t_db" => a_t_db = parse_f64(key, value)?,
            "gain_side_db" => gain_side_db = parse_f64(key, value)?,
            "gain_main_db" => gain_main_db = parse_f64(key, value)?,
            "m_l" => cfg.m_l = parse_u64(key, value)? as u32,
            "m_n" => cfg.m_n = parse_u64(key, value)? as u32,
            "p_tx_db" => cfg.p_tx = db_to_linear(parse_f64(key, value)?),
            "rho_u" => {
                cfg.rho_u = parse_f64(key, value)?;
                cfg.rho_t = 1.0 - cfg.rho_u;
            }
            "theta_db" => cfg.theta = db_to_linear(parse_f64(key, value)?),
            "sim_radius" => cfg.sim_radius = parse_f64(key, value)?,
            "iterations" => {
                cfg.iterations = parse_u64(key, value)?;
                spec.iterations = cfg.iterations;
            }
            "sweep" => spec.sweep = SweepAxis::parse(value)?,
            "values" => spec.values = parse_list(key, value)?,
            "schemes" => {
                spec.schemes = if value == "all" {
                    Scheme::ALL.to_vec()
                } else {
                    value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(parse_scheme)
                        .collect::<Result<_>>()?
                };
            }
            "path" => spec.path = PathSel::parse(value)?,
            "metrics" => {
                spec.metrics = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        Ok(match s {
                            "assoc" => Metric::Assoc,
                            "coverage" => Metric::Coverage,
                            "rate" => Metric::Rate,
                            other => bail!("unknown metric `{other}` (expected assoc, coverage, or rate)"),
                        })
                    })
                    .collect::<Result<_>>()?;
            }
            "thresholds_db" => spec.thresholds_db = parse_list(key, value)?,
            "seed" => spec.master_seed = parse_u64(key, value)?,
            "out" => spec.out = PathBuf::from(value),
            other => bail!("unknown key `{other}`"),
        }
    }

    spec.base.eta_l = db_to_linear(a_l_db + gain_side_db);
    spec.base.eta_n = db_to_linear(a_n_db + gain_side_db);
    spec.base.eta_t = db_to_linear(a_t_db + gain_main_db);

    validate_spec(&spec)?;
    Ok(spec)
}

/// Spec-level constraint checks (the per-point network constraints run again
/// on each swept configuration).
pub fn validate_spec(spec: &ExperimentSpec) -> Result<()> {
    spec.base
        .validate()
        .map_err(|e| anyhow!("network config: {e}"))?;
    if spec.schemes.is_empty() {
        bail!("schemes: at least one scheme is required");
    }
    if spec.metrics.is_empty() {
        bail!("metrics: at least one metric is required");
    }
    if spec.values.is_empty() {
        bail!("values: the sweep needs at least one value");
    }
    if spec.values.iter().any(|v| !v.is_finite()) {
        bail!("values: sweep values must be finite");
    }
    if spec.thresholds_db.iter().any(|v| !v.is_finite()) {
        bail!("thresholds_db: thresholds must be finite");
    }
    let mut sorted = spec.thresholds_db.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    if sorted.len() != spec.thresholds_db.len() {
        bail!("thresholds_db: thresholds must be distinct");
    }
    for &v in &spec.values {
        match spec.sweep {
            SweepAxis::RhoU => {
                if !(v > 0.5 && v < 1.0) {
                    bail!("values: rho_u sweep value {v} outside (0.5, 1)");
                }
            }
            SweepAxis::LambdaB => {
                if !(v > 0.0) {
                    bail!("values: lambda_b sweep value {v} must be positive");
                }
            }
            SweepAxis::HeightU => {
                if !(v > spec.base.h_b + 1.0) {
                    bail!("values: h_u sweep value {v} must exceed h_b + 1 = {}", spec.base.h_b + 1.0);
                }
            }
            SweepAxis::ThetaDb => {
                if v < 0.0 {
                    bail!("values: theta_db sweep value {v} must be nonnegative");
                }
            }
            SweepAxis::ThresholdDb => {}
        }
        // Every swept configuration must itself validate.
        apply_axis(&spec.base, spec.sweep, v)
            .validate()
            .map_err(|e| anyhow!("sweep value {v}: {e}"))?;
    }
    if spec.iterations < 100 {
        bail!("iterations: need at least 100");
    }
    Ok(())
}

/// Applies one sweep value to the base configuration.
pub fn apply_axis(base: &NetworkConfig, axis: SweepAxis, value: f64) -> NetworkConfig {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::ThresholdDb => {}
        SweepAxis::LambdaB => {
            // Keep the user densities tied to the BS density the way the
            // default parameter set does.
            let ratio_t = base.lambda_t / base.lambda_b;
            let ratio_u = base.lambda_u / base.lambda_b;
            cfg.lambda_b = value;
            cfg.lambda_t = ratio_t * value;
            cfg.lambda_u = ratio_u * value;
        }
        SweepAxis::HeightU => cfg.h_u = value,
        SweepAxis::ThetaDb => cfg.theta = db_to_linear(value),
        SweepAxis::RhoU => {
            cfg.rho_u = value;
            cfg.rho_t = 1.0 - value;
        }
    }
    cfg
}

/// Renders the default configuration as a commented, parseable file.
pub fn default_config_text() -> String {
    let d = NetworkConfig::default();
    let spec = ExperimentSpec::default();
    format!(
        "\
# Experiment configuration. Every key is optional; an empty file runs the
# defaults below. Values are linear/SI unless the key ends in _db.

# --- network ---
lambda_b = {lambda_b}        # BS density, per m^2 (10 per km^2)
lambda_t = {lambda_t}        # TU density, per m^2
lambda_u = {lambda_u}        # AU density, per m^2
h_b = {h_b}                  # BS height, m
h_t = {h_t}                  # TU height, m
h_u = {h_u}                  # AU altitude, m
b_slope = {b_slope}          # LoS probability slope constant
c_offset = {c_offset}        # LoS probability offset constant
alpha_l = {alpha_l}          # LoS path-loss exponent
alpha_n = {alpha_n}          # NLoS path-loss exponent
alpha_t = {alpha_t}          # terrestrial path-loss exponent
a_l_db = -35                 # LoS path-loss constant at 1 m, dB
a_n_db = -40                 # NLoS path-loss constant at 1 m, dB
a_t_db = -28.4               # terrestrial path-loss constant at 1 m, dB
gain_side_db = 0             # BS sidelobe antenna gain (A2G links), dB
gain_main_db = 0             # BS mainlobe antenna gain (terrestrial), dB
m_l = {m_l}                  # Nakagami order, LoS
m_n = {m_n}                  # Nakagami order, NLoS
p_tx_db = 26                 # BS transmit power, dB (cancels in every SIR)
rho_u = {rho_u}              # NOMA power coefficient of the AU
theta_db = 4                 # cooperation threshold, dB
sim_radius = {sim_radius}    # Monte Carlo window radius, m
iterations = {iterations}    # Monte Carlo realizations

# --- experiment ---
sweep = threshold_db         # threshold_db | lambda_b | h_u | theta_db | rho_u
values = -10, -5, 0, 5, 10   # sweep points (dB for *_db axes)
schemes = comp_noma          # comp_noma, comp_oma, noma_only, oma_only, or all
path = both                  # mc | analytic | both
metrics = assoc, coverage    # assoc, coverage, rate
thresholds_db = 0            # coverage thresholds when sweep != threshold_db
seed = {seed}                # master seed (realization i uses stream f(seed, i))
out = results.csv
",
        lambda_b = d.lambda_b,
        lambda_t = d.lambda_t,
        lambda_u = d.lambda_u,
        h_b = d.h_b,
        h_t = d.h_t,
        h_u = d.h_u,
        b_slope = d.b_slope,
        c_offset = d.c_offset,
        alpha_l = d.alpha_l,
        alpha_n = d.alpha_n,
        alpha_t = d.alpha_t,
        m_l = d.m_l,
        m_n = d.m_n,
        rho_u = d.rho_u,
        sim_radius = d.sim_radius,
        iterations = d.iterations,
        seed = spec.master_seed,
    )
}

/// One-line human summary used by `validate`.
pub fn describe(spec: &ExperimentSpec) -> String {
    let schemes: Vec<&str> = spec.schemes.iter().map(|s| s.label()).collect();
    let metrics: Vec<&str> = spec.metrics.iter().map(|m| m.label()).collect();
    format!(
        "sweep {} over {:?}; schemes [{}]; metrics [{}]; path {:?}; {} iterations; seed {}; theta {:.2} dB; rho_u {}",
        spec.sweep.label(),
        spec.values,
        schemes.join(", "),
        metrics.join(", "),
        spec.path,
        spec.iterations,
        spec.master_seed,
        linear_to_db(spec.base.theta),
        spec.base.rho_u,
    )
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}
