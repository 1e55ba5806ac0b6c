use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::FMO_TABLE_CM;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Sbm,
    Fmo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Decide,
    NmBre,
    MBre,
    Isolated,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Decide => "decide",
            Method::NmBre => "nm_bre",
            Method::MBre => "m_bre",
            Method::Isolated => "isolated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Coupling,
    Tau,
    Temperature,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Coupling => "coupling",
            SweepAxis::Tau => "tau",
            SweepAxis::Temperature => "temperature",
        }
    }
}

/// Spin-boson parameters in units of `omega_c` (hbar = k_B = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SbmParams {
    pub delta: f64,
    /// Kondo parameter.
    pub xi: f64,
    pub omega_c: f64,
    /// Defaults to `5 omega_c`.
    pub omega_max: Option<f64>,
    pub n_osc: usize,
    pub temperature: f64,
}

impl Default for SbmParams {
    fn default() -> Self {
        Self {
            delta: 0.2,
            xi: 0.1,
            omega_c: 1.0,
            omega_max: None,
            n_osc: 200,
            temperature: 1.0,
        }
    }
}

/// Exciton model parameters; energies in cm^-1, times in fs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FmoParams {
    /// Reorganization energy per site.
    pub lambda_cm: f64,
    pub tau_c_fs: f64,
    pub modes_per_site: usize,
    pub temperature_k: f64,
    /// Highest bath frequency in rad/fs; defaults to `10 / tau_c`.
    pub omega_max_fs: Option<f64>,
    /// Initially excited site, counted from one.
    pub initial_site: usize,
    /// Whitespace-separated 7x7 table replacing the built-in one.
    pub table_file: Option<PathBuf>,
}

impl Default for FmoParams {
    fn default() -> Self {
        Self {
            lambda_cm: 35.0,
            tau_c_fs: 50.0,
            modes_per_site: 40,
            temperature_k: 300.0,
            omega_max_fs: None,
            initial_site: 1,
            table_file: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridParams {
    /// Time step; 0.005 for the spin-boson model, 1 fs for the exciton model.
    pub dt: Option<f64>,
    /// Evolution time; 1 and 1000 fs respectively.
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleParams {
    pub n_traj: usize,
    pub master_seed: u64,
    pub deterministic: bool,
    pub workers: Option<usize>,
}

impl Default for EnsembleParams {
    fn default() -> Self {
        Self {
            n_traj: 10_000,
            master_seed: 0,
            deterministic: true,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    pub axis: SweepAxis,
    /// Filled with per-axis defaults when omitted.
    #[serde(default)]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputParams {
    pub dir: PathBuf,
    pub emit_series: bool,
}

impl Default for OutputParams {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            emit_series: false,
        }
    }
}

/// A complete run description. [`parse_config`] returns it with every
/// default resolved, so serializing and parsing again is the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    #[serde(default)]
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sbm: Option<SbmParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fmo: Option<FmoParams>,
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub ensemble: EnsembleParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepParams>,
    #[serde(default)]
    pub output: OutputParams,
}

impl RunConfig {
    pub fn sbm(&self) -> &SbmParams {
        self.sbm.as_ref().expect("resolved spin-boson parameters")
    }

    pub fn fmo(&self) -> &FmoParams {
        self.fmo.as_ref().expect("resolved exciton parameters")
    }

    pub fn dt(&self) -> f64 {
        self.grid.dt.expect("resolved time step")
    }

    pub fn tau(&self) -> f64 {
        self.grid.tau.expect("resolved evolution time")
    }

    /// Fills model-dependent defaults.
    pub fn resolve(mut self) -> Self {
        match self.model {
            ModelKind::Sbm => {
                let p = self.sbm.get_or_insert_with(SbmParams::default);
                p.omega_max.get_or_insert(5.0 * p.omega_c);
                self.grid.dt.get_or_insert(0.005);
                self.grid.tau.get_or_insert(1.0);
            }
            ModelKind::Fmo => {
                let p = self.fmo.get_or_insert_with(FmoParams::default);
                p.omega_max_fs.get_or_insert(10.0 / p.tau_c_fs);
                self.grid.dt.get_or_insert(1.0);
                self.grid.tau.get_or_insert(1000.0);
            }
        }
        let model = self.model;
        let tau = self.tau();
        if let Some(s) = self.sweep.as_mut() {
            if s.values.is_empty() {
                s.values = default_sweep_values(model, s.axis, tau);
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        let positive = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Validation(format!("{name} must be positive, got {v}")))
            }
        };
        match self.model {
            ModelKind::Sbm => {
                if self.fmo.is_some() {
                    return fail("[fmo] section given for model = \"sbm\"".into());
                }
                let p = self.sbm();
                if !(p.delta >= 0.0 && p.delta.is_finite()) {
                    return fail(format!("sbm.delta must be non-negative, got {}", p.delta));
                }
                if !(p.xi >= 0.0 && p.xi.is_finite()) {
                    return fail(format!("sbm.xi must be non-negative, got {}", p.xi));
                }
                positive("sbm.omega_c", p.omega_c)?;
                positive("sbm.omega_max", p.omega_max.unwrap_or(f64::NAN))?;
                positive("sbm.temperature", p.temperature)?;
                if p.n_osc == 0 {
                    return fail("sbm.n_osc must be at least 1".into());
                }
            }
            ModelKind::Fmo => {
                if self.sbm.is_some() {
                    return fail("[sbm] section given for model = \"fmo\"".into());
                }
                if self.method != Method::Decide {
                    return fail(format!(
                        "method {} applies to the spin-boson model only; use method = \"decide\" for fmo",
                        self.method.name()
                    ));
                }
                let p = self.fmo();
                positive("fmo.lambda_cm", p.lambda_cm)?;
                positive("fmo.tau_c_fs", p.tau_c_fs)?;
                positive("fmo.temperature_k", p.temperature_k)?;
                positive("fmo.omega_max_fs", p.omega_max_fs.unwrap_or(f64::NAN))?;
                if p.modes_per_site == 0 {
                    return fail("fmo.modes_per_site must be at least 1".into());
                }
                if !(1..=7).contains(&p.initial_site) {
                    return fail(format!("fmo.initial_site must be in 1..=7, got {}", p.initial_site));
                }
            }
        }
        let dt = self.dt();
        positive("grid.dt", dt)?;
        let mut taus = vec![self.tau()];
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return fail("sweep.values is empty".into());
            }
            for &v in &s.values {
                positive(&format!("sweep value on axis {}", s.axis.name()), v)?;
            }
            if s.axis == SweepAxis::Tau {
                taus.extend(&s.values);
            }
            if s.axis == SweepAxis::Coupling && self.method == Method::Isolated {
                log::warn!("coupling sweep with the isolated method: every point is identical");
            }
        }
        for tau in taus {
            if !(tau >= 0.0 && tau.is_finite()) {
                return fail(format!("evolution time must be non-negative, got {tau}"));
            }
            let steps = tau / dt;
            if (steps - steps.round()).abs() > 1e-6 || steps.round() < 1.0 {
                return fail(format!("evolution time {tau} is not a positive multiple of grid.dt = {dt}"));
            }
        }
        if self.method == Method::Decide && self.ensemble.n_traj == 0 {
            return fail("ensemble.n_traj must be at least 1".into());
        }
        if self.ensemble.workers == Some(0) {
            return fail("ensemble.workers must be at least 1".into());
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

/// Default sweep grids.
pub fn default_sweep_values(model: ModelKind, axis: SweepAxis, tau: f64) -> Vec<f64> {
    match (model, axis) {
        (ModelKind::Sbm, SweepAxis::Coupling) => vec![0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0],
        (ModelKind::Sbm, SweepAxis::Temperature) => vec![1.0, 2.0],
        (ModelKind::Fmo, SweepAxis::Coupling) => vec![10.0, 35.0, 70.0],
        (ModelKind::Fmo, SweepAxis::Temperature) => vec![77.0, 300.0],
        (_, SweepAxis::Tau) => (1..=10).map(|i| tau * i as f64 / 10.0).collect(),
    }
}

/// Parses and validates a TOML run description, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RunConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| text[..s.start.min(text.len())].lines().count().max(1)),
        message: e.message().to_string(),
    })?;
    let config = raw.resolve();
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// The built-in 7x7 site-energy/coupling table in cm^-1, or the contents of
/// `override_path`.
pub fn fmo_table(override_path: Option<&Path>) -> Result<Vec<Vec<f64>>> {
    match override_path {
        None => Ok(FMO_TABLE_CM.iter().map(|r| r.to_vec()).collect()),
        Some(path) => parse_table(&std::fs::read_to_string(path)?),
    }
}

/// Whitespace-separated rows; blank lines and `#` comments are ignored.
pub fn parse_table(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|e| Error::Parse {
                    line: Some(i + 1),
                    message: format!("`{tok}`: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    if rows.len() != 7 || rows.iter().any(|r| r.len() != 7) {
        return Err(Error::OverrideShapeMismatch { rows: rows.len(), cols });
    }
    Ok(rows)
}
