use std::time::Instant;

use log::info;

use super::config::{fmo_table, Method, ModelKind, RunConfig, SweepAxis};
use crate::bath::{discretize_debye, discretize_ohmic, DiscretizedBath, SpectralDensity};
use crate::bre::{compute_kernels, m_bre_propagate, nm_bre_propagate, spin_up};
use crate::dynamics::{build_fmo_hamiltonian, run_ensemble, EnergyOffset, EnsembleOptions, Fmo, ReducedSeries, SpinBoson};
use crate::error::{Error, Result};
use crate::numerics::TimeGrid;
use crate::qsl::{iso_qsl, qsl_report, QslReport};
use crate::units::{kelvin_to_angular, wavenumber_to_angular};

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub point: usize,
    /// Value on the sweep axis; `None` for a single simulation.
    pub coordinate: Option<f64>,
    pub tau: f64,
    pub report: QslReport<f64>,
    /// Isolated two-level reference (spin-boson model only).
    pub tau_iso: Option<f64>,
    pub n_traj: usize,
    pub n_failed: usize,
    pub wall_seconds: f64,
    /// Index into [`RunOutput::series`] of the series this row was computed from.
    pub series: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub axis: Option<SweepAxis>,
    pub rows: Vec<ResultRow>,
    pub series: Vec<ReducedSeries<f64>>,
}

fn at(axis: Option<SweepAxis>, value: Option<f64>) -> impl Fn(Error) -> Error {
    let coordinate = match (axis, value) {
        (Some(a), Some(v)) => format!("{}={v}", a.name()),
        _ => "simulate".to_string(),
    };
    move |e| Error::AtSweepPoint {
        coordinate: coordinate.clone(),
        source: Box::new(e),
    }
}

/// Executes the configured single point or sweep. Sweep points run in
/// ascending order of their axis value.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let Some(sweep) = &config.sweep else {
        let started = Instant::now();
        let tag = at(None, None);
        let series = propagate(config, config.tau()).map_err(&tag)?;
        let row = make_row(config, &series, 0, None, config.tau(), 0, started).map_err(&tag)?;
        return Ok(RunOutput {
            axis: None,
            rows: vec![row],
            series: vec![series],
        });
    };

    let mut values = sweep.values.clone();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let axis = Some(sweep.axis);
    let mut rows = Vec::with_capacity(values.len());
    let mut all_series = Vec::new();

    if sweep.axis == SweepAxis::Tau {
        let started = Instant::now();
        let t_end = *values.last().expect("validated non-empty");
        let series = propagate(config, t_end).map_err(at(axis, Some(t_end)))?;
        for (point, &tau) in values.iter().enumerate() {
            let row = make_row(config, &series, point, Some(tau), tau, 0, started).map_err(at(axis, Some(tau)))?;
            rows.push(row);
        }
        all_series.push(series);
    } else {
        for (point, &v) in values.iter().enumerate() {
            let started = Instant::now();
            let tag = at(axis, Some(v));
            info!("sweep point {}={v}", sweep.axis.name());
            let local = with_axis_value(config, sweep.axis, v);
            let series = propagate(&local, local.tau()).map_err(&tag)?;
            let row = make_row(&local, &series, point, Some(v), local.tau(), point, started).map_err(&tag)?;
            rows.push(row);
            all_series.push(series);
        }
    }
    Ok(RunOutput {
        axis,
        rows,
        series: all_series,
    })
}

/// Copy of `config` with the swept parameter set to `value`.
pub fn with_axis_value(config: &RunConfig, axis: SweepAxis, value: f64) -> RunConfig {
    let mut c = config.clone();
    match (c.model, axis) {
        (ModelKind::Sbm, SweepAxis::Coupling) => c.sbm.as_mut().expect("resolved").xi = value,
        (ModelKind::Sbm, SweepAxis::Temperature) => c.sbm.as_mut().expect("resolved").temperature = value,
        (ModelKind::Fmo, SweepAxis::Coupling) => c.fmo.as_mut().expect("resolved").lambda_cm = value,
        (ModelKind::Fmo, SweepAxis::Temperature) => c.fmo.as_mut().expect("resolved").temperature_k = value,
        (_, SweepAxis::Tau) => c.grid.tau = Some(value),
    }
    c
}

fn make_row(
    config: &RunConfig,
    series: &ReducedSeries<f64>,
    point: usize,
    coordinate: Option<f64>,
    tau: f64,
    series_index: usize,
    started: Instant,
) -> Result<ResultRow> {
    let report = qsl_report(series, tau)?;
    let tau_iso = match config.model {
        ModelKind::Sbm => Some(iso_qsl(config.sbm().delta, tau)),
        ModelKind::Fmo => None,
    };
    Ok(ResultRow {
        point,
        coordinate,
        tau,
        report,
        tau_iso,
        n_traj: series.n_traj,
        n_failed: series.n_failed,
        wall_seconds: started.elapsed().as_secs_f64(),
        series: series_index,
    })
}

fn ensemble_options(config: &RunConfig) -> EnsembleOptions {
    EnsembleOptions {
        n_traj: config.ensemble.n_traj,
        master_seed: config.ensemble.master_seed,
        deterministic: config.ensemble.deterministic,
        workers: config.ensemble.workers,
    }
}

/// Reduced dynamics on `[0, t_end]` for the configured model and method.
pub fn propagate(config: &RunConfig, t_end: f64) -> Result<ReducedSeries<f64>> {
    let grid = TimeGrid::spanning(config.dt(), t_end)?;
    match config.model {
        ModelKind::Sbm => propagate_sbm(config, &grid),
        ModelKind::Fmo => {
            let model = build_fmo(config)?;
            run_ensemble(&model, &grid, &ensemble_options(config))
        }
    }
}

fn propagate_sbm(config: &RunConfig, grid: &TimeGrid<f64>) -> Result<ReducedSeries<f64>> {
    let p = config.sbm();
    let omega_max = p.omega_max.expect("resolved");
    match config.method {
        Method::Decide => {
            let bath = discretize_ohmic(p.xi, p.omega_c, omega_max, p.n_osc)?.with_temperature(p.temperature)?;
            let model = SpinBoson::new(p.delta, bath)?;
            run_ensemble(&model, grid, &ensemble_options(config))
        }
        Method::NmBre | Method::MBre => {
            let j = SpectralDensity::OhmicExponential {
                xi: p.xi,
                omega_c: p.omega_c,
            };
            let kernels = compute_kernels(&j, 1.0 / p.temperature, grid)?;
            let bloch = if config.method == Method::NmBre {
                nm_bre_propagate(p.delta, &kernels, grid, spin_up())?
            } else {
                m_bre_propagate(p.delta, &kernels, grid, spin_up())?
            };
            bloch.to_reduced()
        }
        Method::Isolated => isolated_series(p.delta, grid),
    }
}

/// Closed-form precession of an isolated spin starting up.
pub fn isolated_series(delta: f64, grid: &TimeGrid<f64>) -> Result<ReducedSeries<f64>> {
    let w = 2.0 * delta;
    let b: Vec<[f64; 3]> = (0..grid.n_points())
        .map(|k| {
            let (s, c) = (w * grid.time(k)).sin_cos();
            [0.0, s, c]
        })
        .collect();
    let db: Vec<[f64; 3]> = b.iter().map(|v| [0.0, w * v[2], -w * v[1]]).collect();
    ReducedSeries::from_bloch(*grid, &b, &db)
}

/// Seven Debye-Drude baths in rad/fs at the configured temperature.
pub fn fmo_baths(config: &RunConfig) -> Result<Vec<DiscretizedBath<f64>>> {
    let p = config.fmo();
    let lambda = wavenumber_to_angular(p.lambda_cm);
    let kt = kelvin_to_angular(p.temperature_k);
    let bath = discretize_debye(lambda, p.tau_c_fs, p.omega_max_fs.expect("resolved"), p.modes_per_site)?
        .with_temperature(kt)?;
    Ok(vec![bath; 7])
}

pub fn build_fmo(config: &RunConfig) -> Result<Fmo<f64>> {
    let p = config.fmo();
    let table: Vec<Vec<f64>> = fmo_table(p.table_file.as_deref())?
        .into_iter()
        .map(|row| row.into_iter().map(wavenumber_to_angular).collect())
        .collect();
    let baths = fmo_baths(config)?;
    let hamiltonian = build_fmo_hamiltonian(&table, &baths, EnergyOffset::MinSiteEnergy)?;
    Fmo::new(hamiltonian, baths, p.initial_site - 1)
}
