//! Run orchestration: configuration, model assembly, sweeps and result files.

mod config;
mod output;
mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{
    default_sweep_values, fmo_table, load_config, parse_config, parse_table, EnsembleParams, FmoParams, GridParams,
    Method, ModelKind, OutputParams, RunConfig, SbmParams, SweepAxis, SweepParams,
};
pub use output::{
    fmt_f64, format_series, parse_series, parse_summary, read_series, read_summary, series_file_name, write_run,
    SummaryRecord, SUMMARY_COLUMNS, SUMMARY_FILE, TIMING_FILE,
};
pub use run::{build_fmo, fmo_baths, isolated_series, propagate, run, with_axis_value, ResultRow, RunOutput};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "decide-qsl", version, about = "Quantum speed limit times of open quantum systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a single point.
    Simulate(RunArgs),
    /// Run a parameter sweep.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Swept parameter; overrides the configuration's sweep axis.
        #[arg(long, value_enum)]
        axis: Option<SweepAxis>,
        /// Comma-separated axis values; defaults per axis when omitted.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Print the exciton site-energy/coupling table in cm^-1.
    Table {
        /// Whitespace-separated 7x7 table to validate and print instead.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML run description.
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed of the trajectory streams.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Reduce trajectories in fixed order (bitwise reproducible).
    #[arg(long)]
    pub deterministic: bool,
    /// Write per-point time series.
    #[arg(long)]
    pub emit_series: bool,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    /// Loads the configuration and applies command-line overrides.
    pub fn load(&self) -> Result<RunConfig> {
        let mut config = load_config(&self.config).map_err(|e| match e {
            Error::Io(io) => Error::Parse {
                line: None,
                message: format!("{}: {io}", self.config.display()),
            },
            other => other,
        })?;
        if let Some(seed) = self.seed {
            config.ensemble.master_seed = seed;
        }
        if let Some(w) = self.workers {
            config.ensemble.workers = Some(w);
        }
        if self.deterministic {
            config.ensemble.deterministic = true;
        }
        if self.emit_series {
            config.output.emit_series = true;
        }
        if let Some(out) = &self.out {
            config.output.dir = out.clone();
        }
        Ok(config)
    }
}

/// Resolved configuration for a subcommand, before any propagation.
pub fn prepare(command: &Command) -> Result<Option<RunConfig>> {
    match command {
        Command::Simulate(args) => {
            let mut config = args.load()?;
            config.sweep = None;
            config.validate()?;
            Ok(Some(config))
        }
        Command::Sweep { run, axis, values } => {
            let mut config = run.load()?;
            let axis = axis
                .or(config.sweep.as_ref().map(|s| s.axis))
                .ok_or_else(|| Error::Validation("no sweep axis: pass --axis or add a [sweep] section".into()))?;
            let keep = config.sweep.as_ref().filter(|s| s.axis == axis).map(|s| s.values.clone());
            let values = if !values.is_empty() {
                values.clone()
            } else {
                keep.unwrap_or_else(|| default_sweep_values(config.model, axis, config.tau()))
            };
            config.sweep = Some(SweepParams { axis, values });
            config.validate()?;
            Ok(Some(config))
        }
        Command::Table { .. } => Ok(None),
    }
}

pub fn format_table(table: &[Vec<f64>]) -> String {
    let mut s = String::new();
    for row in table {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>9}")).collect();
        s.push_str(cells.join(" ").trim_end());
        s.push('\n');
    }
    s
}
