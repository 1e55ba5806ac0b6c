//! Tab-separated result files.
//!
//! `summary.tsv` opens with the resolved configuration as `#` comments,
//! followed by a header line and one row per sweep point. Series files hold
//! the reduced density matrix, its rate and the Hilbert-Schmidt rate norm on
//! the propagation grid. Wall-clock times go to `timing.tsv` so that the
//! other files are reproducible byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::RunConfig;
use super::run::RunOutput;
use crate::dynamics::ReducedSeries;
use crate::error::{Error, Result};
use crate::numerics::TimeGrid;
use crate::qsl::hs_norm_rate;
use crate::scalar::C;

pub const SUMMARY_FILE: &str = "summary.tsv";
pub const TIMING_FILE: &str = "timing.tsv";

pub const SUMMARY_COLUMNS: [&str; 16] = [
    "point",
    "coordinate",
    "tau",
    "fidelity",
    "fidelity_se",
    "tau1",
    "tau2",
    "tau2_se",
    "tau_inf",
    "tau_inf_se",
    "tau_iso",
    "bound_ok",
    "noise_dominated",
    "n_traj",
    "n_failed",
    "series",
];

/// Shortest representation that parses back to the same value.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_else(|| "-".into())
}

pub fn series_file_name(index: usize) -> String {
    format!("series_{index:03}.tsv")
}

/// Writes the summary, the timing table and, if requested, the series files.
/// Returns the paths written.
pub fn write_run(dir: &Path, config: &RunConfig, output: &RunOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let emit = config.output.emit_series;

    let mut s = String::new();
    for line in config.to_toml().lines() {
        let _ = writeln!(s, "{}", format!("# {line}").trim_end());
    }
    let _ = writeln!(s, "# axis = {}", output.axis.map(|a| a.name()).unwrap_or("none"));
    let _ = writeln!(s, "{}", SUMMARY_COLUMNS.join("\t"));
    for r in &output.rows {
        let q = &r.report;
        let series = if emit { series_file_name(r.series) } else { "-".into() };
        let fields = [
            r.point.to_string(),
            opt(r.coordinate),
            fmt_f64(r.tau),
            fmt_f64(q.fidelity),
            fmt_f64(q.fidelity_se),
            fmt_f64(q.tau1()),
            fmt_f64(q.tau2()),
            fmt_f64(q.tau2_se),
            fmt_f64(q.tau_inf()),
            fmt_f64(q.tau_inf_se()),
            opt(r.tau_iso),
            q.bound_ok.to_string(),
            q.noise_dominated.to_string(),
            r.n_traj.to_string(),
            r.n_failed.to_string(),
            series,
        ];
        let _ = writeln!(s, "{}", fields.join("\t"));
    }
    let path = dir.join(SUMMARY_FILE);
    fs::write(&path, s)?;
    written.push(path);

    let mut t = String::from("point\tcoordinate\twall_seconds\n");
    for r in &output.rows {
        let _ = writeln!(t, "{}\t{}\t{:.3}", r.point, opt(r.coordinate), r.wall_seconds);
    }
    let path = dir.join(TIMING_FILE);
    fs::write(&path, t)?;
    written.push(path);

    if emit {
        for (i, series) in output.series.iter().enumerate() {
            let path = dir.join(series_file_name(i));
            fs::write(&path, format_series(series))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Series as text: a `#` line with the grid and level data, a header, then
/// one row per grid point with `rho_mn` and `drho_mn` (real and imaginary
/// parts) and the Hilbert-Schmidt rate norm.
pub fn format_series(series: &ReducedSeries<f64>) -> String {
    let l = series.levels;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# levels={} initial_level={} t0={} dt={} n_steps={} n_traj={} n_failed={}",
        l,
        series.initial_level,
        fmt_f64(series.grid.t0),
        fmt_f64(series.grid.dt),
        series.grid.n_steps,
        series.n_traj,
        series.n_failed
    );
    let mut header = vec!["t".to_string()];
    for prefix in ["rho", "drho"] {
        for m in 0..l {
            for n in 0..l {
                header.push(format!("{prefix}_{}{}_re", m + 1, n + 1));
                header.push(format!("{prefix}_{}{}_im", m + 1, n + 1));
            }
        }
    }
    header.push("hs_rate".into());
    let _ = writeln!(s, "{}", header.join("\t"));
    let block = l * l;
    for k in 0..series.n_points() {
        let mut row = vec![fmt_f64(series.grid.time(k))];
        for data in [&series.density, &series.rate] {
            for z in &data[k * block..(k + 1) * block] {
                row.push(fmt_f64(z.re));
                row.push(fmt_f64(z.im));
            }
        }
        row.push(fmt_f64(hs_norm_rate(series, k)));
        let _ = writeln!(s, "{}", row.join("\t"));
    }
    s
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line: Some(line),
        message: message.into(),
    }
}

/// Reads a series written by [`format_series`]. Standard errors are not
/// stored and come back as zero.
pub fn read_series(path: &Path) -> Result<ReducedSeries<f64>> {
    parse_series(&fs::read_to_string(path)?)
}

pub fn parse_series(text: &str) -> Result<ReducedSeries<f64>> {
    let mut lines = text.lines().enumerate();
    let (_, meta) = lines.next().ok_or_else(|| parse_err(1, "empty series file"))?;
    let mut levels = None;
    let mut initial = None;
    let mut t0 = None;
    let mut dt = None;
    let mut n_steps = None;
    let mut n_traj = 0;
    let mut n_failed = 0;
    for item in meta.trim_start_matches('#').split_whitespace() {
        let (key, value) = item.split_once('=').ok_or_else(|| parse_err(1, format!("bad field `{item}`")))?;
        let bad = |_| parse_err(1, format!("bad value in `{item}`"));
        match key {
            "levels" => levels = Some(value.parse::<usize>().map_err(bad)?),
            "initial_level" => initial = Some(value.parse::<usize>().map_err(bad)?),
            "t0" => t0 = Some(value.parse::<f64>().map_err(|_| parse_err(1, item))?),
            "dt" => dt = Some(value.parse::<f64>().map_err(|_| parse_err(1, item))?),
            "n_steps" => n_steps = Some(value.parse::<usize>().map_err(bad)?),
            "n_traj" => n_traj = value.parse::<usize>().map_err(bad)?,
            "n_failed" => n_failed = value.parse::<usize>().map_err(bad)?,
            _ => {}
        }
    }
    let missing = |name: &str| parse_err(1, format!("missing `{name}`"));
    let levels = levels.ok_or_else(|| missing("levels"))?;
    let initial = initial.ok_or_else(|| missing("initial_level"))?;
    let grid = TimeGrid::new(
        t0.ok_or_else(|| missing("t0"))?,
        dt.ok_or_else(|| missing("dt"))?,
        n_steps.ok_or_else(|| missing("n_steps"))?,
    )?;
    lines.next();
    let block = levels * levels;
    let mut density = Vec::with_capacity(grid.n_points() * block);
    let mut rate = Vec::with_capacity(grid.n_points() * block);
    for (i, line) in lines {
        let values = line
            .split('\t')
            .map(|tok| tok.parse::<f64>().map_err(|e| parse_err(i + 1, format!("`{tok}`: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != 2 + 4 * block {
            return Err(parse_err(i + 1, format!("expected {} columns, got {}", 2 + 4 * block, values.len())));
        }
        let pairs = |from: usize| (0..block).map(move |j| (from + 2 * j, from + 2 * j + 1));
        density.extend(pairs(1).map(|(a, b)| C::new(values[a], values[b])));
        rate.extend(pairs(1 + 2 * block).map(|(a, b)| C::new(values[a], values[b])));
    }
    let mut series = ReducedSeries::exact(grid, levels, initial, density, rate)?;
    series.n_traj = n_traj;
    series.n_failed = n_failed;
    Ok(series)
}

/// The columns of one summary row that are needed to recompute it.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRecord {
    pub point: usize,
    pub coordinate: Option<f64>,
    pub tau: f64,
    pub fidelity: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau2_se: f64,
    pub tau_inf: f64,
    pub tau_iso: Option<f64>,
    pub bound_ok: bool,
    pub series: Option<String>,
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRecord>> {
    parse_summary(&fs::read_to_string(path)?)
}

pub fn parse_summary(text: &str) -> Result<Vec<SummaryRecord>> {
    let mut out = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            if line.split('\t').ne(SUMMARY_COLUMNS) {
                return Err(parse_err(i + 1, "unexpected summary header"));
            }
            header_seen = true;
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != SUMMARY_COLUMNS.len() {
            return Err(parse_err(i + 1, format!("expected {} columns", SUMMARY_COLUMNS.len())));
        }
        let num = |j: usize| f[j].parse::<f64>().map_err(|e| parse_err(i + 1, format!("`{}`: {e}", f[j])));
        let maybe = |j: usize| if f[j] == "-" { Ok(None) } else { num(j).map(Some) };
        let flag = |j: usize| f[j].parse::<bool>().map_err(|e| parse_err(i + 1, e.to_string()));
        out.push(SummaryRecord {
            point: f[0].parse().map_err(|_| parse_err(i + 1, "bad point index"))?,
            coordinate: maybe(1)?,
            tau: num(2)?,
            fidelity: num(3)?,
            tau1: num(5)?,
            tau2: num(6)?,
            tau2_se: num(7)?,
            tau_inf: num(8)?,
            tau_iso: maybe(10)?,
            bound_ok: flag(11)?,
            series: (f[15] != "-").then(|| f[15].to_string()),
        });
    }
    Ok(out)
}
