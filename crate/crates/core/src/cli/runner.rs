//! Run orchestration: single runs, parameter sweeps and convergence studies.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::entanglement::StandardState;
use crate::error::{Error, Result};
use crate::influence::{memory_kernel, MemoryKernel};
use crate::model::build_hamiltonian;
use crate::propagator::{
    convergence_report, propagate_streaming, ConvergenceReport, PropagationOptions, SimGrid,
};

use super::config::{InitialState, RunConfig};
use super::kernel_cache;
use super::output::{RowSummary, TrajectoryWriter};

/// Final-state summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub rows: usize,
    pub final_time: f64,
    pub final_eof: f64,
    pub final_magic: [f64; 4],
    pub max_trace_error: f64,
}

/// Propagates `config`, streaming rows into `path`. An aborted propagation
/// leaves the rows written so far plus a `# ABORTED` trailer.
pub fn run_to_path(
    config: &RunConfig,
    path: &Path,
    kernel: Option<&MemoryKernel>,
) -> Result<RunSummary> {
    let rho0 = config.initial.density()?;
    let h = build_hamiltonian(&config.system);
    let owned;
    let kernel = match kernel {
        Some(k) => k,
        None => {
            owned = memory_kernel(&config.bath, config.grid.dt, config.grid.kmax)?;
            &owned
        }
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let file = BufWriter::new(File::create(path)?);
    let echo = config.echo();
    let mut writer = TrajectoryWriter::new(file, &echo)?;
    let options = PropagationOptions {
        stride: config.output.stride,
        ..Default::default()
    };
    let mut last: Option<(f64, RowSummary)> = None;
    let mut max_trace_error = 0.0f64;
    let result = propagate_streaming(&rho0, &h, kernel, &config.grid, &options, |rec| {
        let row = writer.write_record(rec)?;
        max_trace_error = max_trace_error.max(rec.trace_error);
        last = Some((rec.t, row));
        Ok(())
    });
    if let Err(e) = &result {
        writer.comment(&format!("ABORTED: {e}"))?;
    }
    let rows = writer.rows();
    writer.finish()?;
    result?;
    let (final_time, row) = last.expect("t = 0 is always recorded");
    Ok(RunSummary {
        rows,
        final_time,
        final_eof: row.eof,
        final_magic: row.magic,
        max_trace_error,
    })
}

/// Runs `config` writing to its configured output path, relocated into
/// `out_dir` when given.
pub fn run(config: &RunConfig, out_dir: Option<&Path>) -> Result<(PathBuf, RunSummary)> {
    let path = output_path(config, out_dir);
    let summary = run_to_path(config, &path, None)?;
    Ok((path, summary))
}

fn output_path(config: &RunConfig, out_dir: Option<&Path>) -> PathBuf {
    match out_dir {
        Some(dir) => dir.join(
            config
                .output
                .path
                .file_name()
                .unwrap_or_else(|| "trajectory.csv".as_ref()),
        ),
        None => config.output.path.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Temperature,
    J12,
    Kmax,
    Dt,
    WernerLambda,
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "temperature" => Ok(Self::Temperature),
            "j12" => Ok(Self::J12),
            "kmax" => Ok(Self::Kmax),
            "dt" => Ok(Self::Dt),
            "werner_lambda" => Ok(Self::WernerLambda),
            other => Err(Error::Config(format!(
                "unknown sweep parameter '{other}' (temperature, j12, kmax, dt, werner_lambda)"
            ))),
        }
    }
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Temperature => "temperature",
            Self::J12 => "j12",
            Self::Kmax => "kmax",
            Self::Dt => "dt",
            Self::WernerLambda => "werner_lambda",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        Ok(Self { parameter, values })
    }

    /// Parses a comma-separated value list.
    pub fn parse(parameter: &str, values: &str) -> Result<Self> {
        let parameter = parameter.parse()?;
        let values = values
            .split(',')
            .filter(|v| !v.trim().is_empty())
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad sweep value '{v}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parameter, values)
    }
}

/// Copy of `base` with the swept parameter set to `value`.
pub fn apply_sweep_value(
    base: &RunConfig,
    parameter: SweepParameter,
    value: f64,
) -> Result<RunConfig> {
    let mut cfg = base.clone();
    match parameter {
        SweepParameter::Temperature => {
            cfg.bath.temperature = value;
            cfg.bath.validate()?;
        }
        SweepParameter::J12 => {
            cfg.system.j12 = value;
            cfg.system.validate()?;
            cfg.system_source = super::config::SystemSource::Explicit;
        }
        SweepParameter::Kmax => {
            if value.fract() != 0.0 || value < 1.0 {
                return Err(Error::Config(format!(
                    "kmax must be a positive integer, got {value}"
                )));
            }
            cfg.grid = SimGrid::new(cfg.grid.dt, cfg.grid.n_steps, value as usize)?;
        }
        SweepParameter::Dt => {
            // keep the physical horizon and output spacing
            let horizon = base.grid.horizon();
            let n_steps = (horizon / value).round() as usize;
            cfg.grid = SimGrid::new(value, n_steps, cfg.grid.kmax)?;
            let spacing = base.grid.dt * base.output.stride as f64;
            cfg.output.stride = ((spacing / value).round() as usize).max(1);
        }
        SweepParameter::WernerLambda => {
            let state = StandardState::Werner(value);
            crate::entanglement::standard_state(state)?;
            cfg.initial = InitialState::Named(state);
        }
    }
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub path: PathBuf,
    pub outcome: std::result::Result<RunSummary, String>,
}

fn value_label(v: f64) -> String {
    format!("{v}").replace('-', "m")
}

/// Runs every sweep value (in parallel) into `out_dir`, one CSV each, and
/// writes `summary.csv`. A failing point is recorded and does not stop
/// the others.
pub fn sweep(config: &RunConfig, spec: &SweepSpec, out_dir: &Path) -> Result<Vec<SweepPoint>> {
    std::fs::create_dir_all(out_dir)?;
    let points: Vec<SweepPoint> = spec
        .values
        .par_iter()
        .map(|&value| {
            let path = out_dir.join(format!("{}_{}.csv", spec.parameter, value_label(value)));
            let outcome = apply_sweep_value(config, spec.parameter, value)
                .and_then(|cfg| run_to_path(&cfg, &path, None))
                .map_err(|e| e.to_string());
            SweepPoint {
                value,
                path,
                outcome,
            }
        })
        .collect();
    write_summary(&out_dir.join("summary.csv"), spec.parameter, &points)?;
    Ok(points)
}

fn write_summary(path: &Path, parameter: SweepParameter, points: &[SweepPoint]) -> Result<()> {
    use std::io::Write;
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "{parameter},status,final_t_ps,final_eof,magic_d0,magic_d1,magic_d2,magic_d3,max_trace_err,csv"
    )?;
    for p in points {
        match &p.outcome {
            Ok(s) => writeln!(
                out,
                "{},ok,{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{}",
                p.value,
                s.final_time,
                s.final_eof,
                s.final_magic[0],
                s.final_magic[1],
                s.final_magic[2],
                s.final_magic[3],
                s.max_trace_error,
                p.path.display()
            )?,
            Err(e) => writeln!(
                out,
                "{},\"error: {}\",nan,nan,nan,nan,nan,nan,nan,{}",
                p.value,
                e.replace('"', "'"),
                p.path.display()
            )?,
        }
    }
    out.flush()?;
    Ok(())
}

/// Memory-length and time-step refinement study around `config`.
pub fn converge(
    config: &RunConfig,
    kmax_values: &[usize],
    dt_kmax: (usize, usize),
    horizon: f64,
) -> Result<ConvergenceReport> {
    let rho0 = config.initial.density()?;
    let h = build_hamiltonian(&config.system);
    convergence_report(
        &rho0,
        &h,
        &config.bath,
        config.grid.dt,
        horizon,
        kmax_values,
        dt_kmax,
        &PropagationOptions::default(),
    )
}

/// Writes the kernel for `config` to `path`.
pub fn write_kernel_cache(config: &RunConfig, path: &Path) -> Result<MemoryKernel> {
    let k = memory_kernel(&config.bath, config.grid.dt, config.grid.kmax)?;
    kernel_cache::save(&k, path)?;
    Ok(k)
}
