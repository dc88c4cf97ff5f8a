//! Finite-memory path-integral propagation of the two-dot density matrix.

mod convergence;
mod density;
mod tensor;

pub use convergence::{convergence_report, ConvergenceReport, KmaxDifference};
pub use density::{DensityMatrix, HERMITIAN_TOL, NEGATIVE_EIGEN_TOL, TRACE_TOL};
pub use tensor::{contract_step, AugmentedTensor, MAX_KMAX, PAIRS};

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::influence::MemoryKernel;
use crate::linalg::{expm_i_symmetric, CMat4};
use crate::model::HamiltonianParts;

/// Trace drift that aborts a propagation.
pub const TRACE_ABORT: f64 = 1e-3;

/// Time grid and memory length.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimGrid {
    pub dt: f64,
    pub n_steps: usize,
    pub kmax: usize,
}

impl SimGrid {
    pub fn new(dt: f64, n_steps: usize, kmax: usize) -> Result<Self> {
        let g = Self { dt, n_steps, kmax };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.n_steps < 1 {
            return Err(Error::Config("n_steps must be >= 1".into()));
        }
        if !(1..=MAX_KMAX).contains(&self.kmax) {
            return Err(Error::Config(format!(
                "kmax must be in 1..={MAX_KMAX} (16^kmax tensor ceiling), got {}",
                self.kmax
            )));
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}

/// How the diagonal energies enter each time slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaPhase {
    /// Slice propagator `exp(-iΔt(M + Ω))`; exact for any detuning.
    #[default]
    Exact,
    /// `diag(e^{-iΔtΩ}) · exp(-iΔt M)`, first order in Δt when Ω ≠ 0.
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    /// Record every `stride`-th step.
    pub stride: usize,
    pub phase: OmegaPhase,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            stride: 1,
            phase: OmegaPhase::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub step: usize,
    pub t: f64,
    pub rho: DensityMatrix,
    pub trace_error: f64,
    pub purity: f64,
}

impl Record {
    fn new(step: usize, dt: f64, rho: DensityMatrix) -> Self {
        Self {
            step,
            t: step as f64 * dt,
            trace_error: rho.trace_error(),
            purity: rho.purity(),
            rho,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub records: Vec<Record>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }

    /// Record closest to time `t`.
    pub fn at_time(&self, t: f64) -> Option<&Record> {
        self.records
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }

    pub fn max_trace_error(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.trace_error)
            .fold(0.0, f64::max)
    }
}

/// `exp(-iΔt M)`, the free propagator of one slice.
pub fn free_propagator(h: &HamiltonianParts, dt: f64) -> CMat4 {
    expm_i_symmetric(&h.m, dt)
}

/// Slice propagator including the diagonal energies.
pub fn slice_propagator(h: &HamiltonianParts, dt: f64, phase: OmegaPhase) -> CMat4 {
    match phase {
        OmegaPhase::Exact => expm_i_symmetric(&h.total(), dt),
        OmegaPhase::Split => {
            let p = Matrix4::from_diagonal(&h.omega.map(|w| (Complex64::new(0.0, -dt * w)).exp()));
            p * free_propagator(h, dt)
        }
    }
}

fn check_inputs(kernel: &MemoryKernel, grid: &SimGrid) -> Result<()> {
    grid.validate()?;
    if kernel.kmax != grid.kmax {
        return Err(Error::Config(format!(
            "kernel kmax {} does not match grid kmax {}",
            kernel.kmax, grid.kmax
        )));
    }
    if (kernel.dt - grid.dt).abs() > 1e-12 * grid.dt {
        return Err(Error::Config(format!(
            "kernel dt {} does not match grid dt {}",
            kernel.dt, grid.dt
        )));
    }
    Ok(())
}

/// Runs the path sum and hands every recorded step to `sink`, starting with
/// `t = 0`. Stops with [`Error::TraceDrift`] once `|tr ρ - 1|` exceeds
/// [`TRACE_ABORT`], or [`Error::Numeric`] if ρ overflows; records up to
/// that point have already been delivered.
pub fn propagate_streaming<F>(
    rho0: &DensityMatrix,
    h: &HamiltonianParts,
    kernel: &MemoryKernel,
    grid: &SimGrid,
    options: &PropagationOptions,
    mut sink: F,
) -> Result<()>
where
    F: FnMut(&Record) -> Result<()>,
{
    check_inputs(kernel, grid)?;
    let stride = options.stride.max(1);
    let u = slice_propagator(h, grid.dt, options.phase);
    sink(&Record::new(0, grid.dt, rho0.clone()))?;
    let mut tensor = AugmentedTensor::from_density(rho0);
    for step in 1..=grid.n_steps {
        tensor = contract_step(tensor, &u, kernel)?;
        let rho = tensor.reduced();
        let drift = rho.trace_error();
        if !crate::linalg::is_finite(rho.matrix()) {
            return Err(Error::Numeric(format!(
                "non-finite density matrix at t = {} ps",
                step as f64 * grid.dt
            )));
        }
        if drift > TRACE_ABORT {
            return Err(Error::TraceDrift {
                time: step as f64 * grid.dt,
                drift,
                limit: TRACE_ABORT,
            });
        }
        if step % stride == 0 {
            sink(&Record::new(step, grid.dt, rho))?;
        }
    }
    Ok(())
}

pub fn propagate_with(
    rho0: &DensityMatrix,
    h: &HamiltonianParts,
    kernel: &MemoryKernel,
    grid: &SimGrid,
    options: &PropagationOptions,
) -> Result<Trajectory> {
    let mut traj = Trajectory::default();
    propagate_streaming(rho0, h, kernel, grid, options, |r| {
        traj.records.push(r.clone());
        Ok(())
    })?;
    Ok(traj)
}

pub fn propagate(
    rho0: &DensityMatrix,
    h: &HamiltonianParts,
    kernel: &MemoryKernel,
    grid: &SimGrid,
) -> Result<Trajectory> {
    propagate_with(rho0, h, kernel, grid, &PropagationOptions::default())
}
