use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::influence::memory_kernel;
use crate::model::{BathSpec, HamiltonianParts};

use super::{propagate_with, DensityMatrix, PropagationOptions, SimGrid, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KmaxDifference {
    pub from: usize,
    pub to: usize,
    /// Largest entry-wise difference over the whole horizon.
    pub max_linf: f64,
    /// Difference at the final time.
    pub final_linf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub dt: f64,
    pub horizon: f64,
    pub kmax: Vec<KmaxDifference>,
    /// Memory lengths of the Δt and Δt/2 runs.
    pub dt_kmax: (usize, usize),
    pub dt_max_linf: f64,
    pub dt_final_linf: f64,
}

fn run(
    rho0: &DensityMatrix,
    h: &HamiltonianParts,
    bath: &BathSpec,
    dt: f64,
    horizon: f64,
    kmax: usize,
    options: &PropagationOptions,
) -> Result<Trajectory> {
    let n_steps = (horizon / dt).round() as usize;
    let grid = SimGrid::new(dt, n_steps, kmax)?;
    let kernel = memory_kernel(bath, dt, kmax)?;
    let options = PropagationOptions {
        stride: 1,
        ..*options
    };
    propagate_with(rho0, h, &kernel, &grid, &options)
}

/// Max-over-time and final differences between two trajectories, matched on
/// the coarser one's time points.
fn compare(coarse: &Trajectory, fine: &Trajectory) -> (f64, f64) {
    let ratio = if coarse.records.len() > 1 && fine.records.len() > 1 {
        ((coarse.records[1].t / fine.records[1].t).round() as usize).max(1)
    } else {
        1
    };
    let mut max = 0.0f64;
    let mut last = 0.0;
    for (i, rec) in coarse.records.iter().enumerate() {
        if let Some(other) = fine.records.get(i * ratio) {
            last = rec.rho.linf_distance(&other.rho);
            max = max.max(last);
        }
    }
    (max, last)
}

/// Propagates the same problem for each memory length in `kmax_values`
/// (ascending) and for `Δt` against `Δt/2`, reporting differences between
/// successive refinements.
///
/// `dt_kmax` gives the memory lengths of the Δt and Δt/2 runs; `(k, 2k)`
/// keeps the memory time fixed so only the slice error changes.
#[allow(clippy::too_many_arguments)]
pub fn convergence_report(
    rho0: &DensityMatrix,
    h: &HamiltonianParts,
    bath: &BathSpec,
    dt: f64,
    horizon: f64,
    kmax_values: &[usize],
    dt_kmax: (usize, usize),
    options: &PropagationOptions,
) -> Result<ConvergenceReport> {
    if kmax_values.len() < 2 {
        return Err(Error::Config("need at least two kmax values".into()));
    }
    let runs = kmax_values
        .par_iter()
        .map(|&k| run(rho0, h, bath, dt, horizon, k, options))
        .collect::<Result<Vec<_>>>()?;
    let kmax = kmax_values
        .windows(2)
        .zip(runs.windows(2))
        .map(|(ks, rs)| {
            let (max_linf, final_linf) = compare(&rs[0], &rs[1]);
            KmaxDifference {
                from: ks[0],
                to: ks[1],
                max_linf,
                final_linf,
            }
        })
        .collect();
    let (coarse, fine) = rayon::join(
        || run(rho0, h, bath, dt, horizon, dt_kmax.0, options),
        || run(rho0, h, bath, dt / 2.0, horizon, dt_kmax.1, options),
    );
    let (dt_max_linf, dt_final_linf) = compare(&coarse?, &fine?);
    Ok(ConvergenceReport {
        dt,
        horizon,
        kmax,
        dt_kmax,
        dt_max_linf,
        dt_final_linf,
    })
}
