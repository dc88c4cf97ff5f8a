//! Versioned JSON cache of memory kernels.
//!
//! ```json
//! {"format": "qd-quapi-kernel", "version": 1, "dt": 0.25, "kmax": 5,
//!  "bath": {"alpha": 0.027, "omega_c": 2.2, "temperature": 77.0},
//!  "eta_diag": [re, im], "eta_off": [[re, im], ...]}
//! ```
//!
//! Floats are written in shortest round-trip form, so a load returns the
//! exact table that was stored.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::influence::{memory_kernel, MemoryKernel};
use crate::model::BathSpec;

pub const FORMAT: &str = "qd-quapi-kernel";
pub const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    format: String,
    version: u32,
    dt: f64,
    kmax: usize,
    bath: BathSpec,
    eta_diag: [f64; 2],
    eta_off: Vec<[f64; 2]>,
}

pub fn to_string(kernel: &MemoryKernel) -> String {
    let file = CacheFile {
        format: FORMAT.into(),
        version: VERSION,
        dt: kernel.dt,
        kmax: kernel.kmax,
        bath: kernel.bath,
        eta_diag: [kernel.eta_diag.re, kernel.eta_diag.im],
        eta_off: kernel.eta_off.iter().map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_string_pretty(&file).expect("kernel serializes")
}

pub fn from_str(text: &str) -> Result<MemoryKernel> {
    let file: CacheFile =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("kernel cache: {e}")))?;
    if file.format != FORMAT {
        return Err(Error::Config(format!(
            "kernel cache: unexpected format '{}'",
            file.format
        )));
    }
    if file.version != VERSION {
        return Err(Error::Config(format!(
            "kernel cache: unsupported version {}",
            file.version
        )));
    }
    if file.eta_off.len() != file.kmax {
        return Err(Error::Config(format!(
            "kernel cache: {} off-diagonal entries for kmax {}",
            file.eta_off.len(),
            file.kmax
        )));
    }
    Ok(MemoryKernel {
        dt: file.dt,
        kmax: file.kmax,
        bath: file.bath,
        eta_diag: Complex64::new(file.eta_diag[0], file.eta_diag[1]),
        eta_off: file
            .eta_off
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect(),
    })
}

pub fn save(kernel: &MemoryKernel, path: &Path) -> Result<()> {
    std::fs::write(path, to_string(kernel))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<MemoryKernel> {
    from_str(&std::fs::read_to_string(path)?)
}

/// Returns the cached kernel when it matches `(bath, dt, kmax)` exactly;
/// otherwise computes it and refreshes the cache file.
pub fn load_or_compute(path: &Path, bath: &BathSpec, dt: f64, kmax: usize) -> Result<MemoryKernel> {
    if let Ok(k) = load(path) {
        if k.bath == *bath && k.dt == dt && k.kmax == kmax {
            return Ok(k);
        }
    }
    let k = memory_kernel(bath, dt, kmax)?;
    save(&k, path)?;
    Ok(k)
}
