//! Bath correlation function and the discretized influence-functional
//! coefficients η.
//!
//! Point `n ≥ 1` of a path owns the time window `[(n-1)Δt, nΔt]`. For two
//! distinct points the coefficient is the double integral of `C(t - t')`
//! over their windows; the self coefficient integrates the ordered pairs
//! `t > t'` inside one window. Both reduce to single frequency integrals
//! over `J(ω)/ω²`, evaluated here by composite Simpson quadrature with grid
//! doubling.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{spectral_density_unchecked, BathSpec, OCCUPANCY};

/// Upper frequency limit in units of ω_c. The Gaussian cutoff puts the
/// neglected tail below e⁻⁶⁴ of the peak.
pub const OMEGA_MAX_FACTOR: f64 = 8.0;
/// Initial number of Simpson panels.
pub const BASE_PANELS: usize = 2048;
const MAX_PANELS: usize = 1 << 20;
/// Refinement stops once successive estimates agree to this fraction of ∫|f|.
const TARGET_TOL: f64 = 1e-13;
/// Residual change above which a quadrature is reported as non-converged.
pub const CONVERGENCE_TOL: f64 = 1e-9;

/// Memory coefficients for one `(Δt, bath)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryKernel {
    pub dt: f64,
    pub kmax: usize,
    pub bath: BathSpec,
    /// Self-interaction coefficient η_kk.
    pub eta_diag: Complex64,
    /// η_{k,k-Δk} for Δk = 1..=kmax, stored at index Δk-1.
    pub eta_off: Vec<Complex64>,
}

impl MemoryKernel {
    /// Coefficient for slice separation `delta` (0 is the self term).
    pub fn eta(&self, delta: usize) -> Complex64 {
        if delta == 0 {
            self.eta_diag
        } else {
            self.eta_off[delta - 1]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.eta_diag == Complex64::new(0.0, 0.0)
            && self.eta_off.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }
}

/// Influence action between a later point `(α, β)` and an earlier point
/// `(α', β')` given the coefficient η linking them.
#[inline]
pub fn action(
    eta: Complex64,
    alpha: usize,
    beta: usize,
    alpha_p: usize,
    beta_p: usize,
) -> Complex64 {
    let (na, nb) = (OCCUPANCY[alpha], OCCUPANCY[beta]);
    let (npa, npb) = (OCCUPANCY[alpha_p], OCCUPANCY[beta_p]);
    -(na - nb) * (eta * npa - eta.conj() * npb)
}

/// `coth(x)` with a series branch near zero.
#[inline]
fn coth(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 / x + x / 3.0
    } else {
        1.0 / x.tanh()
    }
}

/// `J(ω)·coth(βω/2)`, finite at ω = 0.
#[inline]
fn thermal_density(bath: &BathSpec, beta: f64, omega: f64) -> f64 {
    if omega == 0.0 {
        return 0.0;
    }
    spectral_density_unchecked(bath, omega) * coth(0.5 * beta * omega)
}

/// `J(ω)/ω²` without the division.
#[inline]
fn density_over_w2(bath: &BathSpec, omega: f64) -> f64 {
    let x = omega / bath.omega_c;
    bath.alpha * omega * (-x * x).exp()
}

/// Composite Simpson rule on `[a, b]` with `panels` (even) sub-intervals.
/// Returns the estimate and ∫|f| on the same grid.
pub fn simpson_fixed<F>(f: &F, a: f64, b: f64, panels: usize) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let v = f(a + h * i as f64);
        sum += v * w;
        abs_sum += v.norm() * w;
    }
    (sum * (h / 3.0), abs_sum * h / 3.0)
}

/// Simpson quadrature refined by grid doubling until the estimate settles.
pub fn integrate<F>(f: F, a: f64, b: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut panels = BASE_PANELS;
    let (mut prev, _) = simpson_fixed(&f, a, b, panels);
    loop {
        panels *= 2;
        let (next, scale) = simpson_fixed(&f, a, b, panels);
        let change = (next - prev).norm();
        if change <= TARGET_TOL * scale || scale == 0.0 {
            return Ok(next);
        }
        if panels >= MAX_PANELS {
            if change <= CONVERGENCE_TOL * scale {
                return Ok(next);
            }
            return Err(Error::Numeric(format!(
                "quadrature did not converge: relative change {:.3e} at {panels} panels",
                change / scale
            )));
        }
        prev = next;
    }
}

fn omega_max(bath: &BathSpec) -> f64 {
    OMEGA_MAX_FACTOR * bath.omega_c
}

/// `C(t) = (1/π)∫₀^∞ J(ω)[coth(βω/2)cos ωt − i sin ωt] dω`, in ps⁻².
pub fn bath_correlation(bath: &BathSpec, t: f64) -> Result<Complex64> {
    bath.validate()?;
    if bath.alpha == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let beta = bath.beta();
    let integral = integrate(
        |w| {
            let (s, c) = (w * t).sin_cos();
            Complex64::new(
                thermal_density(bath, beta, w) * c,
                -spectral_density_unchecked(bath, w) * s,
            )
        },
        0.0,
        omega_max(bath),
    )?;
    Ok(integral / PI)
}

/// Frequency integrand of the self coefficient η_kk.
fn eta_self_integrand(bath: &BathSpec, beta: f64, dt: f64) -> impl Fn(f64) -> Complex64 + '_ {
    move |w| {
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = w * dt;
        let g = density_over_w2(bath, w);
        Complex64::new(
            g * coth(0.5 * beta * w) * (1.0 - x.cos()),
            g * (x.sin() - x),
        )
    }
}

/// Frequency integrand of η for two points `delta ≥ 1` slices apart.
fn eta_pair_integrand(
    bath: &BathSpec,
    beta: f64,
    dt: f64,
    delta: f64,
) -> impl Fn(f64) -> Complex64 + '_ {
    move |w| {
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let g = density_over_w2(bath, w) * 2.0 * (1.0 - (w * dt).cos());
        let (s, c) = (w * delta * dt).sin_cos();
        Complex64::new(g * coth(0.5 * beta * w) * c, -g * s)
    }
}

pub fn memory_kernel(bath: &BathSpec, dt: f64, kmax: usize) -> Result<MemoryKernel> {
    bath.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt must be > 0, got {dt}")));
    }
    if kmax < 1 {
        return Err(Error::Domain("kmax must be >= 1".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    if bath.alpha == 0.0 {
        return Ok(MemoryKernel {
            dt,
            kmax,
            bath: *bath,
            eta_diag: zero,
            eta_off: vec![zero; kmax],
        });
    }
    let beta = bath.beta();
    let wmax = omega_max(bath);
    let eta_diag = integrate(eta_self_integrand(bath, beta, dt), 0.0, wmax)? / PI;
    let eta_off = (1..=kmax)
        .map(|delta| {
            integrate(eta_pair_integrand(bath, beta, dt, delta as f64), 0.0, wmax).map(|z| z / PI)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MemoryKernel {
        dt,
        kmax,
        bath: *bath,
        eta_diag,
        eta_off,
    })
}

/// Same table computed on a fixed grid of `panels` Simpson intervals, for
/// resolution studies.
pub fn memory_kernel_fixed_grid(
    bath: &BathSpec,
    dt: f64,
    kmax: usize,
    panels: usize,
) -> Result<MemoryKernel> {
    bath.validate()?;
    let beta = bath.beta();
    let wmax = omega_max(bath);
    let eta_diag = simpson_fixed(&eta_self_integrand(bath, beta, dt), 0.0, wmax, panels).0 / PI;
    let eta_off = (1..=kmax)
        .map(|d| {
            simpson_fixed(
                &eta_pair_integrand(bath, beta, dt, d as f64),
                0.0,
                wmax,
                panels,
            )
            .0 / PI
        })
        .collect();
    Ok(MemoryKernel {
        dt,
        kmax,
        bath: *bath,
        eta_diag,
        eta_off,
    })
}

/// η between the windows of points `k > k'`, from their absolute window
/// edges rather than the separation alone.
pub fn eta_between(bath: &BathSpec, dt: f64, k: usize, k_prime: usize) -> Result<Complex64> {
    if k <= k_prime {
        return Err(Error::Domain(format!("need k > k', got ({k}, {k_prime})")));
    }
    let beta = bath.beta();
    let (a1, b1) = ((k - 1) as f64 * dt, k as f64 * dt);
    let (a2, b2) = ((k_prime - 1) as f64 * dt, k_prime as f64 * dt);
    let window = move |w: f64| -> Complex64 {
        // ∫_{a1}^{b1} dt ∫_{a2}^{b2} dt' e^{-iω(t - t')}
        let outer = ((-crate::linalg::I * w * b1).exp() - (-crate::linalg::I * w * a1).exp())
            / (-crate::linalg::I * w);
        let inner = ((crate::linalg::I * w * b2).exp() - (crate::linalg::I * w * a2).exp())
            / (crate::linalg::I * w);
        outer * inner
    };
    let z = integrate(
        |w| {
            if w == 0.0 || bath.alpha == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let win = window(w);
            let j = spectral_density_unchecked(bath, w);
            Complex64::new(j * coth(0.5 * beta * w) * win.re, j * win.im)
        },
        0.0,
        omega_max(bath),
    )?;
    Ok(z / PI)
}

/// `λ = (1/π)∫₀^∞ J(ω)/ω dω`, in ps⁻¹.
pub fn reorganization_energy(bath: &BathSpec) -> Result<f64> {
    bath.validate()?;
    let z = integrate(
        |w| Complex64::new(w * density_over_w2(bath, w), 0.0),
        0.0,
        omega_max(bath),
    )?;
    Ok(z.re / PI)
}
