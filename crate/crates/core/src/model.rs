//! System Hamiltonian, dot geometry and phonon spectral density.
//!
//! Basis order throughout the crate is `(00, X0, 0X, XX)`, where `X` marks
//! an excited dot.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units;

/// Exciton count of each basis state.
pub const OCCUPANCY: [f64; 4] = [0.0, 1.0, 1.0, 2.0];

/// Detunings, drive couplings and the interdot exchange coupling, in ps⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub delta1: f64,
    pub delta2: f64,
    pub k1: f64,
    pub k2: f64,
    pub j12: f64,
}

impl SystemParams {
    pub fn new(delta1: f64, delta2: f64, k1: f64, k2: f64, j12: f64) -> Result<Self> {
        let p = Self {
            delta1,
            delta2,
            k1,
            k2,
            j12,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("k1", self.k1),
            ("k2", self.k2),
            ("j12", self.j12),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite, got {v}")));
            }
        }
        if self.j12 < 0.0 {
            return Err(Error::Domain(format!("j12 must be >= 0, got {}", self.j12)));
        }
        Ok(())
    }
}

/// Geometry of the dot pair: dipole in Debye, distances in nm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DotGeometry {
    pub mu: f64,
    pub eps_r: f64,
    pub l: f64,
    pub d: f64,
}

impl DotGeometry {
    pub fn new(mu: f64, eps_r: f64, l: f64, d: f64) -> Result<Self> {
        let g = Self { mu, eps_r, l, d };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::Domain(format!("mu must be >= 0, got {}", self.mu)));
        }
        if !(self.eps_r >= 1.0 && self.eps_r.is_finite()) {
            return Err(Error::Domain(format!(
                "eps_r must be >= 1, got {}",
                self.eps_r
            )));
        }
        if !(self.l > 0.0) {
            return Err(Error::Domain(format!("l must be > 0, got {}", self.l)));
        }
        if !(self.d > 0.0) {
            return Err(Error::Domain(format!("d must be > 0, got {}", self.d)));
        }
        Ok(())
    }
}

/// Superohmic bath `J(ω) = α ω³ exp(-(ω/ω_c)²)` at a given temperature.
///
/// `alpha` is in ps², `omega_c` in ps⁻¹, `temperature` in K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub alpha: f64,
    pub omega_c: f64,
    pub temperature: f64,
}

impl BathSpec {
    pub fn new(alpha: f64, omega_c: f64, temperature: f64) -> Result<Self> {
        let b = Self {
            alpha,
            omega_c,
            temperature,
        };
        b.validate()?;
        Ok(b)
    }

    /// Fitted InGaAs/GaAs values at the given temperature.
    pub fn gaas_fit(temperature: f64) -> Self {
        Self {
            alpha: 0.027,
            omega_c: 2.2,
            temperature,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Domain(format!(
                "alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(Error::Domain(format!(
                "omega_c must be > 0, got {}",
                self.omega_c
            )));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::Domain(format!(
                "temperature must be > 0, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Inverse temperature β in ps (ℏ = 1).
    pub fn beta(&self) -> f64 {
        1.0 / units::thermal_frequency(self.temperature)
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }
}

/// Deformation-potential material constants of the substrate.
///
/// `u` in cm/s, `mass_density` in g/cm³, `d_e`/`d_h` in eV, `d` in nm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub u: f64,
    pub mass_density: f64,
    pub d_e: f64,
    pub d_h: f64,
    pub d: f64,
}

impl MaterialSpec {
    /// Bulk GaAs constants with a 3.3 nm localization length.
    pub fn gaas() -> Self {
        Self {
            u: 5.11e5,
            mass_density: 5.37,
            d_e: -14.6,
            d_h: -4.8,
            d: 3.3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u > 0.0 && self.u.is_finite()) {
            return Err(Error::Domain(format!("u must be > 0, got {}", self.u)));
        }
        if !(self.mass_density > 0.0 && self.mass_density.is_finite()) {
            return Err(Error::Domain(format!(
                "mass_density must be > 0, got {}",
                self.mass_density
            )));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::Domain(format!("d must be > 0, got {}", self.d)));
        }
        if !(self.d_e.is_finite() && self.d_h.is_finite()) {
            return Err(Error::Domain(
                "deformation potentials must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Off-diagonal generator `m`, diagonal energies `omega` and exciton
/// occupancies of the four basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianParts {
    pub m: Matrix4<f64>,
    pub omega: Vector4<f64>,
    pub occupancy: Vector4<f64>,
}

impl HamiltonianParts {
    /// Full system Hamiltonian `m + diag(omega)`.
    pub fn total(&self) -> Matrix4<f64> {
        self.m + Matrix4::from_diagonal(&self.omega)
    }
}

/// Static dipole-dipole coupling `μ²/(4πϵ₀ ε_r L³)` in ps⁻¹.
pub fn dipole_coupling(geom: &DotGeometry) -> Result<f64> {
    geom.validate()?;
    let mu = geom.mu * units::DEBYE;
    let l = geom.l * 1e-9;
    let energy = mu * mu / (4.0 * std::f64::consts::PI * units::EPSILON_0 * geom.eps_r * l.powi(3));
    let j = units::joule_to_inv_ps(energy);
    if !j.is_finite() {
        return Err(Error::Domain(format!(
            "dipole coupling overflowed for l = {} nm",
            geom.l
        )));
    }
    Ok(j)
}

/// Rabi coupling `μE/ℏ` in ps⁻¹ for a dipole in Debye and a field in kV/cm.
pub fn rabi_from_field(mu: f64, field: f64) -> Result<f64> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::Domain(format!("mu must be >= 0, got {mu}")));
    }
    if !(field >= 0.0 && field.is_finite()) {
        return Err(Error::Domain(format!("field must be >= 0, got {field}")));
    }
    // kV/cm -> V/m
    let e = field * 1e5;
    Ok(units::joule_to_inv_ps(mu * units::DEBYE * e))
}

pub fn build_hamiltonian(p: &SystemParams) -> HamiltonianParts {
    let (a, b, j) = (0.5 * p.k1, 0.5 * p.k2, p.j12);
    #[rustfmt::skip]
    let m = Matrix4::new(
        0.0, a,   b,   0.0,
        a,   0.0, j,   b,
        b,   j,   0.0, a,
        0.0, b,   a,   0.0,
    );
    HamiltonianParts {
        m,
        omega: Vector4::new(0.0, p.delta1, p.delta2, p.delta1 + p.delta2),
        occupancy: Vector4::from(OCCUPANCY),
    }
}

/// `J(ω) = α ω³ exp(-(ω/ω_c)²)` in ps⁻¹.
pub fn spectral_density(bath: &BathSpec, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!("omega must be >= 0, got {omega}")));
    }
    Ok(spectral_density_unchecked(bath, omega))
}

#[inline]
pub(crate) fn spectral_density_unchecked(bath: &BathSpec, omega: f64) -> f64 {
    let x = omega / bath.omega_c;
    bath.alpha * omega.powi(3) * (-x * x).exp()
}

/// Maps deformation-potential constants onto the `(α, ω_c)` form.
pub fn material_to_bath(mat: &MaterialSpec, temperature: f64) -> Result<BathSpec> {
    mat.validate()?;
    let u = mat.u * 1e-2; // m/s
    let rho = mat.mass_density * 1e3; // kg/m³
    let d = mat.d * 1e-9; // m
    let dd = (mat.d_h - mat.d_e) * units::E_CHARGE; // J
    let four_pi2 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    let alpha_s2 = dd * dd / (four_pi2 * rho * units::HBAR * u.powi(5));
    let omega_c = std::f64::consts::SQRT_2 * u / d;
    BathSpec::new(
        units::s2_to_ps2(alpha_s2),
        units::inv_s_to_inv_ps(omega_c),
        temperature,
    )
}
