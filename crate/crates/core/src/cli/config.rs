//! Run configuration: a TOML document with the sections `[system]`,
//! `[bath]`, `[grid]`, `[initial]` and `[output]`.
//!
//! ```toml
//! [system]
//! mu = 79.3        # Debye; with eps_r and l gives j12
//! eps_r = 10.0
//! l = 10.0         # nm
//! d = 3.3          # nm
//! field = 1.9      # kV/cm; gives k1 = k2 = μE/ℏ
//!
//! [bath]
//! alpha = 0.027    # ps²
//! omega_c = 2.2    # ps⁻¹
//! temperature = 77.0
//!
//! [grid]
//! dt = 0.25
//! n_steps = 4000
//! kmax = 5
//!
//! [initial]
//! state = "e3"
//!
//! [output]
//! path = "baseline.csv"
//! stride = 4
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::entanglement::{standard_state, StandardState};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat4};
use crate::model::{
    dipole_coupling, material_to_bath, rabi_from_field, BathSpec, DotGeometry, MaterialSpec,
    SystemParams,
};
use crate::propagator::{DensityMatrix, SimGrid};
use crate::units;

const SECTIONS: [&str; 5] = ["system", "bath", "grid", "initial", "output"];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    system: Option<RawSystem>,
    bath: Option<RawBath>,
    grid: Option<RawGrid>,
    initial: Option<RawInitial>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(skip_serializing_if = "Option::is_none")]
    delta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    j12: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBath {
    alpha: Option<f64>,
    omega_c: Option<f64>,
    temperature: Option<f64>,
    u: Option<f64>,
    mass_density: Option<f64>,
    d_e: Option<f64>,
    d_h: Option<f64>,
    d: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    dt: Option<f64>,
    n_steps: Option<usize>,
    kmax: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    state: Option<String>,
    werner_lambda: Option<f64>,
    rho_re: Option<[[f64; 4]; 4]>,
    rho_im: Option<[[f64; 4]; 4]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    stride: Option<usize>,
}

/// Where the system couplings came from.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemSource {
    Explicit,
    Geometry {
        geometry: DotGeometry,
        field: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum BathSource {
    Explicit,
    Material(MaterialSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Named(StandardState),
    Explicit(DensityMatrix),
}

impl InitialState {
    pub fn density(&self) -> Result<DensityMatrix> {
        match self {
            Self::Named(s) => standard_state(*s),
            Self::Explicit(rho) => Ok(rho.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub stride: usize,
}

/// Validated configuration with every derived quantity resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemParams,
    pub system_source: SystemSource,
    pub bath: BathSpec,
    pub bath_source: BathSource,
    pub grid: SimGrid,
    pub initial: InitialState,
    pub output: OutputSpec,
}

fn config_err(key: &str, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {e}"))
}

fn require<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing key '{key}'")))
}

fn resolve_system(raw: &RawSystem) -> Result<(SystemParams, SystemSource)> {
    let geometry_keys = raw.mu.is_some() || raw.eps_r.is_some() || raw.l.is_some();
    let (j12, geometry) = match (raw.j12, geometry_keys) {
        (Some(_), true) => {
            return Err(Error::Config(
                "system: give either 'j12' or the geometry keys 'mu', 'eps_r', 'l', not both"
                    .into(),
            ))
        }
        (Some(j), false) => (j, None),
        (None, true) => {
            let geom = DotGeometry::new(
                require(raw.mu, "system.mu")?,
                require(raw.eps_r, "system.eps_r")?,
                require(raw.l, "system.l")?,
                raw.d.unwrap_or(3.3),
            )
            .map_err(|e| config_err("system", e))?;
            (
                dipole_coupling(&geom).map_err(|e| config_err("system.l", e))?,
                Some(geom),
            )
        }
        (None, false) => {
            return Err(Error::Config(
                "missing key 'system.j12' (or geometry keys 'mu', 'eps_r', 'l')".into(),
            ))
        }
    };
    let (k1, k2) = match (raw.field, raw.k1, raw.k2) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(Error::Config(
                "system: give either 'field' or 'k1'/'k2', not both".into(),
            ))
        }
        (Some(field), None, None) => {
            let mu = raw
                .mu
                .ok_or_else(|| Error::Config("system.field requires 'mu'".into()))?;
            let k = rabi_from_field(mu, field).map_err(|e| config_err("system.field", e))?;
            (k, k)
        }
        (None, k1, k2) => (k1.unwrap_or(0.0), k2.unwrap_or(0.0)),
    };
    let params = SystemParams::new(
        raw.delta1.unwrap_or(0.0),
        raw.delta2.unwrap_or(0.0),
        k1,
        k2,
        j12,
    )
    .map_err(|e| config_err("system", e))?;
    let source = match geometry {
        Some(geometry) => SystemSource::Geometry {
            geometry,
            field: raw.field,
        },
        None => SystemSource::Explicit,
    };
    Ok((params, source))
}

fn resolve_bath(raw: &RawBath) -> Result<(BathSpec, BathSource)> {
    let temperature = require(raw.temperature, "bath.temperature")?;
    let material_keys =
        raw.u.is_some() || raw.mass_density.is_some() || raw.d_e.is_some() || raw.d_h.is_some();
    let fit_keys = raw.alpha.is_some() || raw.omega_c.is_some();
    match (fit_keys, material_keys) {
        (true, true) => Err(Error::Config(
            "bath: give either 'alpha'/'omega_c' or material constants, not both".into(),
        )),
        (true, false) => {
            let bath = BathSpec::new(
                require(raw.alpha, "bath.alpha")?,
                require(raw.omega_c, "bath.omega_c")?,
                temperature,
            )
            .map_err(|e| config_err("bath", e))?;
            Ok((bath, BathSource::Explicit))
        }
        (false, true) => {
            let mat = MaterialSpec {
                u: require(raw.u, "bath.u")?,
                mass_density: require(raw.mass_density, "bath.mass_density")?,
                d_e: require(raw.d_e, "bath.d_e")?,
                d_h: require(raw.d_h, "bath.d_h")?,
                d: require(raw.d, "bath.d")?,
            };
            let bath = material_to_bath(&mat, temperature).map_err(|e| config_err("bath", e))?;
            Ok((bath, BathSource::Material(mat)))
        }
        (false, false) => Err(Error::Config(
            "missing key 'bath.alpha' and 'bath.omega_c' (or material constants)".into(),
        )),
    }
}

fn resolve_initial(raw: &RawInitial) -> Result<InitialState> {
    match (&raw.state, &raw.rho_re) {
        (Some(_), Some(_)) => Err(Error::Config(
            "initial: give either 'state' or 'rho_re'/'rho_im', not both".into(),
        )),
        (Some(name), None) => {
            let state = if name == "werner" {
                let lambda = require(raw.werner_lambda, "initial.werner_lambda")?;
                StandardState::Werner(lambda)
            } else {
                if raw.werner_lambda.is_some() {
                    return Err(Error::Config(
                        "initial.werner_lambda is only valid with state = \"werner\"".into(),
                    ));
                }
                name.parse().map_err(|e| config_err("initial.state", e))?
            };
            standard_state(state).map_err(|e| config_err("initial.werner_lambda", e))?;
            Ok(InitialState::Named(state))
        }
        (None, Some(re)) => {
            let im = raw.rho_im.unwrap_or([[0.0; 4]; 4]);
            let mut m = CMat4::zeros();
            for i in 0..4 {
                for j in 0..4 {
                    m[(i, j)] = c(re[i][j], im[i][j]);
                }
            }
            let rho = DensityMatrix::new(m).map_err(|e| config_err("initial.rho_re", e))?;
            Ok(InitialState::Explicit(rho))
        }
        (None, None) => Err(Error::Config(
            "missing key 'initial.state' (or 'initial.rho_re')".into(),
        )),
    }
}

/// Parses and validates a configuration document.
pub fn load_config(text: &str) -> Result<RunConfig> {
    let doc: RawDocument =
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    let present = [
        doc.system.is_some(),
        doc.bath.is_some(),
        doc.grid.is_some(),
        doc.initial.is_some(),
        doc.output.is_some(),
    ];
    let missing: Vec<_> = SECTIONS
        .iter()
        .zip(present)
        .filter(|(_, p)| !p)
        .map(|(s, _)| format!("[{s}]"))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Config(format!(
            "missing sections: {}",
            missing.join(", ")
        )));
    }
    let (system, system_source) = resolve_system(doc.system.as_ref().unwrap())?;
    let (bath, bath_source) = resolve_bath(doc.bath.as_ref().unwrap())?;
    let raw_grid = doc.grid.as_ref().unwrap();
    let grid = SimGrid::new(
        require(raw_grid.dt, "grid.dt")?,
        require(raw_grid.n_steps, "grid.n_steps")?,
        require(raw_grid.kmax, "grid.kmax")?,
    )
    .map_err(|e| config_err("grid", e))?;
    let initial = resolve_initial(doc.initial.as_ref().unwrap())?;
    let raw_out = doc.output.as_ref().unwrap();
    let stride = raw_out.stride.unwrap_or(1);
    if stride < 1 {
        return Err(Error::Config("output.stride must be >= 1".into()));
    }
    let output = OutputSpec {
        path: raw_out
            .path
            .clone()
            .unwrap_or_else(|| PathBuf::from("trajectory.csv")),
        stride,
    };
    Ok(RunConfig {
        system,
        system_source,
        bath,
        bath_source,
        grid,
        initial,
        output,
    })
}

pub fn load_config_file(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    load_config(&text)
}

#[derive(Serialize)]
struct EchoDocument<'a> {
    system: &'a SystemParams,
    bath: &'a BathSpec,
    grid: &'a SimGrid,
    initial: EchoInitial,
    output: EchoOutput,
}

#[derive(Serialize)]
struct EchoInitial {
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    werner_lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_re: Option<[[f64; 4]; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_im: Option<[[f64; 4]; 4]>,
}

#[derive(Serialize)]
struct EchoOutput {
    path: String,
    stride: usize,
}

impl RunConfig {
    /// Canonical TOML form with all derived couplings resolved; loading it
    /// reproduces the same run.
    pub fn to_toml(&self) -> String {
        let initial = match &self.initial {
            InitialState::Named(StandardState::Werner(l)) => EchoInitial {
                state: Some("werner".into()),
                werner_lambda: Some(*l),
                rho_re: None,
                rho_im: None,
            },
            InitialState::Named(s) => EchoInitial {
                state: Some(s.to_string()),
                werner_lambda: None,
                rho_re: None,
                rho_im: None,
            },
            InitialState::Explicit(rho) => {
                let m = rho.matrix();
                let part = |f: fn(&num_complex::Complex64) -> f64| {
                    let mut out = [[0.0; 4]; 4];
                    for (i, row) in out.iter_mut().enumerate() {
                        for (j, v) in row.iter_mut().enumerate() {
                            *v = f(&m[(i, j)]);
                        }
                    }
                    out
                };
                EchoInitial {
                    state: None,
                    werner_lambda: None,
                    rho_re: Some(part(|z| z.re)),
                    rho_im: Some(part(|z| z.im)),
                }
            }
        };
        let doc = EchoDocument {
            system: &self.system,
            bath: &self.bath,
            grid: &self.grid,
            initial,
            output: EchoOutput {
                path: self.output.path.display().to_string(),
                stride: self.output.stride,
            },
        };
        toml::to_string(&doc).expect("config echo serializes")
    }

    /// The canonical TOML followed by the derived summary as TOML comments,
    /// so the whole block loads back with [`load_config`].
    pub fn echo(&self) -> String {
        let mut s = self.to_toml();
        for line in self.derived_summary().lines() {
            let _ = writeln!(s, "# {line}");
        }
        s
    }

    /// Human-readable summary of the derived physical quantities.
    pub fn derived_summary(&self) -> String {
        let mut s = String::new();
        match &self.system_source {
            SystemSource::Geometry { geometry, field } => {
                let _ = writeln!(
                    s,
                    "j12 = {:.6} ps^-1 from mu = {} D, eps_r = {}, l = {} nm",
                    self.system.j12, geometry.mu, geometry.eps_r, geometry.l
                );
                if let Some(f) = field {
                    let _ = writeln!(
                        s,
                        "k1 = k2 = {:.6} ps^-1 from field = {f} kV/cm",
                        self.system.k1
                    );
                }
            }
            SystemSource::Explicit => {
                let _ = writeln!(s, "j12 = {:.6} ps^-1 (explicit)", self.system.j12);
            }
        }
        let _ = writeln!(
            s,
            "k1 = {:.6}, k2 = {:.6}, delta1 = {:.6}, delta2 = {:.6} ps^-1",
            self.system.k1, self.system.k2, self.system.delta1, self.system.delta2
        );
        match &self.bath_source {
            BathSource::Material(m) => {
                let _ = writeln!(
                    s,
                    "alpha = {:.6} ps^2, omega_c = {:.6} ps^-1 from u = {} cm/s, rho = {} g/cm^3, D_e = {} eV, D_h = {} eV, d = {} nm",
                    self.bath.alpha, self.bath.omega_c, m.u, m.mass_density, m.d_e, m.d_h, m.d
                );
            }
            BathSource::Explicit => {
                let _ = writeln!(
                    s,
                    "alpha = {:.6} ps^2, omega_c = {:.6} ps^-1 (explicit)",
                    self.bath.alpha, self.bath.omega_c
                );
            }
        }
        let _ = writeln!(
            s,
            "T = {} K, k_B T / hbar = {:.6} ps^-1",
            self.bath.temperature,
            units::thermal_frequency(self.bath.temperature)
        );
        let _ = writeln!(
            s,
            "dt = {} ps, n_steps = {}, kmax = {}, horizon = {} ps",
            self.grid.dt,
            self.grid.n_steps,
            self.grid.kmax,
            self.grid.horizon()
        );
        s
    }
}
