//! Python bindings for the two-dot QUAPI simulator.
//!
//! Density matrices cross the boundary as 4×4 nested lists of complex
//! numbers in the (00, X0, 0X, XX) basis.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qd_quapi::entanglement::{self, StandardState};
use qd_quapi::linalg::CMat4;
use qd_quapi::{cli, influence, model, propagator, Error};

type Matrix = Vec<Vec<Complex64>>;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Config(_) | Error::InvalidState(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_matrix(m: &CMat4) -> Matrix {
    (0..4)
        .map(|i| (0..4).map(|j| m[(i, j)]).collect())
        .collect()
}

fn from_matrix(rows: &Matrix) -> PyResult<CMat4> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(PyValueError::new_err("density matrix must be 4x4"));
    }
    Ok(CMat4::from_fn(|i, j| rows[i][j]))
}

fn density(rows: &Matrix) -> PyResult<propagator::DensityMatrix> {
    propagator::DensityMatrix::new(from_matrix(rows)?).map_err(to_py)
}

#[pyclass(name = "SystemParams", from_py_object)]
#[derive(Clone)]
struct PySystemParams {
    inner: model::SystemParams,
}

#[pymethods]
impl PySystemParams {
    #[new]
    #[pyo3(signature = (j12, k1 = 0.0, k2 = 0.0, delta1 = 0.0, delta2 = 0.0))]
    fn new(j12: f64, k1: f64, k2: f64, delta1: f64, delta2: f64) -> PyResult<Self> {
        let inner = model::SystemParams::new(delta1, delta2, k1, k2, j12).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn j12(&self) -> f64 {
        self.inner.j12
    }

    #[getter]
    fn k1(&self) -> f64 {
        self.inner.k1
    }

    #[getter]
    fn k2(&self) -> f64 {
        self.inner.k2
    }

    /// Total Hamiltonian in ps⁻¹.
    fn hamiltonian(&self) -> Vec<Vec<f64>> {
        let h = model::build_hamiltonian(&self.inner).total();
        (0..4)
            .map(|i| (0..4).map(|j| h[(i, j)]).collect())
            .collect()
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "SystemParams(j12={}, k1={}, k2={}, delta1={}, delta2={})",
            p.j12, p.k1, p.k2, p.delta1, p.delta2
        )
    }
}

#[pyclass(name = "BathSpec", from_py_object)]
#[derive(Clone)]
struct PyBathSpec {
    inner: model::BathSpec,
}

#[pymethods]
impl PyBathSpec {
    #[new]
    fn new(alpha: f64, omega_c: f64, temperature: f64) -> PyResult<Self> {
        let inner = model::BathSpec::new(alpha, omega_c, temperature).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Bath from GaAs material constants.
    #[staticmethod]
    fn gaas_material(temperature: f64) -> PyResult<Self> {
        let inner =
            model::material_to_bath(&model::MaterialSpec::gaas(), temperature).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn omega_c(&self) -> f64 {
        self.inner.omega_c
    }

    #[getter]
    fn temperature(&self) -> f64 {
        self.inner.temperature
    }

    fn spectral_density(&self, omega: f64) -> PyResult<f64> {
        model::spectral_density(&self.inner, omega).map_err(to_py)
    }

    fn correlation(&self, t: f64) -> PyResult<Complex64> {
        influence::bath_correlation(&self.inner, t).map_err(to_py)
    }

    fn reorganization_energy(&self) -> PyResult<f64> {
        influence::reorganization_energy(&self.inner).map_err(to_py)
    }

    /// `[η_0, η_1, ..., η_kmax]`.
    fn memory_kernel(&self, dt: f64, kmax: usize) -> PyResult<Vec<Complex64>> {
        let k = influence::memory_kernel(&self.inner, dt, kmax).map_err(to_py)?;
        Ok((0..=kmax).map(|d| k.eta(d)).collect())
    }

    fn __repr__(&self) -> String {
        let b = &self.inner;
        format!(
            "BathSpec(alpha={}, omega_c={}, temperature={})",
            b.alpha, b.omega_c, b.temperature
        )
    }
}

#[pyclass(name = "Trajectory", from_py_object)]
#[derive(Clone)]
struct PyTrajectory {
    inner: propagator::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    fn __len__(&self) -> usize {
        self.inner.records.len()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.t).collect()
    }

    #[getter]
    fn purity(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.purity).collect()
    }

    #[getter]
    fn trace_error(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.trace_error).collect()
    }

    fn rho(&self, index: usize) -> PyResult<Matrix> {
        self.inner
            .records
            .get(index)
            .map(|r| to_matrix(r.rho.matrix()))
            .ok_or_else(|| PyValueError::new_err(format!("index {index} out of range")))
    }

    fn magic_diagonal(&self) -> Vec<[f64; 4]> {
        self.inner
            .records
            .iter()
            .map(|r| entanglement::magic_diagonal(&r.rho))
            .collect()
    }

    /// Entanglement of formation per record; NaN where ρ fails the
    /// positivity check.
    fn eof(&self) -> Vec<f64> {
        self.inner
            .records
            .iter()
            .map(|r| entanglement::eof(&r.rho).unwrap_or(f64::NAN))
            .collect()
    }
}

#[pyfunction]
#[pyo3(signature = (mu, eps_r, l, d = 3.3))]
fn dipole_coupling(mu: f64, eps_r: f64, l: f64, d: f64) -> PyResult<f64> {
    let geom = model::DotGeometry::new(mu, eps_r, l, d).map_err(to_py)?;
    model::dipole_coupling(&geom).map_err(to_py)
}

#[pyfunction]
fn rabi_from_field(mu: f64, field: f64) -> PyResult<f64> {
    model::rabi_from_field(mu, field).map_err(to_py)
}

/// Named state: e1..e4, singlet, ground, mixed or werner(λ).
#[pyfunction]
fn standard_state(name: &str) -> PyResult<Matrix> {
    let state: StandardState = name.parse().map_err(to_py)?;
    let rho = entanglement::standard_state(state).map_err(to_py)?;
    Ok(to_matrix(rho.matrix()))
}

#[pyfunction]
fn concurrence(rho: Matrix) -> PyResult<f64> {
    entanglement::concurrence(&density(&rho)?).map_err(to_py)
}

#[pyfunction]
fn entanglement_of_formation(rho: Matrix) -> PyResult<f64> {
    entanglement::eof(&density(&rho)?).map_err(to_py)
}

#[pyfunction]
fn magic_diagonal(rho: Matrix) -> PyResult<[f64; 4]> {
    Ok(entanglement::magic_diagonal(&density(&rho)?))
}

#[pyfunction]
#[pyo3(signature = (system, bath, rho0, dt, n_steps, kmax, stride = 1))]
fn propagate(
    py: Python<'_>,
    system: &PySystemParams,
    bath: &PyBathSpec,
    rho0: Matrix,
    dt: f64,
    n_steps: usize,
    kmax: usize,
    stride: usize,
) -> PyResult<PyTrajectory> {
    let rho0 = density(&rho0)?;
    let h = model::build_hamiltonian(&system.inner);
    let bath = bath.inner;
    let inner = py
        .detach(move || -> qd_quapi::Result<propagator::Trajectory> {
            let grid = propagator::SimGrid::new(dt, n_steps, kmax)?;
            let kernel = influence::memory_kernel(&bath, dt, kmax)?;
            let options = propagator::PropagationOptions {
                stride,
                ..Default::default()
            };
            propagator::propagate_with(&rho0, &h, &kernel, &grid, &options)
        })
        .map_err(to_py)?;
    Ok(PyTrajectory { inner })
}

/// Runs a TOML configuration document, writing the trajectory CSV to
/// `path`. Returns the final entanglement of formation.
#[pyfunction]
fn run_config(py: Python<'_>, text: &str, path: std::path::PathBuf) -> PyResult<f64> {
    let cfg = cli::load_config(text).map_err(to_py)?;
    let summary = py
        .detach(|| cli::run_to_path(&cfg, &path, None))
        .map_err(to_py)?;
    Ok(summary.final_eof)
}

#[pymodule]
fn qd_quapi_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_class::<PyBathSpec>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(dipole_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(rabi_from_field, m)?)?;
    m.add_function(wrap_pyfunction!(standard_state, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement_of_formation, m)?)?;
    m.add_function(wrap_pyfunction!(magic_diagonal, m)?)?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
