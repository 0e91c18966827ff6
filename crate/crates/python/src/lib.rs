//! Python module `crossdecay`. States and operators cross the boundary as
//! nested lists of `complex`; subsystem dimensions travel alongside.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;

use crossdecay::analytic::{self, PreparedStateParams};
use crossdecay::integrator::{self, EvolutionSpec};
use crossdecay::liouvillian;
use crossdecay::protocol::{self, ProtocolConfig, Readout, SingleCavityVariant};
use crossdecay::{DecayParameters, DensityMatrix, Frame, Ket, SpaceSignature, SuperOperator};

fn check<T>(r: crossdecay::Result<T>) -> PyResult<T> {
    r.map_err(|e| PyValueError::new_err(e.to_string()))
}

fn frame(name: &str) -> PyResult<Frame> {
    match name {
        "lab" => Ok(Frame::Lab),
        "rotating" => Ok(Frame::Rotating),
        other => Err(PyValueError::new_err(format!("frame must be 'lab' or 'rotating', got {other:?}"))),
    }
}

fn to_rows(m: &Array2<C64>) -> Vec<Vec<C64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn from_rows(rows: Vec<Vec<C64>>) -> PyResult<Array2<C64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(Array2::from_shape_vec((n, n), rows.into_iter().flatten().collect()).expect("square"))
}

/// `k`, `r`, `gamma` and mode frequency `omega` of two identical cavities.
#[pyclass(name = "SymmetricDecayParameters", frozen, skip_from_py_object, module = "crossdecay")]
struct PySymmetric(crossdecay::SymmetricDecayParameters);

#[pymethods]
impl PySymmetric {
    #[new]
    #[pyo3(signature = (k, r, gamma, omega = 0.0))]
    fn new(k: f64, r: f64, gamma: f64, omega: f64) -> PyResult<Self> {
        Ok(Self(check(crossdecay::SymmetricDecayParameters::new(k, r, gamma, omega))?))
    }

    #[getter]
    fn k(&self) -> f64 {
        self.0.k()
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega()
    }

    /// General-form constants as a dict.
    #[pyo3(signature = (frame_name = "rotating"))]
    fn to_general<'py>(&self, py: Python<'py>, frame_name: &str) -> PyResult<Bound<'py, PyAny>> {
        to_python(py, &self.0.to_general(frame(frame_name)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "SymmetricDecayParameters(k={}, r={}, gamma={}, omega={})",
            self.0.k(),
            self.0.r(),
            self.0.gamma(),
            self.0.omega()
        )
    }
}

/// Liouvillian superoperator on a product space.
#[pyclass(name = "Liouvillian", frozen, module = "crossdecay")]
struct PyLiouvillian(SuperOperator);

#[pymethods]
impl PyLiouvillian {
    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.0.space().dims().to_vec()
    }

    /// Dense matrix on column-stacked operators.
    fn matrix(&self) -> PyResult<Vec<Vec<C64>>> {
        Ok(to_rows(&check(self.0.matrix())?))
    }

    /// `L(x)` for a square matrix `x`.
    fn apply(&self, x: Vec<Vec<C64>>) -> PyResult<Vec<Vec<C64>>> {
        Ok(to_rows(&check(self.0.apply_matrix(&from_rows(x)?))?))
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self(check(self.0.add(&other.0))?))
    }
}

fn space(dims: Vec<usize>) -> PyResult<SpaceSignature> {
    check(SpaceSignature::new(&dims))
}

#[pyfunction]
#[pyo3(signature = (params, dims, frame_name = "rotating"))]
fn symmetric_liouvillian(params: &PySymmetric, dims: Vec<usize>, frame_name: &str) -> PyResult<PyLiouvillian> {
    Ok(PyLiouvillian(check(liouvillian::build_symmetric_liouvillian(&params.0, &space(dims)?, frame(frame_name)?))?))
}

#[allow(clippy::too_many_arguments)]
#[pyfunction]
#[pyo3(signature = (dims, *, k11 = 0.0, k22 = 0.0, k12 = 0.0, k21 = 0.0, d11 = 0.0, d22 = 0.0, d12 = 0.0, d21 = 0.0, omega1 = 0.0, omega2 = 0.0))]
fn general_liouvillian(
    dims: Vec<usize>,
    k11: f64,
    k22: f64,
    k12: f64,
    k21: f64,
    d11: f64,
    d22: f64,
    d12: f64,
    d21: f64,
    omega1: f64,
    omega2: f64,
) -> PyResult<PyLiouvillian> {
    let p = DecayParameters { k11, k22, k12, k21, d11, d22, d12, d21, omega1, omega2 };
    Ok(PyLiouvillian(check(liouvillian::build_general_liouvillian(&p, &space(dims)?))?))
}

/// `(L1, L2)` damping the slow and fast normal modes.
#[pyfunction]
#[pyo3(signature = (params, dims, frame_name = "rotating"))]
fn decompose_symmetric(params: &PySymmetric, dims: Vec<usize>, frame_name: &str) -> PyResult<(PyLiouvillian, PyLiouvillian)> {
    let (l1, l2) = check(liouvillian::decompose_symmetric(&params.0, &space(dims)?, frame(frame_name)?))?;
    Ok((PyLiouvillian(l1), PyLiouvillian(l2)))
}

/// `ρ(t)` from a density matrix given as rows; `method` is "rk4" or "exponential".
#[pyfunction]
#[pyo3(signature = (rho, liouvillian, duration, method = "rk4", step = None))]
fn evolve_master(
    rho: Vec<Vec<C64>>,
    liouvillian: &PyLiouvillian,
    duration: f64,
    method: &str,
    step: Option<f64>,
) -> PyResult<Vec<Vec<C64>>> {
    let mut spec = match method {
        "rk4" => EvolutionSpec::rk4(duration),
        "exponential" => EvolutionSpec::exponential(duration),
        other => return Err(PyValueError::new_err(format!("method must be 'rk4' or 'exponential', got {other:?}"))),
    };
    if let Some(h) = step {
        spec = spec.with_step(h);
    }
    let rho = check(DensityMatrix::from_matrix(from_rows(rho)?, liouvillian.0.space()))?;
    Ok(to_rows(check(integrator::evolve_master(&rho, &liouvillian.0, &spec))?.matrix()))
}

/// `⟨ψ|ρ|ψ⟩` for a ket given by amplitudes.
#[pyfunction]
fn fidelity(rho: Vec<Vec<C64>>, psi: Vec<C64>, dims: Vec<usize>) -> PyResult<f64> {
    let s = space(dims)?;
    let rho = check(DensityMatrix::from_matrix(from_rows(rho)?, &s))?;
    check(rho.fidelity_with(&check(Ket::new(psi.into(), &s))?))
}

fn ket_out(k: Ket) -> (Vec<C64>, Vec<usize>) {
    (k.amplitudes().to_vec(), k.space().dims().to_vec())
}

/// Amplitudes and dims of `e^{iφ} sin θ |1,0⟩ + cos θ |0,1⟩`.
#[pyfunction]
#[pyo3(signature = (theta, phi, n_max = 1))]
fn prepared_state(theta: f64, phi: f64, n_max: usize) -> PyResult<(Vec<C64>, Vec<usize>)> {
    let p = check(PreparedStateParams::new(theta, phi))?;
    Ok(ket_out(check(analytic::prepared_state(&p, n_max))?))
}

#[pyfunction]
#[pyo3(signature = (gamma, n_max = 1))]
fn robust_entangled_state(gamma: f64, n_max: usize) -> PyResult<(Vec<C64>, Vec<usize>)> {
    Ok(ket_out(check(analytic::robust_entangled_state(gamma, n_max))?))
}

#[pyfunction]
fn robust_coherent_state(gamma: f64, v: C64, n_max: usize) -> PyResult<(Vec<C64>, Vec<usize>)> {
    Ok(ket_out(check(analytic::robust_coherent_state(gamma, v, n_max))?))
}

#[pyfunction]
fn robust_fock_state(gamma: f64, n: usize, n_max: usize) -> PyResult<(Vec<C64>, Vec<usize>)> {
    Ok(ket_out(check(analytic::robust_fock_state(gamma, n, n_max))?))
}

/// Single-excitation propagator `M(t)` as a 2×2 nested list.
#[pyfunction]
fn single_excitation_propagator(k: f64, r: f64, gamma: f64, t: f64) -> PyResult<Vec<Vec<C64>>> {
    let m = check(analytic::single_excitation_propagator(k, r, gamma, t))?;
    Ok(m.0.iter().map(|row| row.to_vec()).collect())
}

#[pyfunction]
fn prob_e_two_cavity(theta: f64, phi: f64, k: f64, r: f64, gamma: f64, t: f64) -> PyResult<f64> {
    let p = check(PreparedStateParams::new(theta, phi))?;
    check(analytic::prob_e_two_cavity(&p, k, r, gamma, t))
}

#[pyfunction]
fn prob_e_single_cavity_resonant(k: f64, r: f64, gamma: f64, t: f64) -> PyResult<f64> {
    check(analytic::prob_e_single_cavity_resonant(k, r, gamma, t))
}

#[pyfunction]
fn prob_e_single_cavity_detuned(k: f64, t: f64) -> PyResult<f64> {
    check(analytic::prob_e_single_cavity_detuned(k, t))
}

#[pyfunction]
fn discriminator(k: f64, r: f64, gamma: f64, t: f64) -> PyResult<f64> {
    check(analytic::discriminator(k, r, gamma, t))
}

fn to_python<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[allow(clippy::too_many_arguments)]
fn protocol_config(
    params: &PySymmetric,
    theta: f64,
    phi: f64,
    window: f64,
    g: Option<f64>,
    omega: Option<f64>,
    omega_a: Option<f64>,
    n_max: usize,
    frame_name: &str,
    dissipate_during_pulses: bool,
) -> PyResult<ProtocolConfig> {
    let mut cfg = ProtocolConfig::new(params.0, theta, phi, window);
    if let Some(g) = g {
        cfg.g = g;
    }
    if let Some(omega) = omega {
        cfg.omega = omega;
        cfg.omega_a = omega + protocol::DEFAULT_DETUNING;
    }
    if let Some(omega_a) = omega_a {
        cfg.omega_a = omega_a;
    }
    cfg.n_max = n_max;
    cfg.frame = frame(frame_name)?;
    cfg.dissipate_during_pulses = dissipate_during_pulses;
    check(cfg.validate())?;
    Ok(cfg)
}

/// Two-cavity protocol; returns the run record as a dict.
#[allow(clippy::too_many_arguments)]
#[pyfunction]
#[pyo3(signature = (params, theta, phi, window, readout = "overlap", *, g = None, omega = None, omega_a = None, n_max = 1, frame_name = "rotating", dissipate_during_pulses = false))]
fn run_two_cavity<'py>(
    py: Python<'py>,
    params: &PySymmetric,
    theta: f64,
    phi: f64,
    window: f64,
    readout: &str,
    g: Option<f64>,
    omega: Option<f64>,
    omega_a: Option<f64>,
    n_max: usize,
    frame_name: &str,
    dissipate_during_pulses: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let readout = match readout {
        "overlap" => Readout::Overlap,
        "explicit" => Readout::Explicit,
        other => return Err(PyValueError::new_err(format!("readout must be 'overlap' or 'explicit', got {other:?}"))),
    };
    let cfg = protocol_config(params, theta, phi, window, g, omega, omega_a, n_max, frame_name, dissipate_during_pulses)?;
    let record = py.detach(|| protocol::run_two_cavity(&cfg, readout));
    to_python(py, &check(record)?)
}

/// Single-cavity protocol, `variant` "resonant" or "detuned".
#[allow(clippy::too_many_arguments)]
#[pyfunction]
#[pyo3(signature = (params, window, variant = "resonant", *, g = None, omega = None, omega_a = None, n_max = 1, frame_name = "rotating", dissipate_during_pulses = false))]
fn run_single_cavity<'py>(
    py: Python<'py>,
    params: &PySymmetric,
    window: f64,
    variant: &str,
    g: Option<f64>,
    omega: Option<f64>,
    omega_a: Option<f64>,
    n_max: usize,
    frame_name: &str,
    dissipate_during_pulses: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let variant = match variant {
        "resonant" => SingleCavityVariant::Resonant,
        "detuned" => SingleCavityVariant::Detuned,
        other => return Err(PyValueError::new_err(format!("variant must be 'resonant' or 'detuned', got {other:?}"))),
    };
    let cfg = protocol_config(params, 0.0, 0.0, window, g, omega, omega_a, n_max, frame_name, dissipate_during_pulses)?;
    let record = py.detach(|| protocol::run_single_cavity(&cfg, variant));
    to_python(py, &check(record)?)
}

#[pymodule]
#[pyo3(name = "crossdecay")]
fn crossdecay_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySymmetric>()?;
    m.add_class::<PyLiouvillian>()?;
    m.add_function(wrap_pyfunction!(symmetric_liouvillian, m)?)?;
    m.add_function(wrap_pyfunction!(general_liouvillian, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_symmetric, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_master, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(prepared_state, m)?)?;
    m.add_function(wrap_pyfunction!(robust_entangled_state, m)?)?;
    m.add_function(wrap_pyfunction!(robust_coherent_state, m)?)?;
    m.add_function(wrap_pyfunction!(robust_fock_state, m)?)?;
    m.add_function(wrap_pyfunction!(single_excitation_propagator, m)?)?;
    m.add_function(wrap_pyfunction!(prob_e_two_cavity, m)?)?;
    m.add_function(wrap_pyfunction!(prob_e_single_cavity_resonant, m)?)?;
    m.add_function(wrap_pyfunction!(prob_e_single_cavity_detuned, m)?)?;
    m.add_function(wrap_pyfunction!(discriminator, m)?)?;
    m.add_function(wrap_pyfunction!(run_two_cavity, m)?)?;
    m.add_function(wrap_pyfunction!(run_single_cavity, m)?)?;
    Ok(())
}
